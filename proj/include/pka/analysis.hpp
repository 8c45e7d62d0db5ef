#pragma once

#include <map>
#include <string>
#include <vector>

#include "pka/interproc.hpp"
#include "pka/lang/interp.hpp"
#include "pka/lradom.hpp"
#include "pka/reldom.hpp"

namespace pka {

/// Does every state described by `value` (after the transition) satisfy `cond`?
inline bool assertion_holds(const LraDomain& dom, const lra::TransFormula& value, const BExpPtr& cond) {
  return dom.entails(value, dom.assertion(cond));
}

inline bool assertion_holds(const RelDomain& dom, const RelValue& value, const BExpPtr& cond) {
  for (auto [from, to] : value.pairs()) {
    (void)from;
    auto ok = eval_bexp(cond, dom.space().decode(to));
    if (!ok || !*ok) return false;
  }
  return true;
}

enum class SummaryMode { Widening, Lfp };

struct AssertionVerdict {
  const Assertion* assertion = nullptr;
  bool safe = false;
};

template <QuantifiedDomain D>
struct ProgramAnalysis {
  SummaryRun<D> summaries;
  std::map<VertexId, typename D::value_type> values;
  std::vector<AssertionVerdict> verdicts;

  bool all_safe() const {
    for (const auto& v : verdicts)
      if (!v.safe) return false;
    return true;
  }
};

template <QuantifiedDomain D>
ProgramAnalysis<D> analyze_program(const Program& prog, const D& dom, SummaryMode mode, std::size_t budget = 200) {
  Interproc<D> ip(prog, dom);
  ProgramAnalysis<D> out;
  out.summaries = mode == SummaryMode::Widening ? ip.fixpoint_widening(budget) : ip.fixpoint_lfp(budget);
  if (!out.summaries.converged) {
    std::string names;
    for (ProcId p : out.summaries.unstable) names += (names.empty() ? "" : ", ") + prog.procedures[p].name;
    throw Error("summary iteration budget of " + std::to_string(budget) + " rounds exhausted; still changing: " + names);
  }
  out.values = ip.path_to(out.summaries.summaries());
  for (const Assertion& a : prog.assertions)
    out.verdicts.push_back({&a, assertion_holds(dom, out.values.at(a.vertex), a.cond)});
  return out;
}

}  // namespace pka
