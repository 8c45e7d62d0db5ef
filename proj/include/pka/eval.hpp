#pragma once

#include <functional>
#include <map>
#include <optional>
#include <random>
#include <unordered_map>
#include <vector>

#include "pka/algebra.hpp"
#include "pka/lang/program.hpp"
#include "pka/pathexpr.hpp"
#include "pka/regex.hpp"

namespace pka {

/// A domain together with the meaning of each edge.
template <PkaDomain D>
struct Interpretation {
  using V = typename D::value_type;
  const D* dom = nullptr;
  std::function<V(EdgeId)> edge_value;
};

/// The standard interpretation of intraprocedural edges of `prog`.
template <PkaDomain D>
Interpretation<D> action_interpretation(const Program& prog, const D& dom) {
  return {&dom, [&prog, &dom](EdgeId e) { return dom.action(prog.edge(e).action); }};
}

/// Evaluates a path expression bottom-up. Shared subexpressions and repeated
/// edges are evaluated once.
template <PkaDomain D>
class Interpreter {
 public:
  using V = typename D::value_type;
  explicit Interpreter(Interpretation<D> interp) : interp_(std::move(interp)) {}

  V operator()(const PathPtr& p) {
    auto it = memo_.find(p.get());
    if (it != memo_.end()) return it->second;
    const D& d = *interp_.dom;
    V out = d.zero();
    switch (p->kind) {
      case PathExpr::Kind::Empty:
        out = d.zero();
        break;
      case PathExpr::Kind::Eps:
        out = d.one();
        break;
      case PathExpr::Kind::Edge: {
        auto e = edges_.find(p->edge);
        if (e == edges_.end()) e = edges_.emplace(p->edge, interp_.edge_value(p->edge)).first;
        out = e->second;
        break;
      }
      case PathExpr::Kind::Plus:
        out = d.plus((*this)(p->l), (*this)(p->r));
        break;
      case PathExpr::Kind::Times:
        out = d.times((*this)(p->l), (*this)(p->r));
        break;
      case PathExpr::Kind::Star:
        out = d.star((*this)(p->l));
        break;
    }
    memo_.emplace(p.get(), out);
    keep_.push_back(p);
    return out;
  }

 private:
  Interpretation<D> interp_;
  std::unordered_map<const PathExpr*, V> memo_;
  std::unordered_map<EdgeId, V> edges_;
  std::vector<PathPtr> keep_;  // pins memo keys
};

template <PkaDomain D>
typename D::value_type interpret(const Interpretation<D>& interp, const PathPtr& p) {
  Interpreter<D> run(interp);
  return run(p);
}

/// Value of every vertex of `proc`: the interpretation of its path expression from the entry.
template <PkaDomain D>
std::map<VertexId, typename D::value_type> intraproc_analyze(const Program& prog, ProcId proc,
                                                             const Interpretation<D>& interp,
                                                             std::optional<std::vector<std::size_t>> order = std::nullopt) {
  for (EdgeId id : prog.procedures.at(proc).graph.edges)
    if (is_call(prog.edge(id).action) && !interp.edge_value)
      throw Error("call edge without a summary in intraprocedural analysis");
  auto paths = procedure_paths(prog, proc, std::move(order));
  Interpreter<D> run(interp);
  std::map<VertexId, typename D::value_type> out;
  for (const auto& [v, p] : paths) out.emplace(v, run(p));
  return out;
}

template <class D>
concept HashableDomain = PkaDomain<D> && requires(const D& d, const typename D::value_type& a) {
  { d.hash(a) } -> std::convertible_to<std::size_t>;
};

/// Join over all paths by exploring (vertex, path value) pairs. Only
/// terminates when finitely many path values exist; returns nothing once
/// `budget` distinct pairs have been seen.
template <HashableDomain D>
std::optional<std::map<VertexId, typename D::value_type>> join_over_paths_oracle(const Program& prog, ProcId proc,
                                                                                 const Interpretation<D>& interp,
                                                                                 std::size_t budget = 200000) {
  using V = typename D::value_type;
  const D& d = *interp.dom;
  const FlowGraph& g = prog.procedures.at(proc).graph;
  std::map<VertexId, std::vector<EdgeId>> out;
  for (EdgeId id : g.edges) out[prog.edge(id).src].push_back(id);
  std::map<EdgeId, V> sem;
  for (EdgeId id : g.edges) sem.emplace(id, interp.edge_value(id));

  std::map<VertexId, std::unordered_multimap<std::size_t, V>> seen;
  std::map<VertexId, V> result;
  for (VertexId v : g.vertices) result.emplace(v, d.zero());
  std::vector<std::pair<VertexId, V>> work;
  std::size_t count = 0;
  auto visit = [&](VertexId v, const V& a) {
    auto& bucket = seen[v];
    std::size_t h = d.hash(a);
    auto range = bucket.equal_range(h);
    for (auto it = range.first; it != range.second; ++it)
      if (d.equal(it->second, a)) return true;
    if (++count > budget) return false;
    bucket.emplace(h, a);
    result.at(v) = d.plus(result.at(v), a);
    work.push_back({v, a});
    return true;
  };
  if (!visit(g.entry, d.one())) return std::nullopt;
  while (!work.empty()) {
    auto [v, a] = work.back();
    work.pop_back();
    for (EdgeId id : out[v])
      if (!visit(prog.edge(id).tgt, d.times(a, sem.at(id)))) return std::nullopt;
  }
  return result;
}

struct SampledCheck {
  bool ok = true;
  std::size_t checked = 0;
  std::string counterexample;
};

/// Folds the semantics along random walks from the entry and checks that
/// each prefix value lies below the analysis result at its endpoint.
template <PkaDomain D>
SampledCheck check_correctness_sampled(const Program& prog, ProcId proc, const Interpretation<D>& interp,
                                       const std::map<VertexId, typename D::value_type>& analysis, std::size_t walks,
                                       std::size_t max_len, std::uint64_t seed) {
  using V = typename D::value_type;
  const D& d = *interp.dom;
  const FlowGraph& g = prog.procedures.at(proc).graph;
  std::map<VertexId, std::vector<EdgeId>> out;
  for (EdgeId id : g.edges) out[prog.edge(id).src].push_back(id);
  std::mt19937_64 rng(seed);
  SampledCheck res;
  for (std::size_t w = 0; w < walks; ++w) {
    VertexId v = g.entry;
    V a = d.one();
    std::string path;
    for (std::size_t step = 0;; ++step) {
      ++res.checked;
      if (!leq(d, a, analysis.at(v))) {
        res.ok = false;
        res.counterexample = "path [" + path + "] to v" + std::to_string(v) + " has value " + d.render(a);
        return res;
      }
      if (step == max_len || out[v].empty()) break;
      EdgeId e = out[v][std::uniform_int_distribution<std::size_t>(0, out[v].size() - 1)(rng)];
      a = d.times(a, interp.edge_value(e));
      path += (path.empty() ? "" : " ") + std::to_string(e);
      v = prog.edge(e).tgt;
    }
  }
  return res;
}

}  // namespace pka
