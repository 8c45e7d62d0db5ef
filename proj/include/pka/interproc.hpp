#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "pka/algebra.hpp"
#include "pka/eval.hpp"
#include "pka/lang/interp.hpp"
#include "pka/lang/program.hpp"
#include "pka/pathexpr.hpp"
#include "pka/reldom.hpp"

namespace pka {

/// Procedures as vertices, one arc per (caller, callee) pair.
struct CallGraph {
  Digraph graph;
  std::vector<std::pair<ProcId, ProcId>> arcs;  // arc id -> (caller, callee)
};

inline CallGraph call_graph(const Program& prog) {
  CallGraph cg;
  cg.graph.num_vertices = prog.procedures.size();
  std::map<std::pair<ProcId, ProcId>, std::size_t> seen;
  for (ProcId i = 0; i < prog.procedures.size(); ++i)
    for (EdgeId id : prog.procedures[i].graph.edges)
      if (auto* c = std::get_if<Call>(&prog.edge(id).action)) {
        auto key = std::make_pair(i, c->callee);
        if (seen.count(key)) continue;
        seen[key] = cg.arcs.size();
        cg.graph.arcs.push_back({cg.arcs.size(), i, c->callee});
        cg.arcs.push_back(key);
      }
  return cg;
}

template <QuantifiedDomain D>
struct SummaryRun {
  std::vector<std::vector<typename D::value_type>> rounds;  // rounds[0] is all zero
  bool converged = false;
  std::vector<ProcId> unstable;  // procedures still changing when the budget ran out
  const std::vector<typename D::value_type>& summaries() const { return rounds.back(); }
};

/// Summaries, call-edge values and vertex values of the interprocedural analysis.
template <QuantifiedDomain D>
class Interproc {
 public:
  using V = typename D::value_type;
  using Summaries = std::vector<V>;

  Interproc(const Program& prog, const D& dom) : prog_(prog), dom_(dom) {
    for (ProcId p = 0; p < prog.procedures.size(); ++p) paths_.push_back(procedure_paths(prog, p));
  }

  const D& domain() const { return dom_; }
  const Program& program() const { return prog_; }
  const PathPtr& path(ProcId p, VertexId v) const { return paths_.at(p).at(v); }

  V edge_action(EdgeId e) const {
    auto it = actions_.find(e);
    if (it != actions_.end()) return it->second;
    return actions_.emplace(e, dom_.action(prog_.edge(e).action)).first->second;
  }

  /// Calls are interpreted by the callee's summary.
  Interpretation<D> interpretation(const Summaries& s) const {
    return {&dom_, [this, s](EdgeId e) {
              if (auto* c = std::get_if<Call>(&prog_.edge(e).action)) return s.at(c->callee);
              return edge_action(e);
            }};
  }

  Summaries bottom() const { return Summaries(prog_.procedures.size(), dom_.zero()); }

  /// exists LV_i. I(S)[entry_i -> exit_i] for every procedure i.
  Summaries bodies(const Summaries& s) const {
    Interpreter<D> run(interpretation(s));
    Summaries out;
    for (ProcId i = 0; i < prog_.procedures.size(); ++i) {
      const Procedure& p = prog_.procedures[i];
      out.push_back(exists_all(dom_, p.locals, run(paths_[i].at(p.graph.exit))));
    }
    return out;
  }

  /// S_n = S_{n-1} widened with the bodies under S_{n-1}, until S_n = S_{n-1}.
  SummaryRun<D> fixpoint_widening(std::size_t budget = 200) const {
    return iterate(budget, [this](const V& prev, const V& body) { return dom_.widen(prev, body); });
  }

  /// Kleene iteration from bottom; exact for finite domains.
  SummaryRun<D> fixpoint_lfp(std::size_t budget = 10000) const {
    return iterate(budget, [](const V&, const V& body) { return body; });
  }

  /// Procedures i with S(i) not above exists LV_i. I(S)[entry_i -> exit_i].
  std::vector<ProcId> non_inductive(const Summaries& s) const {
    Summaries body = bodies(s);
    std::vector<ProcId> out;
    for (ProcId i = 0; i < s.size(); ++i)
      if (!leq(dom_, body[i], s[i])) out.push_back(i);
    return out;
  }

  /// exists LV_i. sum over call sites e of j in i of I(S)[entry_i -> src(e)].
  V call_edge_value(const Summaries& s, ProcId i, ProcId j) const {
    Interpreter<D> run(interpretation(s));
    return call_edge_value(run, i, j);
  }

  /// Value of each vertex: the call-graph path to its procedure followed by
  /// the intraprocedural path to the vertex.
  std::map<VertexId, V> path_to(const Summaries& s) const {
    Interpreter<D> run(interpretation(s));
    CallGraph cg = call_graph(prog_);
    std::vector<V> arc_values;
    for (auto [i, j] : cg.arcs) arc_values.push_back(call_edge_value(run, i, j));
    auto cg_paths = solve_single_source(cg.graph, 0);
    Interpretation<D> cg_interp{&dom_, [&arc_values](EdgeId a) { return arc_values.at(a); }};
    Interpreter<D> cg_run(cg_interp);
    std::map<VertexId, V> out;
    for (ProcId k = 0; k < prog_.procedures.size(); ++k) {
      V at_entry = cg_run(cg_paths[k]);
      const FlowGraph& g = prog_.procedures[k].graph;
      for (VertexId v : g.vertices) {
        if (v == g.entry) out.emplace(v, at_entry);
        else out.emplace(v, dom_.times(at_entry, run(paths_[k].at(v))));
      }
    }
    return out;
  }

 private:
  const Program& prog_;
  const D& dom_;
  std::vector<std::map<VertexId, PathPtr>> paths_;
  mutable std::unordered_map<EdgeId, V> actions_;

  template <class Step>
  SummaryRun<D> iterate(std::size_t budget, Step step) const {
    SummaryRun<D> run;
    run.rounds.push_back(bottom());
    for (std::size_t n = 1; n <= budget; ++n) {
      const Summaries& prev = run.rounds.back();
      Summaries body = bodies(prev);
      Summaries next;
      std::vector<ProcId> changed;
      for (ProcId i = 0; i < prev.size(); ++i) {
        next.push_back(step(prev[i], body[i]));
        if (!dom_.equal(prev[i], next.back())) changed.push_back(i);
      }
      if (changed.empty()) {
        for (ProcId i = 0; i < prev.size(); ++i)
          if (!leq(dom_, body[i], prev[i]))
            throw Error("summary of " + prog_.procedures[i].name + " is not inductive");
        run.converged = true;
        return run;
      }
      run.unstable = std::move(changed);
      run.rounds.push_back(std::move(next));
    }
    return run;
  }

  V call_edge_value(Interpreter<D>& run, ProcId i, ProcId j) const {
    V acc = dom_.zero();
    for (EdgeId id : prog_.procedures[i].graph.edges) {
      const Edge& e = prog_.edge(id);
      auto* c = std::get_if<Call>(&e.action);
      if (c && c->callee == j) acc = dom_.plus(acc, run(paths_[i].at(e.src)));
    }
    return exists_all(dom_, prog_.procedures[i].locals, acc);
  }
};

// ---------------------------------------------------------------------------
// Stack semantics
// ---------------------------------------------------------------------------

template <QuantifiedDomain D>
struct StackRecord {
  std::vector<VarId> vars;
  typename D::value_type value;
};

/// Activation records, top first.
template <QuantifiedDomain D>
using ActivationStack = std::vector<StackRecord<D>>;

template <QuantifiedDomain D>
ActivationStack<D> initial_stack(const Program& prog, const D& dom) {
  return {{prog.procedures[0].locals, dom.one()}};
}

/// Calls push a fresh record, returns fold the popped record into its caller,
/// other edges extend the top record.
template <QuantifiedDomain D>
ActivationStack<D> stack_step(const Program& prog, const D& dom, const std::function<typename D::value_type(EdgeId)>& sem,
                              ActivationStack<D> stack, const TraceStep& step) {
  if (stack.empty()) throw Error("stack_step on an empty stack");
  if (step.kind == TraceStep::Kind::Return) {
    if (stack.size() < 2) throw Error("return with a single activation record");
    StackRecord<D> top = std::move(stack.front());
    stack.erase(stack.begin());
    stack.front().value = dom.times(stack.front().value, exists_all(dom, top.vars, top.value));
    return stack;
  }
  const Edge& e = prog.edge(step.edge);
  if (auto* c = std::get_if<Call>(&e.action)) {
    stack.insert(stack.begin(), StackRecord<D>{prog.procedures[c->callee].locals, dom.one()});
    return stack;
  }
  stack.front().value = dom.times(stack.front().value, sem(step.edge));
  return stack;
}

/// (exists V_n. a_n) ... (exists V_2. a_2) a_1 for a stack a_1 (top) ... a_n.
template <QuantifiedDomain D>
typename D::value_type flatten(const D& dom, const ActivationStack<D>& stack) {
  if (stack.empty()) return dom.one();
  typename D::value_type acc = dom.one();
  for (std::size_t i = stack.size(); i-- > 1;) acc = dom.times(acc, exists_all(dom, stack[i].vars, stack[i].value));
  return dom.times(acc, stack.front().value);
}

// ---------------------------------------------------------------------------
// Explicit-state reference for the relational domain
// ---------------------------------------------------------------------------

/// Pairs (initial state, state at v) over every interprocedural path to v,
/// under the stack semantics: calls that have returned are summarised with
/// the callee's locals hidden, and each pending frame's locals are hidden
/// when the next frame is pushed. Computed by explicit state exploration,
/// independently of path expressions. Nothing if `budget` states are exceeded.
inline std::optional<std::map<VertexId, RelValue>> coincidence_oracle(const Program& prog, const RelDomain& dom,
                                                                      std::size_t budget = 5000000) {
  const RelSpace& sp = dom.space();
  const std::size_t N = sp.num_states;
  const std::size_t P = prog.procedures.size();
  const std::size_t NV = prog.num_vertices;

  std::vector<std::vector<std::vector<std::uint32_t>>> succ(prog.edges.size());
  for (const Edge& e : prog.edges) {
    if (is_call(e.action)) continue;
    RelValue r = dom.action(e.action);
    succ[e.id].resize(N);
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j)
        if (r.test(i, j)) succ[e.id][i].push_back(static_cast<std::uint32_t>(j));
  }
  std::vector<std::vector<EdgeId>> out(NV);
  for (const Edge& e : prog.edges) out[e.src].push_back(e.id);

  // every state agreeing with `s` outside `vars`
  auto havoc = [&](std::size_t s, const std::vector<VarId>& vars) {
    std::vector<std::size_t> states{s};
    for (VarId x : vars) {
      std::vector<std::size_t> next;
      for (std::size_t t : states)
        for (std::size_t n = 0; n < sp.modulus; ++n) next.push_back(sp.set(t, x, n));
      states = std::move(next);
    }
    return states;
  };
  auto restore = [&](std::size_t s, const std::vector<VarId>& vars, std::size_t from) {
    for (VarId x : vars) s = sp.set(s, x, sp.get(from, x));
    return s;
  };

  // Same-level summaries: from (entry_j, eps) to (exit_j, rho).
  std::size_t count = 0;
  std::vector<std::vector<std::vector<std::uint32_t>>> exits(P, std::vector<std::vector<std::uint32_t>>(N));
  struct Caller {
    ProcId proc;
    std::uint32_t ctx;
    VertexId ret;
    std::uint32_t state;
  };
  std::vector<std::vector<std::vector<Caller>>> callers(P, std::vector<std::vector<Caller>>(N));
  std::unordered_set<std::uint64_t> seen;
  std::vector<std::array<std::uint64_t, 4>> work;
  auto key = [&](std::uint64_t k, std::uint64_t ctx, std::uint64_t v, std::uint64_t s) {
    return ((k * N + ctx) * NV + v) * N + s;
  };
  bool over = false;
  auto add = [&](std::size_t k, std::size_t ctx, VertexId v, std::size_t s) {
    if (seen.insert(key(k, ctx, v, s)).second) {
      if (++count > budget) over = true;
      work.push_back({k, ctx, v, s});
    }
  };
  for (ProcId j = 0; j < P; ++j)
    for (std::size_t e = 0; e < N; ++e) add(j, e, prog.procedures[j].graph.entry, e);
  while (!work.empty() && !over) {
    auto [k, ctx, v, s] = work.back();
    work.pop_back();
    const Procedure& pk = prog.procedures[k];
    if (v == pk.graph.exit) {
      auto& ex = exits[k][ctx];
      if (std::find(ex.begin(), ex.end(), s) == ex.end()) {
        ex.push_back(static_cast<std::uint32_t>(s));
        for (const Caller& c : callers[k][ctx]) add(c.proc, c.ctx, c.ret, restore(s, pk.locals, c.state));
      }
    }
    for (EdgeId id : out[v]) {
      const Edge& e = prog.edge(id);
      if (auto* c = std::get_if<Call>(&e.action)) {
        const Procedure& pj = prog.procedures[c->callee];
        for (std::size_t ctx2 : havoc(s, pj.locals)) {
          callers[c->callee][ctx2].push_back(
              {static_cast<ProcId>(k), static_cast<std::uint32_t>(ctx), e.tgt, static_cast<std::uint32_t>(s)});
          for (std::uint32_t x : exits[c->callee][ctx2]) add(k, ctx, e.tgt, restore(x, pj.locals, s));
        }
      } else {
        for (std::uint32_t t : succ[id][s]) add(k, ctx, e.tgt, t);
      }
    }
  }
  if (over) return std::nullopt;

  // Interprocedural paths: the last frame is active; each earlier frame is a
  // pending caller whose locals were hidden on entry and are put back when it
  // descends into its callee.
  auto locals_code = [&](ProcId k, std::size_t s) {
    std::size_t code = 0;
    for (VarId x : prog.procedures[k].locals) code = code * sp.modulus + sp.get(s, x);
    return code;
  };
  auto apply_code = [&](ProcId k, std::size_t s, std::size_t code) {
    const auto& ls = prog.procedures[k].locals;
    for (std::size_t i = ls.size(); i-- > 0;) {
      s = sp.set(s, ls[i], code % sp.modulus);
      code /= sp.modulus;
    }
    return s;
  };
  std::size_t max_code = 1;
  for (const auto& p : prog.procedures) {
    std::size_t c = 1;
    for (std::size_t i = 0; i < p.locals.size(); ++i) c *= sp.modulus;
    max_code = std::max(max_code, c);
  }
  std::map<VertexId, RelValue> result;
  for (VertexId v = 0; v < NV; ++v) result.emplace(v, dom.zero());
  std::unordered_set<std::uint64_t> seen2;
  struct Item {
    ProcId k;
    VertexId v;
    std::uint32_t init, saved, state;
    bool pending;
  };
  std::vector<Item> work2;
  auto add2 = [&](ProcId k, VertexId v, std::size_t init, std::size_t saved, std::size_t state, bool pending) {
    std::uint64_t h = (((static_cast<std::uint64_t>(v) * N + init) * max_code + saved) * N + state) * 2 + pending;
    if (seen2.insert(h).second) {
      if (++count > budget) over = true;
      work2.push_back({k, v, static_cast<std::uint32_t>(init), static_cast<std::uint32_t>(saved),
                       static_cast<std::uint32_t>(state), pending});
    }
  };
  auto enter = [&](ProcId j, std::size_t init, std::size_t at) {
    const Procedure& pj = prog.procedures[j];
    add2(j, pj.graph.entry, init, 0, at, false);
    for (std::size_t h : havoc(at, pj.locals)) add2(j, pj.graph.entry, init, locals_code(j, at), h, true);
  };
  for (std::size_t r0 = 0; r0 < N; ++r0) enter(0, r0, r0);
  while (!work2.empty() && !over) {
    Item it = work2.back();
    work2.pop_back();
    if (!it.pending) result.at(it.v).set(it.init, it.state);
    for (EdgeId id : out[it.v]) {
      const Edge& e = prog.edge(id);
      if (auto* c = std::get_if<Call>(&e.action)) {
        const Procedure& pj = prog.procedures[c->callee];
        for (std::size_t ctx2 : havoc(it.state, pj.locals))
          for (std::uint32_t x : exits[c->callee][ctx2])
            add2(it.k, e.tgt, it.init, it.saved, restore(x, pj.locals, it.state), it.pending);
        if (it.pending) enter(c->callee, it.init, apply_code(it.k, it.state, it.saved));
      } else {
        for (std::uint32_t t : succ[id][it.state]) add2(it.k, e.tgt, it.init, it.saved, t, it.pending);
      }
    }
  }
  if (over) return std::nullopt;
  return result;
}

}  // namespace pka
