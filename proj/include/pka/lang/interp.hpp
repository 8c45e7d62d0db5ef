#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "pka/lang/program.hpp"

namespace pka {

using Env = std::vector<std::int64_t>;

/// Integer evaluation with overflow and division-by-zero detection.
inline std::optional<std::int64_t> eval_exp(const ExpPtr& e, const Env& env) {
  switch (e->kind) {
    case Exp::Kind::Int:
      return e->value;
    case Exp::Kind::Var:
      return env.at(e->var);
    case Exp::Kind::Bin: {
      auto l = eval_exp(e->lhs, env);
      if (!l) return std::nullopt;
      auto r = eval_exp(e->rhs, env);
      if (!r) return std::nullopt;
      std::int64_t out = 0;
      switch (e->op) {
        case BinOp::Add:
          if (__builtin_add_overflow(*l, *r, &out)) return std::nullopt;
          return out;
        case BinOp::Sub:
          if (__builtin_sub_overflow(*l, *r, &out)) return std::nullopt;
          return out;
        case BinOp::Mul:
          if (__builtin_mul_overflow(*l, *r, &out)) return std::nullopt;
          return out;
        case BinOp::Div:
          if (*r == 0 || (*l == INT64_MIN && *r == -1)) return std::nullopt;
          return *l / *r;
      }
    }
  }
  return std::nullopt;
}

inline std::optional<bool> eval_guard(const Guard& g, const Env& env) {
  auto l = eval_exp(g.lhs, env);
  auto r = eval_exp(g.rhs, env);
  if (!l || !r) return std::nullopt;
  return *l >= *r;
}

inline std::optional<bool> eval_bexp(const BExpPtr& b, const Env& env) {
  switch (b->kind) {
    case BExp::Kind::Cmp: {
      auto l = eval_exp(b->l, env);
      auto r = eval_exp(b->r, env);
      if (!l || !r) return std::nullopt;
      switch (b->cmp) {
        case CmpOp::Lt: return *l < *r;
        case CmpOp::Le: return *l <= *r;
        case CmpOp::Gt: return *l > *r;
        case CmpOp::Ge: return *l >= *r;
        case CmpOp::Eq: return *l == *r;
        case CmpOp::Ne: return *l != *r;
      }
      return std::nullopt;
    }
    case BExp::Kind::And: {
      auto a = eval_bexp(b->a, env);
      auto c = eval_bexp(b->b, env);
      if (!a || !c) return std::nullopt;
      return *a && *c;
    }
    case BExp::Kind::Or: {
      auto a = eval_bexp(b->a, env);
      auto c = eval_bexp(b->b, env);
      if (!a || !c) return std::nullopt;
      return *a || *c;
    }
    case BExp::Kind::Not: {
      auto a = eval_bexp(b->a, env);
      if (!a) return std::nullopt;
      return !*a;
    }
  }
  return std::nullopt;
}

struct TraceStep {
  enum class Kind { Edge, Return } kind = Kind::Edge;
  EdgeId edge = 0;  // the traversed edge, or the call edge being returned from
  VertexId vertex = 0;  // vertex reached
  ProcId proc = 0;  // procedure owning `vertex`
  Env env;  // full environment after the step
};

struct RunResult {
  enum class Status { Finished, Stuck, OutOfFuel } status = Status::Finished;
  Env initial;
  std::vector<TraceStep> trace;
};

struct RunOptions {
  std::size_t fuel = 2000;
  std::int64_t havoc_range = 10;
};

/// Random walk through the program from main's entry. A callee's locals start
/// from their values in `initial` and the caller's values are restored on
/// return.
template <class Rng>
RunResult concrete_run(const Program& prog, const Env& initial, Rng& rng, RunOptions opts = {}) {
  RunResult res;
  res.initial = initial;
  Env env = initial;
  struct Frame {
    ProcId proc;
    EdgeId call_edge;
    std::vector<std::int64_t> saved;
  };
  std::vector<Frame> frames{{0, 0, {}}};
  VertexId cur = prog.procedures[0].graph.entry;

  std::vector<std::vector<EdgeId>> out(prog.num_vertices);
  for (const Edge& e : prog.edges) out[e.src].push_back(e.id);

  for (std::size_t step = 0;; ++step) {
    const Procedure& p = prog.procedures[frames.back().proc];
    if (cur == p.graph.exit && out[cur].empty()) {
      if (frames.size() == 1) {
        res.status = RunResult::Status::Finished;
        return res;
      }
    }
    if (step >= opts.fuel) {
      res.status = RunResult::Status::OutOfFuel;
      return res;
    }
    if (cur == p.graph.exit && frames.size() > 1) {
      Frame f = frames.back();
      frames.pop_back();
      for (std::size_t i = 0; i < p.locals.size(); ++i) env[p.locals[i]] = f.saved[i];
      cur = prog.edge(f.call_edge).tgt;
      res.trace.push_back({TraceStep::Kind::Return, f.call_edge, cur, frames.back().proc, env});
      continue;
    }
    const auto& choices = out[cur];
    if (choices.empty()) {
      res.status = RunResult::Status::Stuck;
      return res;
    }
    // Edges whose guard is false are not enabled.
    std::vector<EdgeId> enabled;
    for (EdgeId id : choices) {
      const Edge& e = prog.edge(id);
      if (auto* a = std::get_if<Assume>(&e.action)) {
        auto v = eval_guard(a->guard, env);
        if (!v) {
          res.status = RunResult::Status::Stuck;
          return res;
        }
        if (!*v) continue;
      }
      enabled.push_back(id);
    }
    if (enabled.empty()) {
      res.status = RunResult::Status::Stuck;
      return res;
    }
    std::uniform_int_distribution<std::size_t> pick(0, enabled.size() - 1);
    const Edge& e = prog.edge(enabled[pick(rng)]);
    if (auto* a = std::get_if<Assign>(&e.action)) {
      auto v = eval_exp(a->rhs, env);
      if (!v) {
        res.status = RunResult::Status::Stuck;
        return res;
      }
      env[a->var] = *v;
      cur = e.tgt;
    } else if (auto* h = std::get_if<Havoc>(&e.action)) {
      std::uniform_int_distribution<std::int64_t> val(-opts.havoc_range, opts.havoc_range);
      env[h->var] = val(rng);
      cur = e.tgt;
    } else if (auto* c = std::get_if<Call>(&e.action)) {
      const Procedure& q = prog.procedures[c->callee];
      Frame f{c->callee, e.id, {}};
      for (VarId x : q.locals) {
        f.saved.push_back(env[x]);
        env[x] = initial[x];
      }
      frames.push_back(std::move(f));
      cur = q.graph.entry;
    } else {
      cur = e.tgt;
    }
    res.trace.push_back({TraceStep::Kind::Edge, e.id, cur, frames.back().proc, env});
  }
}

/// The environment as seen from procedure `proc`: globals and the locals of
/// `proc` from `env`, every other local from `initial`.
inline Env observed_env(const Program& prog, ProcId proc, const Env& env, const Env& initial) {
  Env out = initial;
  for (VarId g : prog.globals) out[g] = env[g];
  for (VarId x : prog.procedures[proc].locals) out[x] = env[x];
  return out;
}

}  // namespace pka
