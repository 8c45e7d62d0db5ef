#pragma once

#include <set>
#include <string>
#include <vector>

#include "pka/lang/program.hpp"

namespace pka {

struct Diagnostic {
  std::string message;
};

namespace detail {
inline void exp_vars(const ExpPtr& e, std::set<VarId>& out) {
  if (!e) return;
  if (e->kind == Exp::Kind::Var) out.insert(e->var);
  exp_vars(e->lhs, out);
  exp_vars(e->rhs, out);
}
inline void bexp_vars(const BExpPtr& b, std::set<VarId>& out) {
  if (!b) return;
  exp_vars(b->l, out);
  exp_vars(b->r, out);
  bexp_vars(b->a, out);
  bexp_vars(b->b, out);
}
}  // namespace detail

/// Variables an action reads or writes.
inline std::set<VarId> action_vars(const Action& a) {
  std::set<VarId> out;
  if (auto* x = std::get_if<Assign>(&a)) {
    out.insert(x->var);
    detail::exp_vars(x->rhs, out);
  } else if (auto* g = std::get_if<Assume>(&a)) {
    detail::exp_vars(g->guard.lhs, out);
    detail::exp_vars(g->guard.rhs, out);
  } else if (auto* h = std::get_if<Havoc>(&a)) {
    out.insert(h->var);
  }
  return out;
}

inline std::set<VarId> bexp_vars(const BExpPtr& b) {
  std::set<VarId> out;
  detail::bexp_vars(b, out);
  return out;
}

/// Checks the structural invariants of a program. An empty result means valid.
inline std::vector<Diagnostic> validate_program(const Program& prog) {
  std::vector<Diagnostic> diags;
  auto report = [&](std::string m) { diags.push_back({std::move(m)}); };

  if (prog.procedures.empty()) {
    report("program has no procedures");
    return diags;
  }
  if (prog.procedures[0].name != "main") report("procedure 0 is not main");

  std::set<std::string> names;
  for (const auto& p : prog.procedures)
    if (!names.insert(p.name).second) report("duplicate procedure name '" + p.name + "'");

  std::vector<int> owner(prog.num_vertices, -1);
  for (ProcId i = 0; i < prog.procedures.size(); ++i) {
    for (VertexId v : prog.procedures[i].graph.vertices) {
      if (v >= prog.num_vertices) {
        report("vertex v" + std::to_string(v) + " out of range");
        continue;
      }
      if (owner[v] != -1) report("vertex v" + std::to_string(v) + " shared between procedures");
      owner[v] = static_cast<int>(i);
    }
  }

  std::set<VarId> globals(prog.globals.begin(), prog.globals.end());
  std::vector<int> local_owner(prog.num_vars(), -1);
  for (ProcId i = 0; i < prog.procedures.size(); ++i) {
    for (VarId x : prog.procedures[i].locals) {
      if (x >= prog.num_vars()) {
        report("local variable id out of range");
        continue;
      }
      if (globals.count(x)) report("variable '" + prog.var_names[x] + "' is both global and local");
      if (local_owner[x] != -1) report("locals not disjoint: '" + prog.var_names[x] + "'");
      local_owner[x] = static_cast<int>(i);
    }
  }

  std::set<EdgeId> edge_ids;
  for (ProcId i = 0; i < prog.procedures.size(); ++i) {
    const Procedure& p = prog.procedures[i];
    const FlowGraph& g = p.graph;
    std::set<VertexId> own(g.vertices.begin(), g.vertices.end());
    if (!own.count(g.entry)) report(p.name + ": entry is not a vertex of the procedure");
    if (!own.count(g.exit)) report(p.name + ": exit is not a vertex of the procedure");
    for (EdgeId id : g.edges) {
      if (id >= prog.edges.size()) {
        report(p.name + ": edge id out of range");
        continue;
      }
      if (!edge_ids.insert(id).second) report("edge e" + std::to_string(id) + " listed twice");
      const Edge& e = prog.edges[id];
      if (e.id != id) report("edge e" + std::to_string(id) + " has mismatched id");
      if (!own.count(e.src) || !own.count(e.tgt)) report(p.name + ": edge e" + std::to_string(id) + " leaves the procedure");
      if (e.tgt == g.entry && g.entry != g.exit) report(p.name + ": entry has incoming edge");
      if (e.src == g.exit) report(p.name + ": exit has outgoing edge");
      if (auto* c = std::get_if<Call>(&e.action)) {
        if (c->callee >= prog.procedures.size()) report(p.name + ": call to undeclared procedure");
      }
      for (VarId x : action_vars(e.action)) {
        if (x >= prog.num_vars()) {
          report(p.name + ": variable id out of range");
        } else if (!globals.count(x) && local_owner[x] != static_cast<int>(i)) {
          report(p.name + ": undeclared variable '" + prog.var_names[x] + "'");
        }
      }
    }
    // reachability from the entry
    std::set<VertexId> seen{g.entry};
    std::vector<VertexId> work{g.entry};
    while (!work.empty()) {
      VertexId v = work.back();
      work.pop_back();
      for (EdgeId id : g.edges) {
        if (id >= prog.edges.size()) continue;
        const Edge& e = prog.edges[id];
        if (e.src == v && seen.insert(e.tgt).second) work.push_back(e.tgt);
      }
    }
    for (VertexId v : g.vertices)
      if (!seen.count(v)) report(p.name + ": vertex v" + std::to_string(v) + " unreachable from entry");
  }
  for (const Edge& e : prog.edges)
    if (!edge_ids.count(e.id)) report("edge e" + std::to_string(e.id) + " belongs to no procedure");
  return diags;
}

}  // namespace pka
