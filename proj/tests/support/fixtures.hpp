#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "pka/eval.hpp"
#include "pka/lang/parser.hpp"
#include "pka/lang/print.hpp"
#include "pka/pathexpr.hpp"

namespace pka::testkit {

inline Program load_fixture(const std::string& name) {
  std::ifstream in(std::string(PKA_PROGRAMS_DIR) + "/" + name);
  if (!in) throw Error("missing fixture " + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_program(ss.str());
}

/// Target of the first assignment `var := rhs` whose right-hand side renders as `rhs_text`.
inline VertexId target_of_assignment(const Program& prog, const std::string& var, const std::string& rhs_text) {
  for (const Edge& e : prog.edges)
    if (auto* a = std::get_if<Assign>(&e.action))
      if (prog.var_names[a->var] == var && render_exp(prog, a->rhs) == rhs_text) return e.tgt;
  throw Error("no assignment " + var + " := " + rhs_text);
}

/// Paths that leave `head` and return to it exactly once, avoiding `avoid`:
/// the head is split into a source copy and a sink copy.
inline PathPtr one_iteration(const Program& prog, ProcId p, VertexId head, const std::vector<VertexId>& avoid = {}) {
  ProcGraph pg = proc_graph(prog, p);
  Digraph g;
  g.num_vertices = pg.graph.num_vertices + 1;
  std::size_t h = pg.index.at(head), sink = pg.graph.num_vertices;
  auto banned = [&](std::size_t v) {
    for (VertexId a : avoid)
      if (pg.index.at(a) == v) return true;
    return false;
  };
  for (Arc a : pg.graph.arcs) {
    if (banned(a.src) || banned(a.tgt)) continue;
    if (a.tgt == h) a.tgt = sink;
    g.arcs.push_back(a);
  }
  return solve_single_source(g, h).at(sink);
}

}  // namespace pka::testkit
