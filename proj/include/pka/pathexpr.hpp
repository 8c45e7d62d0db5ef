#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

#include "pka/lang/program.hpp"
#include "pka/regex.hpp"

namespace pka {

struct Arc {
  EdgeId id;
  std::size_t src;
  std::size_t tgt;
};

/// A directed multigraph on vertices 0..num_vertices-1 with labelled arcs.
struct Digraph {
  std::size_t num_vertices = 0;
  std::vector<Arc> arcs;
};

/// Depth-first postorder from `source`, followed by the unreachable vertices.
/// Eliminating in this order keeps inner loops nested inside outer ones.
inline std::vector<std::size_t> default_elimination_order(const Digraph& g, std::size_t source) {
  std::vector<std::vector<std::size_t>> succ(g.num_vertices);
  for (const Arc& a : g.arcs) succ[a.src].push_back(a.tgt);
  std::vector<char> seen(g.num_vertices, 0);
  std::vector<std::size_t> order;
  // iterative DFS keeping an explicit child cursor per frame
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  if (source < g.num_vertices) {
    stack.push_back({source, 0});
    seen[source] = 1;
  }
  while (!stack.empty()) {
    auto& [v, i] = stack.back();
    if (i < succ[v].size()) {
      std::size_t w = succ[v][i++];
      if (!seen[w]) {
        seen[w] = 1;
        stack.push_back({w, 0});
      }
    } else {
      order.push_back(v);
      stack.pop_back();
    }
  }
  for (std::size_t v = 0; v < g.num_vertices; ++v)
    if (!seen[v]) order.push_back(v);
  return order;
}

/// Kleene elimination. Entry (i, j) of the result denotes every nonempty path i -> j.
inline std::vector<std::vector<PathPtr>> solve_nonempty_paths(const Digraph& g, const std::vector<std::size_t>& order) {
  const std::size_t n = g.num_vertices;
  if (order.size() != n) throw Error("elimination order must list every vertex once");
  std::vector<std::vector<PathPtr>> a(n, std::vector<PathPtr>(n, regex::empty()));
  for (const Arc& arc : g.arcs) a[arc.src][arc.tgt] = regex::plus(a[arc.src][arc.tgt], regex::edge(arc.id));
  std::vector<char> done(n, 0);
  for (std::size_t k : order) {
    if (k >= n || done[k]) throw Error("elimination order must list every vertex once");
    done[k] = 1;
    PathPtr loop = regex::star(a[k][k]);
    for (std::size_t i = 0; i < n; ++i) {
      if (a[i][k]->kind == PathExpr::Kind::Empty) continue;
      PathPtr into = regex::times(a[i][k], loop);
      for (std::size_t j = 0; j < n; ++j) {
        if (a[k][j]->kind == PathExpr::Kind::Empty) continue;
        a[i][j] = regex::plus(a[i][j], regex::times(into, a[k][j]));
      }
    }
  }
  return a;
}

/// Path expressions from `source` to every vertex (the source itself includes the empty path).
inline std::vector<PathPtr> solve_single_source(const Digraph& g, std::size_t source,
                                                std::optional<std::vector<std::size_t>> order = std::nullopt) {
  auto ord = order ? *order : default_elimination_order(g, source);
  auto a = solve_nonempty_paths(g, ord);
  std::vector<PathPtr> out(g.num_vertices);
  for (std::size_t v = 0; v < g.num_vertices; ++v)
    out[v] = v == source ? regex::plus(regex::eps(), a[source][v]) : a[source][v];
  return out;
}

inline PathPtr solve_pairwise(const Digraph& g, std::size_t src, std::size_t tgt,
                              std::optional<std::vector<std::size_t>> order = std::nullopt) {
  return solve_single_source(g, src, std::move(order)).at(tgt);
}

/// The flow graph of one procedure with vertices renumbered densely.
struct ProcGraph {
  Digraph graph;
  std::vector<VertexId> vertex_of;
  std::map<VertexId, std::size_t> index;
  std::size_t entry = 0;
  std::size_t exit = 0;
};

inline ProcGraph proc_graph(const Program& prog, ProcId p) {
  const FlowGraph& fg = prog.procedures.at(p).graph;
  ProcGraph pg;
  pg.vertex_of = fg.vertices;
  for (std::size_t i = 0; i < fg.vertices.size(); ++i) pg.index[fg.vertices[i]] = i;
  pg.graph.num_vertices = fg.vertices.size();
  for (EdgeId id : fg.edges) {
    const Edge& e = prog.edge(id);
    pg.graph.arcs.push_back({id, pg.index.at(e.src), pg.index.at(e.tgt)});
  }
  pg.entry = pg.index.at(fg.entry);
  pg.exit = pg.index.at(fg.exit);
  return pg;
}

/// Path expressions from the entry of `p` to each of its vertices, keyed by vertex id.
inline std::map<VertexId, PathPtr> procedure_paths(const Program& prog, ProcId p,
                                                   std::optional<std::vector<std::size_t>> order = std::nullopt) {
  ProcGraph pg = proc_graph(prog, p);
  auto sol = solve_single_source(pg.graph, pg.entry, std::move(order));
  std::map<VertexId, PathPtr> out;
  for (std::size_t i = 0; i < sol.size(); ++i) out[pg.vertex_of[i]] = sol[i];
  return out;
}

}  // namespace pka
