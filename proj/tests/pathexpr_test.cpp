#include <gtest/gtest.h>

#include <random>

#include "pka/pathexpr.hpp"
#include "support/fixtures.hpp"
#include "support/random_programs.hpp"

using namespace pka;

namespace {

/// Arc sequences of length <= max_len from `src`, grouped by endpoint.
std::vector<std::set<regex::Word>> bfs_paths(const Digraph& g, std::size_t src, std::size_t max_len) {
  std::vector<std::set<regex::Word>> out(g.num_vertices);
  std::vector<std::pair<std::size_t, regex::Word>> frontier{{src, regex::Word{}}};
  out[src].insert(regex::Word{});
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<std::pair<std::size_t, regex::Word>> next;
    for (const auto& [v, w] : frontier)
      for (const Arc& a : g.arcs)
        if (a.src == v) {
          regex::Word w2 = w;
          w2.push_back(a.id);
          out[a.tgt].insert(w2);
          next.emplace_back(a.tgt, std::move(w2));
        }
    frontier = std::move(next);
  }
  return out;
}

}  // namespace

TEST(SingleSource, SelfLoopAndChain) {
  Digraph g{3, {{0, 0, 1}, {1, 1, 1}, {2, 1, 2}}};
  auto sol = solve_single_source(g, 0);
  EXPECT_EQ(regex::render(sol[0]), "e");
  EXPECT_TRUE(regex::recognizes(sol[2], {0, 1, 1, 1, 2}));
  EXPECT_FALSE(regex::recognizes(sol[2], {0, 2, 1}));
}

TEST(SingleSource, UnreachableIsEmpty) {
  Digraph g{3, {{0, 1, 2}}};
  auto sol = solve_single_source(g, 0);
  EXPECT_EQ(sol[1]->kind, PathExpr::Kind::Empty);
  EXPECT_EQ(sol[2]->kind, PathExpr::Kind::Empty);
}

TEST(SingleSource, RejectsBadOrder) {
  Digraph g{2, {{0, 0, 1}}};
  EXPECT_THROW(solve_single_source(g, 0, std::vector<std::size_t>{0}), Error);
}

TEST(SingleSource, LanguageMatchesBreadthFirstPaths) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 60; ++i) {
    Digraph g = testkit::random_digraph(rng, 5, 7);
    auto expected = bfs_paths(g, 0, 5);
    auto sol = solve_single_source(g, 0);
    for (std::size_t v = 0; v < g.num_vertices; ++v) EXPECT_EQ(regex::enumerate_words(sol[v], 5), expected[v]);
  }
}

TEST(SingleSource, AnyOrderGivesTheSameLanguage) {
  std::mt19937_64 rng(18);
  for (int i = 0; i < 40; ++i) {
    Digraph g = testkit::random_digraph(rng, 5, 7);
    std::vector<std::size_t> order(g.num_vertices);
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::shuffle(order.begin(), order.end(), rng);
    auto a = solve_single_source(g, 0);
    auto b = solve_single_source(g, 0, order);
    for (std::size_t v = 0; v < g.num_vertices; ++v)
      EXPECT_EQ(regex::enumerate_words(a[v], 5), regex::enumerate_words(b[v], 5));
  }
}

TEST(DefaultOrder, IsAPermutation) {
  std::mt19937_64 rng(19);
  for (int i = 0; i < 50; ++i) {
    Digraph g = testkit::random_digraph(rng, 6, 8);
    auto order = default_elimination_order(g, 0);
    std::sort(order.begin(), order.end());
    for (std::size_t k = 0; k < order.size(); ++k) EXPECT_EQ(order[k], k);
    EXPECT_EQ(order.size(), g.num_vertices);
  }
}

TEST(Procedures, DivisionInnerLoopNestsInsideOuter) {
  Program prog = testkit::load_fixture("div.prog");
  auto paths = procedure_paths(prog, 0);
  VertexId exit = prog.procedures[0].graph.exit;
  // entry -> exit goes through both loops: r:=x, q:=0, outer star, exit test
  const PathPtr& p = paths.at(exit);
  EXPECT_TRUE(regex::recognizes(p, {0, 1, 9, 10}));
  EXPECT_TRUE(regex::recognizes(p, {0, 1, 2, 3, 4, 5, 6, 4, 5, 6, 7, 8, 9, 10}));
  EXPECT_FALSE(regex::recognizes(p, {0, 1, 2, 3, 7, 8}));
  EXPECT_EQ(paths.at(prog.procedures[0].graph.entry)->kind, PathExpr::Kind::Eps);
}

TEST(Procedures, PairwiseQuery) {
  Program prog = testkit::load_fixture("interproc.prog");
  ProcGraph pg = proc_graph(prog, 1);
  auto p = solve_pairwise(pg.graph, pg.entry, pg.exit);
  EXPECT_EQ(regex::enumerate_words(p, 10).size(), 2u);
}
