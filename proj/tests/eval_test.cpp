#include <gtest/gtest.h>

#include "pka/eval.hpp"
#include "pka/lradom.hpp"
#include "pka/reldom.hpp"
#include "support/fixtures.hpp"
#include "support/random_programs.hpp"

using namespace pka;

namespace {

/// Counts how often each edge is interpreted.
struct CountingBool {
  using value_type = bool;
  bool zero() const { return false; }
  bool one() const { return true; }
  bool plus(bool a, bool b) const { return a || b; }
  bool times(bool a, bool b) const { return a && b; }
  bool star(bool) const { return true; }
  bool equal(bool a, bool b) const { return a == b; }
  std::string render(bool a) const { return a ? "1" : "0"; }
};

}  // namespace

TEST(Interpret, FollowsTheExpressionShape) {
  RelDomain d(std::make_shared<RelSpace>(3, std::vector<std::string>{"x"}));
  RelValue inc = d.assign(0, Exp::binary(BinOp::Add, Exp::variable(0), Exp::integer(1)));
  RelValue reset = d.assign(0, Exp::integer(0));
  Interpretation<RelDomain> interp{&d, [&](EdgeId e) { return e == 0 ? inc : reset; }};
  PathPtr p = regex::times(regex::edge(1), regex::star(regex::edge(0)));
  EXPECT_TRUE(d.equal(interpret(interp, p), d.times(reset, d.star(inc))));
  EXPECT_TRUE(d.equal(interpret(interp, regex::empty()), d.zero()));
  EXPECT_TRUE(d.equal(interpret(interp, regex::eps()), d.one()));
}

TEST(Interpret, EachEdgeIsEvaluatedOnce) {
  CountingBool d;
  std::map<EdgeId, int> calls;
  Interpretation<CountingBool> interp{&d, [&](EdgeId e) {
                                        ++calls[e];
                                        return true;
                                      }};
  PathPtr a = regex::edge(0);
  PathPtr p = regex::plus(regex::times(a, regex::edge(1)), regex::times(regex::edge(0), regex::star(regex::edge(1))));
  Interpreter<CountingBool> run(interp);
  EXPECT_TRUE(run(p));
  EXPECT_EQ(calls[0], 1);
  EXPECT_EQ(calls[1], 1);
}

TEST(Intraproc, DivisionOverRelationsMatchesJoinOverPaths) {
  Program prog = testkit::load_fixture("div.prog");
  RelDomain dom(std::make_shared<RelSpace>(4, prog.var_names));
  auto interp = action_interpretation(prog, dom);
  auto analysis = intraproc_analyze(prog, 0, interp);
  auto oracle = join_over_paths_oracle(prog, 0, interp);
  ASSERT_TRUE(oracle);
  for (const auto& [v, a] : analysis) EXPECT_TRUE(dom.equal(a, oracle->at(v))) << "v" << v;
}

TEST(Intraproc, RandomProgramsMatchJoinOverPaths) {
  std::mt19937_64 rng(71);
  for (int i = 0; i < 20; ++i) {
    Program prog = testkit::random_program(rng, testkit::uniform(rng, 1, 2));
    RelDomain dom(std::make_shared<RelSpace>(3, prog.var_names));
    auto interp = action_interpretation(prog, dom);
    auto a = intraproc_analyze(prog, 0, interp);
    auto o = join_over_paths_oracle(prog, 0, interp);
    ASSERT_TRUE(o);
    for (const auto& [v, val] : a) EXPECT_TRUE(dom.equal(val, o->at(v)));
  }
}

TEST(Intraproc, OracleGivesUpOnInfiniteDomains) {
  Program prog = testkit::load_fixture("div.prog");
  struct Hashed : LraDomain {
    using LraDomain::LraDomain;
    std::size_t hash(const lra::TransFormula& f) const { return f.cubes.size(); }
  } hd(prog.var_names);
  auto interp = action_interpretation(prog, static_cast<const Hashed&>(hd));
  EXPECT_FALSE(join_over_paths_oracle(prog, 0, interp, 200));
}

TEST(Intraproc, SampledWalksStayBelowTheAnalysis) {
  Program prog = testkit::load_fixture("div.prog");
  LraDomain dom(prog.var_names);
  auto interp = action_interpretation(prog, dom);
  auto analysis = intraproc_analyze(prog, 0, interp);
  SampledCheck res = check_correctness_sampled(prog, 0, interp, analysis, 30, 25, 9);
  EXPECT_TRUE(res.ok) << res.counterexample;
  EXPECT_GT(res.checked, 30u);
}

TEST(Intraproc, SampledCheckReportsAViolation) {
  Program prog = testkit::load_fixture("div.prog");
  LraDomain dom(prog.var_names);
  auto interp = action_interpretation(prog, dom);
  auto analysis = intraproc_analyze(prog, 0, interp);
  for (auto& [v, a] : analysis)
    if (v != prog.procedures[0].graph.entry) a = dom.zero();
  SampledCheck res = check_correctness_sampled(prog, 0, interp, analysis, 5, 10, 1);
  EXPECT_FALSE(res.ok);
  EXPECT_NE(res.counterexample.find("path ["), std::string::npos);
}

TEST(Intraproc, CallEdgesNeedSummaries) {
  Program prog = testkit::load_fixture("interproc.prog");
  LraDomain dom(prog.var_names);
  Interpretation<LraDomain> interp{&dom, nullptr};
  EXPECT_THROW(intraproc_analyze(prog, 0, interp), Error);
}
