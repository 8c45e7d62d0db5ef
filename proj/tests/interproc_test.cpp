#include <gtest/gtest.h>

#include "pka/analysis.hpp"
#include "pka/interproc.hpp"
#include "support/fixtures.hpp"
#include "support/random_programs.hpp"

using namespace pka;

namespace {

/// Relations whose quantifier forgets nothing, so callee locals leak into callers.
struct Unscoped : RelDomain {
  using RelDomain::RelDomain;
  RelValue exists(VarId, const RelValue& a) const { return a; }
};

const char* kScaled = R"(
proc main() {
  g := 4;
  p0 := 0;
  call foo;
}

proc foo() local x {
  x := p0;
  if (x < 2) {
    g := g - 1;
    p0 := x + 1;
    call foo;
  } else {
    assert(g > 0);
  }
}
)";

}  // namespace

TEST(CallGraphTest, OneArcPerCallerCalleePair) {
  Program prog = parse_program("proc main() { call f; call f; call g; } proc f() { call f; } proc g() { havoc y; }");
  CallGraph cg = call_graph(prog);
  EXPECT_EQ(cg.graph.num_vertices, 3u);
  ASSERT_EQ(cg.arcs.size(), 3u);
  ProcId f = *prog.find_proc("f");
  EXPECT_EQ(cg.arcs[0], std::make_pair(ProcId{0}, f));
  EXPECT_EQ(cg.arcs[2], std::make_pair(f, f));
}

TEST(Summaries, BottomIsNotInductiveForTerminatingProcedures) {
  Program prog = testkit::load_fixture("interproc.prog");
  LraDomain dom(prog.var_names);
  Interproc<LraDomain> ip(prog, dom);
  auto bad = ip.non_inductive(ip.bottom());
  ASSERT_EQ(bad.size(), 1u);
  EXPECT_EQ(prog.procedures[bad[0]].name, "foo");
  EXPECT_TRUE(ip.non_inductive(ip.fixpoint_widening().summaries()).empty());
}

TEST(Summaries, DropWideningFindsTheLinearRelation) {
  Program prog = testkit::load_fixture("interproc.prog");
  LraDomain::Config cfg;
  cfg.widening = Widening::Drop;
  LraDomain dom(prog.var_names, cfg);
  Interproc<LraDomain> ip(prog, dom);
  auto run = ip.fixpoint_widening();
  ASSERT_TRUE(run.converged);
  ProcId foo = *prog.find_proc("foo");
  EXPECT_TRUE(dom.entails(run.summaries()[foo], dom.parse("g - g' = p0' - p0")));
  auto res = analyze_program(prog, dom, SummaryMode::Widening);
  EXPECT_TRUE(res.all_safe());
}

TEST(Summaries, BudgetExhaustionNamesTheProcedure) {
  Program prog = testkit::load_fixture("interproc.prog");
  LraDomain dom(prog.var_names);
  try {
    analyze_program(prog, dom, SummaryMode::Widening, 1);
    FAIL() << "expected the budget to run out";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("foo"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("budget of 1"), std::string::npos) << e.what();
  }
}

TEST(Summaries, ScaledRecursionMatchesTheOracle) {
  Program prog = parse_program(kScaled);
  RelDomain dom(std::make_shared<RelSpace>(8, prog.var_names));
  auto res = analyze_program(prog, dom, SummaryMode::Lfp, 10000);
  auto oracle = coincidence_oracle(prog, dom);
  ASSERT_TRUE(oracle);
  for (const auto& [v, a] : res.values) EXPECT_TRUE(dom.equal(a, oracle->at(v))) << "v" << v;
  EXPECT_TRUE(res.all_safe());
  // the assertion is reached only with p0 = 2 and g = 2
  VertexId av = prog.assertions.at(0).vertex;
  VarId g = *prog.find_var("g"), p0 = *prog.find_var("p0");
  ASSERT_GT(res.values.at(av).count(), 0u);
  for (auto [from, to] : res.values.at(av).pairs()) {
    EXPECT_EQ(dom.space().get(to, g), 2u);
    EXPECT_EQ(dom.space().get(to, p0), 2u);
  }
}

TEST(Summaries, UnscopedLocalsConflateRecursiveFrames) {
  Program prog = testkit::load_fixture("bar.prog");
  RelDomain exact(std::make_shared<RelSpace>(2, prog.var_names));
  Unscoped leaky(std::make_shared<RelSpace>(2, prog.var_names));
  auto good = analyze_program(prog, exact, SummaryMode::Lfp, 1000);
  auto bad = analyze_program(prog, leaky, SummaryMode::Lfp, 1000);
  VertexId av = prog.assertions.at(0).vertex;
  EXPECT_FALSE(exact.equal(good.values.at(av), bad.values.at(av)));
  auto oracle = coincidence_oracle(prog, exact);
  ASSERT_TRUE(oracle);
  EXPECT_TRUE(exact.equal(good.values.at(av), oracle->at(av)));
}

TEST(StackSemantics, FlattenHidesPendingLocals) {
  Program prog = testkit::load_fixture("interproc.prog");
  LraDomain dom(prog.var_names);
  VarId x = *prog.find_var("x");
  // top first: a fresh frame over a pending one that wrote its own x
  ActivationStack<LraDomain> st{{{x}, dom.parse("g' = g - 1 /\\ p0' = p0 /\\ x' = x")},
                                {{x}, dom.parse("x' = 3 /\\ g' = g /\\ p0' = p0")}};
  // the pending frame's write to x is hidden
  auto flat = flatten(dom, st);
  EXPECT_TRUE(dom.equal(flat, dom.parse("g' = g - 1 /\\ p0' = p0 /\\ x' = x")));
  EXPECT_TRUE(dom.equal(flatten(dom, ActivationStack<LraDomain>{}), dom.one()));
}

TEST(StackSemantics, StepsFollowAConcreteRun) {
  Program prog = parse_program(kScaled);
  RelDomain dom(std::make_shared<RelSpace>(8, prog.var_names));
  std::mt19937_64 rng(2);
  Env init(prog.num_vars(), 0);
  RunResult r = concrete_run(prog, init, rng);
  ASSERT_EQ(r.status, RunResult::Status::Finished);
  auto sem = [&](EdgeId e) { return dom.action(prog.edge(e).action); };
  ActivationStack<RelDomain> st = initial_stack(prog, dom);
  std::size_t returns = 0;
  for (const TraceStep& step : r.trace) {
    st = stack_step(prog, dom, std::function<RelValue(EdgeId)>(sem), st, step);
    if (step.kind == TraceStep::Kind::Return) ++returns;
    Env seen = observed_env(prog, step.proc, step.env, init);
    EXPECT_TRUE(flatten(dom, st).test(dom.space().encode(init), dom.space().encode(seen)));
  }
  EXPECT_EQ(returns, 3u);
  EXPECT_EQ(st.size(), 1u);
}

TEST(StackSemantics, ReturnNeedsACaller) {
  Program prog = testkit::load_fixture("interproc.prog");
  LraDomain dom(prog.var_names);
  TraceStep ret;
  ret.kind = TraceStep::Kind::Return;
  std::function<lra::TransFormula(EdgeId)> sem = [&](EdgeId e) { return dom.action(prog.edge(e).action); };
  EXPECT_THROW(stack_step(prog, dom, sem, initial_stack(prog, dom), ret), Error);
  EXPECT_THROW(stack_step(prog, dom, sem, ActivationStack<LraDomain>{}, ret), Error);
}

TEST(Coincidence, RandomRecursiveProgramsOverRelations) {
  std::mt19937_64 rng(91);
  for (int i = 0; i < 8; ++i) {
    Program prog = testkit::random_interproc_program(rng, 3, 3);
    RelDomain dom(std::make_shared<RelSpace>(3, prog.var_names));
    auto res = analyze_program(prog, dom, SummaryMode::Lfp, 10000);
    auto oracle = coincidence_oracle(prog, dom);
    ASSERT_TRUE(oracle);
    for (const auto& [v, a] : res.values) EXPECT_TRUE(dom.equal(a, oracle->at(v))) << render_program(prog);
  }
}
