#include <gtest/gtest.h>

#include <random>

#include "pka/lang/cond.hpp"
#include "pka/lang/interp.hpp"
#include "pka/lang/parser.hpp"
#include "pka/lang/print.hpp"
#include "pka/lang/validate.hpp"
#include "support/fixtures.hpp"
#include "support/random_programs.hpp"

using namespace pka;

namespace {

std::size_t count_kind(const Program& prog, ProcId p, std::size_t index) {
  std::size_t n = 0;
  for (EdgeId e : prog.procedures[p].graph.edges) n += prog.edge(e).action.index() == index;
  return n;
}

}  // namespace

TEST(Parser, DivisionProgramShape) {
  Program prog = testkit::load_fixture("div.prog");
  ASSERT_EQ(prog.procedures.size(), 1u);
  EXPECT_EQ(prog.procedures[0].graph.edges.size(), 11u);
  EXPECT_EQ(prog.procedures[0].graph.vertices.size(), 10u);
  EXPECT_EQ(prog.num_vars(), 5u);
  ASSERT_EQ(prog.assertions.size(), 1u);
  EXPECT_EQ(prog.assertions[0].text, "x == q * y + r");
  EXPECT_TRUE(validate_program(prog).empty());
}

TEST(Parser, InterprocProgramShape) {
  Program prog = testkit::load_fixture("interproc.prog");
  ASSERT_EQ(prog.procedures.size(), 2u);
  EXPECT_EQ(prog.procedures[0].name, "main");
  EXPECT_EQ(prog.procedures[0].graph.edges.size(), 3u);
  EXPECT_EQ(prog.procedures[1].graph.edges.size(), 7u);
  ASSERT_EQ(prog.procedures[1].locals.size(), 1u);
  EXPECT_EQ(prog.var_names[prog.procedures[1].locals[0]], "x");
  EXPECT_EQ(prog.globals.size(), 2u);
  EXPECT_EQ(count_kind(prog, 1, 3), 1u);  // one call edge in foo
  EXPECT_TRUE(validate_program(prog).empty());
}

TEST(Parser, MainIsReorderedFirst) {
  Program prog = parse_program("proc f() { g := 1; } proc main() { call f; }");
  EXPECT_EQ(prog.procedures[0].name, "main");
  EXPECT_EQ(prog.procedures[1].name, "f");
  EXPECT_TRUE(validate_program(prog).empty());
}

TEST(Parser, ReportsPositionOfSyntaxError) {
  try {
    parse_program("proc main() {\n  x := ;\n}");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line, 2);
  }
}

TEST(Parser, RejectsScopeErrors) {
  EXPECT_THROW(parse_program("proc main() { call nope; }"), ParseError);
  EXPECT_THROW(parse_program("proc main() { } proc main() { }"), ParseError);
  EXPECT_THROW(parse_program("proc f() { }"), ParseError);
  EXPECT_THROW(parse_program("proc main() local x, x { }"), ParseError);
  EXPECT_THROW(parse_program("proc main() { y := x; } proc f() local x { x := 1; }"), ParseError);
}

TEST(Parser, EqualityBecomesTwoChainedGuards) {
  Program prog = parse_program("proc main() { assume(x == 1); }");
  EXPECT_EQ(count_kind(prog, 0, 1), 2u);
  Program ne = parse_program("proc main() { assume(x != 1); }");
  EXPECT_EQ(count_kind(ne, 0, 1), 2u);
  // the two != guards are parallel: both leave the entry
  EXPECT_EQ(ne.out_edges(ne.procedures[0].graph.entry).size(), 2u);
}

TEST(Parser, RendersEveryEdge) {
  Program prog = testkit::load_fixture("div.prog");
  std::string text = render_program(prog);
  EXPECT_NE(text.find("r := x"), std::string::npos);
  EXPECT_NE(text.find("[t >= 0 + 1]"), std::string::npos);
  EXPECT_NE(text.find("assert at v"), std::string::npos);
}

TEST(Validate, FlagsBrokenGraphs) {
  Program prog = parse_program("proc main() { x := 1; x := 2; }");
  Program bad = prog;
  bad.edges.push_back(Edge{bad.edges.size(), bad.procedures[0].graph.exit, bad.procedures[0].graph.entry,
                           Havoc{0}});
  bad.procedures[0].graph.edges.push_back(bad.edges.back().id);
  auto diags = validate_program(bad);
  ASSERT_FALSE(diags.empty());
  bool entry = false, exit = false;
  for (const auto& d : diags) {
    entry = entry || d.message.find("entry has incoming edge") != std::string::npos;
    exit = exit || d.message.find("exit has outgoing edge") != std::string::npos;
  }
  EXPECT_TRUE(entry);
  EXPECT_TRUE(exit);

  Program orphan = prog;
  orphan.procedures[0].graph.vertices.push_back(orphan.num_vertices++);
  EXPECT_FALSE(validate_program(orphan).empty());
}

TEST(Validate, RandomProgramsAreWellFormed) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    Program a = testkit::random_program(rng, 3);
    Program b = testkit::random_interproc_program(rng, 3, 3);
    EXPECT_TRUE(validate_program(a).empty()) << render_program(a);
    EXPECT_TRUE(validate_program(b).empty()) << render_program(b);
  }
}

TEST(Conditions, NegationPushedToGuards) {
  Program prog = parse_program("proc main() { assume(!(x < 1 && y == 2)); }");
  auto ne = BExp::negate(BExp::compare(CmpOp::Eq, Exp::variable(0), Exp::integer(2)));
  auto dnf = guard_dnf(ne);
  ASSERT_EQ(dnf.size(), 2u);
  EXPECT_EQ(dnf[0].size(), 1u);
  auto both = guard_dnf(BExp::conj(BExp::compare(CmpOp::Eq, Exp::variable(0), Exp::integer(2)),
                                   BExp::compare(CmpOp::Lt, Exp::variable(0), Exp::integer(3))));
  ASSERT_EQ(both.size(), 1u);
  EXPECT_EQ(both[0].size(), 3u);
  EXPECT_TRUE(validate_program(prog).empty());
}

TEST(Interpreter, DivisionComputesQuotient) {
  Program prog = testkit::load_fixture("div.prog");
  std::mt19937_64 rng(1);
  Env init(prog.num_vars(), 0);
  init[*prog.find_var("x")] = 17;
  init[*prog.find_var("y")] = 5;
  auto run = concrete_run(prog, init, rng);
  ASSERT_EQ(run.status, RunResult::Status::Finished);
  const Env& last = run.trace.back().env;
  EXPECT_EQ(last[*prog.find_var("q")], 3);
  EXPECT_EQ(last[*prog.find_var("r")], 2);
}

TEST(Interpreter, CheckedArithmeticGetsStuck) {
  Program prog = parse_program("proc main() { x := x * x; x := x * x; x := x * x; }");
  std::mt19937_64 rng(1);
  Env init{std::int64_t{1} << 40};
  EXPECT_EQ(concrete_run(prog, init, rng).status, RunResult::Status::Stuck);
  Program div = parse_program("proc main() { x := 1 / y; }");
  EXPECT_EQ(concrete_run(div, Env{0, 0}, rng).status, RunResult::Status::Stuck);
}

TEST(Interpreter, RecursionRestoresCallerLocals) {
  Program prog = testkit::load_fixture("interproc.prog");
  std::mt19937_64 rng(2);
  Env init(prog.num_vars(), 0);
  VarId x = *prog.find_var("x");
  init[x] = 7;
  auto run = concrete_run(prog, init, rng);
  ASSERT_EQ(run.status, RunResult::Status::Finished);
  EXPECT_EQ(run.trace.back().env[*prog.find_var("g")], 10);
  EXPECT_EQ(run.trace.back().env[x], 7);  // main's view of the local is untouched
  std::size_t returns = 0;
  for (const auto& s : run.trace) returns += s.kind == TraceStep::Kind::Return;
  EXPECT_EQ(returns, 11u);
}

TEST(Interpreter, ObservedEnvironmentHidesForeignLocals) {
  Program prog = testkit::load_fixture("interproc.prog");
  VarId x = *prog.find_var("x"), g = *prog.find_var("g");
  Env init(prog.num_vars(), 1), now(prog.num_vars(), 5);
  Env in_main = observed_env(prog, 0, now, init);
  EXPECT_EQ(in_main[x], 1);
  EXPECT_EQ(in_main[g], 5);
  EXPECT_EQ(observed_env(prog, 1, now, init)[x], 5);
}

TEST(Interpreter, SameSeedSameTrace) {
  std::mt19937_64 gen(5);
  Program prog = testkit::random_interproc_program(gen, 3, 3);
  std::mt19937_64 a(9), b(9);
  Env init(prog.num_vars(), 1);
  auto r1 = concrete_run(prog, init, a), r2 = concrete_run(prog, init, b);
  ASSERT_EQ(r1.trace.size(), r2.trace.size());
  for (std::size_t i = 0; i < r1.trace.size(); ++i) EXPECT_EQ(r1.trace[i].env, r2.trace[i].env);
}
