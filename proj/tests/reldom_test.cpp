#include <gtest/gtest.h>

#include "pka/reldom.hpp"

using namespace pka;

namespace {

struct Fixture : ::testing::Test {
  RelDomain d{std::make_shared<RelSpace>(3, std::vector<std::string>{"x", "y"})};
  const RelSpace& s = d.space();
  std::size_t st(std::int64_t x, std::int64_t y) const { return s.encode({x, y}); }
  ExpPtr x() const { return Exp::variable(0); }
  ExpPtr y() const { return Exp::variable(1); }
  ExpPtr k(std::int64_t v) const { return Exp::integer(v); }
};

}  // namespace

TEST(RelSpaceTest, EncodeDecodeRoundTrip) {
  RelSpace s(4, {"a", "b", "c"});
  EXPECT_EQ(s.num_states, 64u);
  for (std::size_t i = 0; i < s.num_states; ++i) EXPECT_EQ(s.encode(s.decode(i)), i);
  EXPECT_EQ(s.reduce(-1), 3u);
  EXPECT_EQ(s.reduce(9), 1u);
  EXPECT_EQ(s.render_state(s.encode({1, 2, 3})), "(a=1,b=2,c=3)");
}

TEST(RelSpaceTest, RejectsBadSizes) {
  EXPECT_THROW(RelSpace(1, {"x"}), Error);
  EXPECT_THROW(RelSpace(16, {"a", "b", "c", "d"}), Error);
}

TEST_F(Fixture, IncrementWrapsAround) {
  RelValue inc = d.assign(0, Exp::binary(BinOp::Add, x(), k(1)));
  EXPECT_EQ(inc.count(), 9u);
  EXPECT_TRUE(inc.test(st(2, 1), st(0, 1)));
  EXPECT_FALSE(inc.test(st(2, 1), st(0, 2)));
  // three increments are the identity
  EXPECT_TRUE(d.equal(d.times(inc, d.times(inc, inc)), d.one()));
  // and the closure relates x to every value with y fixed
  RelValue s = d.star(inc);
  EXPECT_EQ(s.count(), 27u);
  EXPECT_TRUE(d.equal(s, d.havoc(0)));
}

TEST_F(Fixture, GuardsUseRepresentatives) {
  RelValue g = d.assume(Guard{x(), k(1)});  // x >= 1
  EXPECT_EQ(g.count(), 6u);
  EXPECT_FALSE(g.test(st(0, 0), st(0, 0)));
  EXPECT_TRUE(g.test(st(2, 0), st(2, 0)));
  EXPECT_TRUE(d.equal(d.times(g, g), g));
}

TEST_F(Fixture, DivisionByZeroHasNoSuccessor) {
  RelValue q = d.assign(1, Exp::binary(BinOp::Div, y(), x()));
  EXPECT_EQ(q.count(), 6u);
  for (auto [from, to] : q.pairs()) EXPECT_NE(s.get(from, 0), 0u);
}

TEST_F(Fixture, ExistsForgetsBothSides) {
  RelValue set1 = d.assign(0, k(1));
  RelValue e = d.exists(0, set1);
  // every pair (x=a,y) -> (x=a,y)
  EXPECT_TRUE(d.equal(e, d.one()));
  EXPECT_TRUE(d.equal(d.exists(0, d.havoc(0)), d.one()));
  EXPECT_TRUE(d.equal(d.exists(1, d.havoc(0)), d.havoc(0)));
  EXPECT_THROW(d.exists(5, set1), Error);
}

TEST_F(Fixture, WideningIsJoin) {
  std::mt19937_64 rng(1);
  RelValue a = d.random(rng, 0.2), b = d.random(rng, 0.2);
  EXPECT_TRUE(d.equal(d.widen(a, b), d.plus(a, b)));
}

TEST_F(Fixture, StarIsLeastFixpoint) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 30; ++i) {
    RelValue a = d.random(rng, 0.1);
    RelValue acc = d.one();
    for (int t = 0; t < 20; ++t) acc = d.plus(d.one(), d.times(acc, a));
    EXPECT_TRUE(d.equal(d.star(a), acc));
  }
}

TEST_F(Fixture, MixedSpacesAreRejected) {
  RelDomain other(std::make_shared<RelSpace>(2, std::vector<std::string>{"x", "y"}));
  EXPECT_THROW(d.plus(d.one(), other.one()), Error);
  // structurally equal spaces are interchangeable
  RelDomain twin(std::make_shared<RelSpace>(3, std::vector<std::string>{"x", "y"}));
  EXPECT_TRUE(d.equal(d.one(), twin.one()));
}

TEST_F(Fixture, Rendering) {
  RelValue r = d.zero();
  r.set(st(1, 0), st(2, 0));
  EXPECT_EQ(d.render(r), "{(x=1,y=0)->(x=2,y=0)}");
  EXPECT_EQ(d.render(d.zero()), "{}");
}

TEST_F(Fixture, CallsHaveNoLocalMeaning) {
  EXPECT_THROW(d.action(Call{0}), Error);
}
