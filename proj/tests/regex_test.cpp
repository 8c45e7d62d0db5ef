#include <gtest/gtest.h>

#include <random>

#include "pka/regex.hpp"

using namespace pka;
using namespace pka::regex;

namespace {

PathPtr random_expr(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 5);
  switch (pick(rng)) {
    case 0: return empty();
    case 1: return eps();
    case 2: return edge(std::uniform_int_distribution<EdgeId>(0, 2)(rng));
    case 3: return plus(random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    case 4: return times(random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    default: return star(random_expr(rng, depth - 1));
  }
}

}  // namespace

TEST(SmartConstructors, UnitsAndAnnihilators) {
  PathPtr a = edge(1);
  EXPECT_EQ(plus(empty(), a), a);
  EXPECT_EQ(plus(a, empty()), a);
  EXPECT_EQ(times(eps(), a), a);
  EXPECT_EQ(times(a, eps()), a);
  EXPECT_EQ(times(a, empty())->kind, PathExpr::Kind::Empty);
  EXPECT_EQ(star(empty())->kind, PathExpr::Kind::Eps);
  EXPECT_EQ(star(eps())->kind, PathExpr::Kind::Eps);
  PathPtr s = star(a);
  EXPECT_EQ(star(s), s);
  EXPECT_EQ(plus(times(a, a), times(edge(1), edge(1)))->kind, PathExpr::Kind::Times);
}

TEST(Render, MatchesTextualSyntax) {
  EXPECT_EQ(render(empty()), "0");
  EXPECT_EQ(render(eps()), "e");
  EXPECT_EQ(render(plus(edge(1), times(edge(2), star(edge(3))))), "(<1>+(<2>.<3>*))");
}

TEST(Words, EpsilonAndStar) {
  EXPECT_EQ(enumerate_words(eps(), 3), (std::set<Word>{Word{}}));
  EXPECT_TRUE(enumerate_words(empty(), 3).empty());
  auto w = enumerate_words(star(times(edge(1), edge(2))), 4);
  EXPECT_EQ(w, (std::set<Word>{Word{}, Word{1, 2}, Word{1, 2, 1, 2}}));
  EXPECT_EQ(enumerate_words(plus(eps(), edge(4)), 0), (std::set<Word>{Word{}}));
}

TEST(Words, RecognizerAgreesWithEnumeration) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 300; ++i) {
    PathPtr p = random_expr(rng, 4);
    auto words = enumerate_words(p, 4);
    // every word over {0,1,2} of length <= 4
    std::vector<Word> all{Word{}};
    for (std::size_t k = 0; k < all.size(); ++k)
      if (all[k].size() < 4)
        for (EdgeId e = 0; e < 3; ++e) {
          Word w = all[k];
          w.push_back(e);
          all.push_back(w);
        }
    for (const Word& w : all) EXPECT_EQ(recognizes(p, w), words.count(w) > 0) << render(p);
  }
}

TEST(Simplify, PreservesLanguage) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 300; ++i) {
    // build without the smart constructors, then simplify
    PathPtr raw = make(PathExpr::Kind::Plus, random_expr(rng, 3), make(PathExpr::Kind::Times, eps(), random_expr(rng, 3)));
    PathPtr s = simplify(raw);
    EXPECT_EQ(enumerate_words(raw, 5), enumerate_words(s, 5)) << render(raw);
    EXPECT_LE(s->size, raw->size);
  }
}

TEST(StructuralEquality, IgnoresSharing) {
  PathPtr a = times(edge(1), star(edge(2)));
  PathPtr b = times(edge(1), star(edge(2)));
  EXPECT_NE(a, b);
  EXPECT_TRUE(structurally_equal(a, b));
  EXPECT_FALSE(structurally_equal(a, times(edge(2), star(edge(1)))));
}
