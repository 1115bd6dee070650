#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hyplp/cayley.hpp"
#include "hyplp/chains.hpp"

using namespace hyplp;

namespace {

Chain0 random_chain(const CayleyBall& ball, std::mt19937_64& rng) {
  std::vector<Chain0::Term> terms;
  const int n = std::uniform_int_distribution<int>(0, 12)(rng);
  for (int i = 0; i < n; ++i) {
    const auto& v = ball.vertex(std::uniform_int_distribution<std::size_t>(0, ball.size() - 1)(rng));
    terms.emplace_back(v, Rational(std::uniform_int_distribution<int>(-9, 9)(rng), std::uniform_int_distribution<int>(1, 7)(rng)));
  }
  return Chain0::from_terms(std::move(terms));
}

}  // namespace

TEST(Chain, Algebra) {
  const Group f2 = Group::free(2);
  const Element a = f2.parse("a");
  const Element b = f2.parse("b");
  const Element c = f2.parse("ab");
  const Chain0 da = Chain0::point(a);
  const Chain0 zero = add(da, scale(Rational(-1), da));
  EXPECT_TRUE(zero.empty());
  EXPECT_TRUE(support(zero).empty());
  const Chain0 half = Chain0::point(a, Rational(1, 2)) + Chain0::point(b, Rational(1, 2));
  EXPECT_EQ(coefficient_sum(half), 1);
  const Chain0 third = scale(Rational(1, 3), Chain0::point(a) + Chain0::point(b) + Chain0::point(c));
  ASSERT_EQ(third.size(), 3u);
  for (const auto& [v, coeff] : third.terms()) EXPECT_EQ(coeff, Rational(1, 3));
  EXPECT_EQ(third.coefficient(f2.parse("B")), 0);
  EXPECT_TRUE(Chain0::point(a, Rational(0)).empty());
}

TEST(Chain, NoZeroCoefficientsStored) {
  const CayleyBall ball = build_ball(Group::free(2), 2);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 500; ++i) {
    Chain0 x = random_chain(ball, rng);
    x -= random_chain(ball, rng);
    x.add_scaled(random_chain(ball, rng), Rational(std::uniform_int_distribution<int>(-3, 3)(rng), 2));
    for (const auto& t : x.terms()) ASSERT_FALSE(is_zero(t.second));
    for (std::size_t k = 1; k < x.size(); ++k) ASSERT_LT(x.terms()[k - 1].first, x.terms()[k].first);
  }
}

TEST(Chain, Norms) {
  const Group f2 = Group::free(2);
  const Element a = f2.parse("a");
  const Element b = f2.parse("b");
  const Chain0 da = Chain0::point(a);
  EXPECT_EQ(norm_1(da), 1);
  for (double p : {1.0, 2.0, 3.5, 40.0}) {
    EXPECT_DOUBLE_EQ(norm_p(da, p), 1.0);
    EXPECT_NEAR(norm_p(da - Chain0::point(b), p), std::pow(2.0, 1.0 / p), 1e-15);
  }
  EXPECT_EQ(norm_1(Chain0::point(a, Rational(1, 2)) + Chain0::point(b, Rational(1, 2))), 1);
  EXPECT_THROW(norm_p(da, 0.5), DomainError);
}

TEST(Chain, TranslateExamples) {
  const Group f2 = Group::free(2);
  const Element a = f2.parse("a");
  const Element g = f2.parse("bA");
  const Chain0 x = Chain0::point(a, Rational(2, 3)) + Chain0::point(f2.parse("b"), Rational(-1, 3));
  EXPECT_EQ(translate(f2, f2.identity(), x), x);
  EXPECT_EQ(translate(f2, g, Chain0::point(a)), Chain0::point(f2.multiply(g, a)));
}

TEST(Chain, TranslationIsIsometry) {
  const Group z = Group::free_product_cyclic({2, 3});
  const CayleyBall ball = build_ball(z, 5);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 300; ++i) {
    const Chain0 x = random_chain(ball, rng);
    const Element& g = ball.vertex(std::uniform_int_distribution<std::size_t>(0, ball.size() - 1)(rng));
    const Chain0 y = translate(z, g, x);
    EXPECT_EQ(norm_1(y), norm_1(x));
    EXPECT_EQ(coefficient_sum(y), coefficient_sum(x));
    for (double p : {2.0, 3.7}) EXPECT_NEAR(norm_p(y, p), norm_p(x, p), 1e-12 * (1 + norm_p(x, p)));
    EXPECT_EQ(translate(z, z.invert(g), y), x);
  }
}

TEST(Chain, NormMonotoneInExponent) {
  const CayleyBall ball = build_ball(Group::free(2), 3);
  std::mt19937_64 rng(4);
  for (int i = 0; i < 300; ++i) {
    const Chain0 x = random_chain(ball, rng);
    const double n1 = to_double(norm_1(x));
    double prev = n1;
    for (double p : {1.5, 2.0, 3.0, 7.5, 30.0}) {
      const double np = norm_p(x, p);
      EXPECT_LE(np, prev * (1 + 1e-12));
      EXPECT_LE(np, n1 * (1 + 1e-12));
      prev = np;
    }
  }
}

TEST(Chain, JsonShape) {
  const Group f2 = Group::free(2);
  const Chain0 x = Chain0::point(f2.parse("ab"), Rational(-3, 7));
  const auto j = to_json(f2, x);
  ASSERT_EQ(j.at("entries").size(), 1u);
  EXPECT_EQ(j["entries"][0][0], "ab");
  EXPECT_EQ(j["entries"][0][1], -3);
  EXPECT_EQ(j["entries"][0][2], 7);
}
