#include <gtest/gtest.h>

#include <set>

#include "hyplp/bicombing.hpp"
#include "hyplp/cayley.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace hyplp;

TEST(Ball, FreeCounts) {
  const Group f2 = Group::free(2);
  EXPECT_EQ(build_ball(f2, 0).size(), 1u);
  EXPECT_EQ(build_ball(f2, 2).size(), 17u);
  const CayleyBall b6 = build_ball(f2, 6);
  // 1 + 4 * (3^r - 1) / 2 for the free group of rank 2.
  for (int r = 0; r <= 6; ++r) {
    std::size_t expect = 1;
    std::size_t s = 4;
    for (int k = 1; k <= r; ++k, s *= 3) expect += s;
    EXPECT_EQ(b6.ball_size(r), expect) << r;
  }
  EXPECT_EQ(b6.layer(3).size(), 36u);
}

TEST(Ball, ModularRadiusOne) {
  const Group g = Group::free_product_cyclic({2, 3});
  const CayleyBall b1 = build_ball(g, 1);
  ASSERT_EQ(b1.size(), 4u);
  std::set<std::string> words;
  for (const Element& x : b1.vertices()) words.insert(g.format(x));
  EXPECT_EQ(words, (std::set<std::string>{"e", "s", "t", "t2"}));
}

TEST(Ball, LayersMatchModularOracle) {
  const Group g = Group::free_product_cyclic({2, 3});
  const oracle::ModularModel model(10);
  const CayleyBall ball = build_ball(g, 10);
  std::vector<std::size_t> counts(11, 0);
  for (const auto& [m, d] : model.length) ++counts[static_cast<std::size_t>(d)];
  for (int r = 0; r <= 10; ++r) EXPECT_EQ(ball.layer(r).size(), counts[static_cast<std::size_t>(r)]) << r;
}

TEST(Ball, StructuralInvariants) {
  for (const Group& g : {Group::free(2), Group::free_product_cyclic({2, 3}), Group::free(1)}) {
    const CayleyBall ball = build_ball(g, 5);
    EXPECT_EQ(ball.dist_from_e(0), 0);
    for (std::size_t h = 0; h < ball.size(); ++h) {
      EXPECT_LE(ball.dist_from_e(h), 5);
      EXPECT_EQ(ball.dist_from_e(h), g.word_length(ball.vertex(h)));
      for (const auto& s : g.generators()) {
        const int n = ball.neighbor(h, s.index);
        if (n < 0) continue;
        EXPECT_EQ(ball.neighbor(static_cast<std::size_t>(n), s.inverse), static_cast<int>(h));
        EXPECT_EQ(ball.vertex(static_cast<std::size_t>(n)), g.right_multiply(ball.vertex(h), s.index));
      }
    }
    std::set<Element> unique(ball.vertices().begin(), ball.vertices().end());
    EXPECT_EQ(unique.size(), ball.size());
  }
}

TEST(Ball, BudgetAndWindowErrors) {
  EXPECT_THROW(build_ball(Group::free(2), 14, 1), ResourceError);
  const Group loaded = Group::from_ball_json(to_ball_json(build_ball(Group::free(2), 2)));
  EXPECT_THROW(build_ball(loaded, 3), OutOfWindow);
  EXPECT_THROW(build_ball(Group::free(2), -1), DomainError);
}

TEST(Distance, Examples) {
  const Group f2 = Group::free(2);
  EXPECT_EQ(distance(f2, f2.parse("a"), f2.parse("a")), 0);
  EXPECT_EQ(distance(f2, f2.parse("ab"), f2.parse("aB")), 2);
  const Group z = Group::free_product_cyclic({2, 3});
  EXPECT_EQ(distance(z, z.parse("st"), z.parse("s")), 1);
}

TEST(Distance, LeftInvarianceAndTriangleInequality) {
  for (const Group& g : {Group::free(2), Group::free_product_cyclic({2, 3})}) {
    const CayleyBall ball = build_ball(g, 3);
    for (const Element& x : ball.vertices())
      for (const Element& a : ball.vertices())
        for (const Element& b : ball.vertices()) {
          const int d = distance(g, a, b);
          ASSERT_EQ(distance(g, g.multiply(x, a), g.multiply(x, b)), d);
          ASSERT_LE(d, distance(g, a, x) + distance(g, x, b));
        }
  }
}

TEST(Gromov, Examples) {
  const Group f2 = Group::free(2);
  const Element e = f2.identity();
  EXPECT_EQ(gromov_product(f2, e, f2.parse("a"), f2.parse("b")).twice, 0);
  EXPECT_EQ(gromov_product(f2, e, f2.parse("ab"), f2.parse("a")).twice, 2);
  const Element b = f2.parse("abA");
  EXPECT_EQ(gromov_product(f2, e, b, b).twice, 2 * 3);
}

TEST(Gromov, BoundsAndSymmetry) {
  const Group z = Group::free_product_cyclic({2, 3});
  const CayleyBall ball = build_ball(z, 3);
  for (const Element& a : ball.vertices())
    for (const Element& b : ball.vertices())
      for (const Element& c : ball.vertices()) {
        const HalfInt p = gromov_product(z, a, b, c);
        ASSERT_GE(p.twice, 0);
        ASSERT_LE(p.twice, 2 * std::min(distance(z, a, b), distance(z, a, c)));
        ASSERT_EQ(p, gromov_product(z, a, c, b));
      }
}

TEST(Sphere, Examples) {
  const Group f2 = Group::free(2);
  const CayleyBall ball = build_ball(f2, 5);
  const Element x = f2.parse("ab");
  const VertexSet s0 = sphere(ball, x, 0);
  EXPECT_EQ(s0.members, std::vector<Element>{x});
  EXPECT_TRUE(s0.complete);
  EXPECT_EQ(sphere(ball, f2.identity(), 3).members.size(), 36u);
  EXPECT_EQ(ball_around(ball, x, 0).members, std::vector<Element>{x});
  EXPECT_FALSE(sphere(ball, x, 4).complete);
}

TEST(Sphere, BallIsUnionOfSpheres) {
  const Group z = Group::free_product_cyclic({2, 3});
  const CayleyBall ball = build_ball(z, 8);
  const Element x = z.parse("st2s");
  const VertexSet around = ball_around(ball, x, 4);
  ASSERT_TRUE(around.complete);
  std::set<Element> from_spheres;
  std::size_t total = 0;
  for (int k = 0; k <= 4; ++k) {
    const VertexSet s = sphere(ball, x, k);
    total += s.members.size();
    for (const Element& y : s.members) {
      EXPECT_EQ(distance(z, x, y), k);
      from_spheres.insert(y);
    }
  }
  EXPECT_EQ(total, from_spheres.size());
  EXPECT_EQ(std::set<Element>(around.members.begin(), around.members.end()), from_spheres);
}

TEST(CertifyDelta, TreeHasZeroDeviation) {
  const Group f2 = Group::free(2);
  const Bicombing q(f2);
  const CayleyBall ball = build_ball(f2, 6);
  const CertReport r = certify_delta(ball, q, 1, 500, 3);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.max_deviation, 0);
  EXPECT_EQ(r.to_json().at("witness").size(), 3u);
  EXPECT_TRUE(certify_delta_exhaustive(ball, q, 1, 3).pass);
}

TEST(CertifyDelta, ModularWithinDeclaredDelta) {
  const Group z = Group::free_product_cyclic({2, 3});
  const Bicombing q(z);
  const CayleyBall ball = build_ball(z, 8);
  const CertReport r = certify_delta(ball, q, 1, 1000, 11);
  EXPECT_TRUE(r.pass);
  EXPECT_LE(r.max_deviation, 1);
  EXPECT_TRUE(certify_delta_exhaustive(ball, q, 1, 5).pass);
}

TEST(CertifyDelta, DegenerateTriangle) {
  const Group f2 = Group::free(2);
  const Bicombing q(f2);
  const CayleyBall ball = build_ball(f2, 0);
  const CertReport r = certify_delta(ball, q, 1, 10, 1);
  EXPECT_EQ(r.max_deviation, 0);
  EXPECT_TRUE(r.pass);
}

TEST(CertifyDelta, ExplicitBallCountsSkips) {
  const Group loaded = Group::from_ball_json(to_ball_json(build_ball(Group::free_product_cyclic({2, 3}), 6)));
  const Bicombing q(loaded);
  const CayleyBall ball = build_ball(loaded, 6);
  const CertReport r = certify_delta(ball, q, 1, 300, 5);
  EXPECT_TRUE(r.pass);
  EXPECT_GT(r.skipped, 0);
}
