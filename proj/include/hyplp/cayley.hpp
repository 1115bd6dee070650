#pragma once

// Finite balls of the Cayley graph, the word metric, Gromov products and
// sampled fineness certification of geodesic triangles.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "hyplp/bicombing.hpp"
#include "hyplp/error.hpp"
#include "hyplp/group.hpp"

namespace hyplp {

/// Exact value k/2; Gromov products of integer distances are half-integers.
struct HalfInt {
  int twice = 0;

  double value() const noexcept { return twice / 2.0; }
  int floor() const noexcept { return twice >= 0 ? twice / 2 : -((-twice + 1) / 2); }
  friend auto operator<=>(HalfInt, HalfInt) = default;
  std::string str() const { return twice % 2 == 0 ? std::to_string(twice / 2) : std::to_string(twice) + "/2"; }
};

inline int distance(const Group& group, const Element& a, const Element& b) {
  return group.word_length(group.multiply(group.invert(a), b));
}

/// (b|c)_a = (d(a,b) + d(a,c) - d(b,c)) / 2
inline HalfInt gromov_product(const Group& group, const Element& a, const Element& b, const Element& c) {
  return HalfInt{distance(group, a, b) + distance(group, a, c) - distance(group, b, c)};
}

class CayleyBall {
 public:
  const Group& group() const noexcept { return group_; }
  int radius() const noexcept { return radius_; }
  std::size_t size() const noexcept { return vertices_.size(); }

  const Element& vertex(std::size_t h) const { return vertices_.at(h); }
  std::span<const Element> vertices() const noexcept { return vertices_; }
  int dist_from_e(std::size_t h) const { return dist_.at(h); }

  /// Neighbor of vertex h across generator s, or -1 when it lies outside.
  int neighbor(std::size_t h, GenIndex s) const { return adjacency_.at(h * group_.generator_count() + s); }

  std::optional<std::size_t> handle(const Element& g) const {
    auto it = index_.find(g);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  bool contains(const Element& g) const { return index_.contains(g); }

  /// Vertices at distance exactly r from e.
  std::span<const Element> layer(int r) const {
    if (r < 0 || r > radius_) return {};
    return std::span<const Element>(vertices_).subspan(layer_start_[static_cast<std::size_t>(r)],
                                                       layer_start_[static_cast<std::size_t>(r) + 1] -
                                                           layer_start_[static_cast<std::size_t>(r)]);
  }

  std::size_t ball_size(int r) const {
    if (r < 0) return 0;
    return layer_start_[static_cast<std::size_t>(std::min(r, radius_)) + 1];
  }

  friend CayleyBall build_ball(const Group& group, int radius, std::size_t memory_budget_mb);

 private:
  explicit CayleyBall(Group g) : group_(std::move(g)) {}

  Group group_;
  int radius_ = 0;
  std::vector<Element> vertices_;
  std::vector<int> dist_;
  std::vector<int> adjacency_;
  std::vector<std::size_t> layer_start_;
  std::unordered_map<Element, std::size_t, ElementHash> index_;
};

/// Breadth-first enumeration of B(e, R).
inline CayleyBall build_ball(const Group& group, int radius, std::size_t memory_budget_mb = 2048) {
  if (radius < 0) throw DomainError("ball radius must be nonnegative");
  if (auto w = group.window_radius(); w && radius > *w)
    throw OutOfWindow("requested radius " + std::to_string(radius) + " exceeds the explicit ball radius " +
                      std::to_string(*w));
  const std::size_t ngen = group.generator_count();
  const std::size_t bytes_per_vertex = sizeof(Element) * 2 + sizeof(int) * (ngen + 1) + 48;
  const std::size_t max_vertices = memory_budget_mb * (std::size_t{1} << 20) / bytes_per_vertex;

  CayleyBall ball(group);
  ball.radius_ = radius;
  ball.vertices_.push_back(group.identity());
  ball.dist_.push_back(0);
  ball.index_.emplace(group.identity(), 0);
  ball.layer_start_ = {0};
  for (int r = 0; r < radius; ++r) {
    const std::size_t begin = ball.layer_start_.back();
    const std::size_t end = ball.vertices_.size();
    ball.layer_start_.push_back(end);
    for (std::size_t h = begin; h < end; ++h)
      for (std::size_t s = 0; s < ngen; ++s) {
        Element n = group.right_multiply(ball.vertices_[h], static_cast<GenIndex>(s));
        if (ball.index_.contains(n)) continue;
        if (ball.vertices_.size() >= max_vertices)
          throw ResourceError("ball of radius " + std::to_string(radius) + " exceeds the memory budget of " +
                              std::to_string(memory_budget_mb) + " MB");
        ball.index_.emplace(n, ball.vertices_.size());
        ball.vertices_.push_back(std::move(n));
        ball.dist_.push_back(r + 1);
      }
  }
  ball.layer_start_.push_back(ball.vertices_.size());
  if (ball.layer_start_.size() != static_cast<std::size_t>(radius) + 2)
    throw InvariantViolation("BFS layer bookkeeping is inconsistent");

  ball.adjacency_.assign(ball.vertices_.size() * ngen, -1);
  for (std::size_t h = 0; h < ball.vertices_.size(); ++h)
    for (std::size_t s = 0; s < ngen; ++s) {
      try {
        Element n = group.right_multiply(ball.vertices_[h], static_cast<GenIndex>(s));
        if (auto it = ball.index_.find(n); it != ball.index_.end())
          ball.adjacency_[h * ngen + s] = static_cast<int>(it->second);
      } catch (const OutOfWindow&) {
      }
    }
  return ball;
}

struct VertexSet {
  std::vector<Element> members;
  /// True when the ball provably contains the whole set (d(e,x) + r <= R).
  bool complete = false;
};

/// S(x, r) = x . S(e, r), restricted to the ball.
inline VertexSet sphere(const CayleyBall& ball, const Element& x, int r) {
  const Group& group = ball.group();
  VertexSet out;
  if (r < 0) throw DomainError("sphere radius must be nonnegative");
  out.complete = group.word_length(x) + r <= ball.radius();
  for (const Element& u : ball.layer(r)) {
    try {
      Element y = group.multiply(x, u);
      if (group.word_length(y) <= ball.radius()) out.members.push_back(std::move(y));
    } catch (const OutOfWindow&) {
    }
  }
  std::sort(out.members.begin(), out.members.end());
  return out;
}

inline VertexSet ball_around(const CayleyBall& ball, const Element& x, int r) {
  if (r < 0) throw DomainError("ball radius must be nonnegative");
  VertexSet out;
  out.complete = true;
  for (int k = 0; k <= r; ++k) {
    VertexSet s = sphere(ball, x, k);
    out.complete = out.complete && s.complete;
    out.members.insert(out.members.end(), s.members.begin(), s.members.end());
  }
  std::sort(out.members.begin(), out.members.end());
  return out;
}

struct CertReport {
  int delta = 0;
  int samples = 0;
  int skipped = 0;
  int max_deviation = 0;
  std::vector<std::string> witness;  // [a, b, c] as words
  bool pass = true;
  std::string scope;

  nlohmann::json to_json() const {
    return {{"delta", delta},         {"samples", samples}, {"skipped", skipped},
            {"max_deviation", max_deviation}, {"witness", witness}, {"pass", pass},
            {"scope", scope}};
  }
};

namespace detail {

// Largest d(v,w) over matched internal points at corner x of triangle (x,y,z).
inline int corner_deviation(const Bicombing& q, const Element& x, const Element& y, const Element& z) {
  const Group& group = q.group();
  const int limit = gromov_product(group, x, y, z).floor();
  int worst = 0;
  for (int t = 0; t <= limit; ++t)
    worst = std::max(worst, distance(group, q.q_point(x, y, t), q.q_point(x, z, t)));
  return worst;
}

inline void record_triangle(const Bicombing& q, const Element& a, const Element& b, const Element& c,
                            CertReport& report) {
  const int dev = std::max({corner_deviation(q, a, b, c), corner_deviation(q, b, a, c),
                            corner_deviation(q, c, a, b)});
  if (report.witness.empty() || dev > report.max_deviation) {
    report.max_deviation = dev;
    const Group& group = q.group();
    report.witness = {group.format(a), group.format(b), group.format(c)};
  }
}

}  // namespace detail

/// Samples triangles with vertices in the ball and measures how far matched
/// points on the bicombing sides drift apart.
inline CertReport certify_delta(const CayleyBall& ball, const Bicombing& q, int delta, int samples,
                                std::uint64_t seed) {
  if (delta < 1) throw DomainError("delta must be a positive integer");
  CertReport report;
  report.delta = delta;
  report.samples = samples;
  report.scope = "sampled triangles; sides are bicombing geodesics";
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, ball.size() - 1);
  for (int i = 0; i < samples; ++i) {
    const Element& a = ball.vertex(pick(rng));
    const Element& b = ball.vertex(pick(rng));
    const Element& c = ball.vertex(pick(rng));
    try {
      detail::record_triangle(q, a, b, c, report);
    } catch (const OutOfWindow&) {
      ++report.skipped;
    }
  }
  report.pass = report.max_deviation <= delta;
  return report;
}

/// Every triangle with a corner at e and the other two corners in B(e, radius);
/// by equivariance this covers every triangle whose sides at some corner are
/// at most `radius` long.
inline CertReport certify_delta_exhaustive(const CayleyBall& ball, const Bicombing& q, int delta, int radius) {
  if (delta < 1) throw DomainError("delta must be a positive integer");
  CertReport report;
  report.delta = delta;
  report.scope = "exhaustive triangles at e within radius " + std::to_string(radius) +
                 "; sides are bicombing geodesics";
  const Group& group = ball.group();
  const std::size_t n = ball.ball_size(radius);
  const Element e = group.identity();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      ++report.samples;
      try {
        const int dev = detail::corner_deviation(q, e, ball.vertex(i), ball.vertex(j));
        if (report.witness.empty() || dev > report.max_deviation) {
          report.max_deviation = dev;
          report.witness = {group.format(e), group.format(ball.vertex(i)), group.format(ball.vertex(j))};
        }
      } catch (const OutOfWindow&) {
        ++report.skipped;
      }
    }
  report.pass = report.max_deviation <= delta;
  return report;
}

/// Serializes a ball in the Cayley-ball file format; vertex ids are words.
inline nlohmann::json to_ball_json(const CayleyBall& ball) {
  const Group& group = ball.group();
  nlohmann::json gens = nlohmann::json::array();
  for (const auto& g : group.generators())
    gens.push_back({{"label", g.label}, {"inverse", group.generator(g.inverse).label}});
  nlohmann::json vertices = nlohmann::json::array();
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& v : ball.vertices()) vertices.push_back(group.format(v));
  for (std::size_t h = 0; h < ball.size(); ++h)
    for (std::size_t s = 0; s < group.generator_count(); ++s) {
      const int n = ball.neighbor(h, static_cast<GenIndex>(s));
      if (n >= 0)
        edges.push_back({group.format(ball.vertex(h)), static_cast<int>(s),
                         group.format(ball.vertex(static_cast<std::size_t>(n)))});
    }
  return {{"generators", gens},
          {"basepoint", group.format(group.identity())},
          {"radius", ball.radius()},
          {"vertices", vertices},
          {"edges", edges}};
}

}  // namespace hyplp
