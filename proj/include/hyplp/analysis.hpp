#pragma once

// Growth constant, exponential decay envelopes, choice of p and tail bounds.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hyplp/cayley.hpp"
#include "hyplp/chains.hpp"
#include "hyplp/error.hpp"
#include "hyplp/mineyev.hpp"

namespace hyplp {

/// SplitMix64 step; derives independent per-sample streams from one seed.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// max_{1<=r<=R} #B(e,r)^(1/r); by homogeneity this bounds #B(x,r) for every x.
inline double estimate_upsilon(const CayleyBall& ball) {
  if (ball.radius() < 2) throw DomainError("estimating upsilon needs a ball of radius at least 2");
  double upsilon = 1.0;
  for (int r = 1; r <= ball.radius(); ++r)
    upsilon = std::max(upsilon, std::pow(static_cast<double>(ball.ball_size(r)), 1.0 / r));
  upsilon *= 1.0 + 1e-12;
  for (int r = 1; r <= ball.radius(); ++r)
    if (static_cast<double>(ball.ball_size(r)) > std::pow(upsilon, r))
      throw InvariantViolation("growth bound #B(e,r) <= upsilon^r fails at r = " + std::to_string(r));
  return upsilon;
}

struct DecayPoint {
  double gromov_product = 0;
  double value = 0;
  friend auto operator<=>(const DecayPoint&, const DecayPoint&) = default;
};

struct DecayFit {
  double constant = 0;  // L or C
  double base = 0;      // lambda or rho
  std::vector<DecayPoint> samples;
  std::string fit_mode = "upper-envelope";

  double envelope(double x) const { return base == 0 ? (x == 0 ? constant : 0.0) : constant * std::pow(base, x); }

  /// Number of samples lying on or below the envelope.
  std::size_t covered() const {
    return static_cast<std::size_t>(std::count_if(samples.begin(), samples.end(),
                                                  [&](const DecayPoint& s) { return s.value <= envelope(s.gromov_product); }));
  }

  nlohmann::json to_json(bool with_samples = false) const {
    nlohmann::json j = {{"constant", constant},
                        {"base", base},
                        {"fit_mode", fit_mode},
                        {"sample_count", samples.size()},
                        {"covered", covered()}};
    if (with_samples) {
      nlohmann::json s = nlohmann::json::array();
      for (const auto& p : samples) s.push_back({p.gromov_product, p.value});
      j["samples"] = s;
    }
    return j;
  }
};

/// Upper envelope C * base^x over the samples. Among all dominating
/// envelopes, picks the one minimizing C / (1 - base), the mass of the
/// geometric series it defines; C is then the smallest constant that
/// dominates every sample for that base.
inline DecayFit fit_envelope(std::vector<DecayPoint> samples) {
  if (samples.empty()) throw FitError("fit underdetermined: no samples");
  std::sort(samples.begin(), samples.end());
  if (samples.front().gromov_product == samples.back().gromov_product)
    throw FitError("fit underdetermined: every sample has the same Gromov product");
  DecayFit fit;
  std::map<double, double> peak;
  for (const auto& s : samples) {
    if (s.value < 0 || !std::isfinite(s.value)) throw FitError("decay samples must be finite and nonnegative");
    if (s.value > 0) peak[s.gromov_product] = std::max(peak[s.gromov_product], s.value);
  }
  fit.samples = std::move(samples);
  if (peak.empty()) return fit;
  if (peak.rbegin()->first == 0) {
    fit.constant = peak.begin()->second;
    return fit;
  }
  auto log_constant = [&](double u) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& [x, v] : peak) best = std::max(best, std::log(v) - x * u);
    return best;
  };
  auto objective = [&](double u) { return log_constant(u) - std::log(-std::expm1(u)); };
  double lo = -60.0, hi = -1e-12;
  const double ratio = (std::sqrt(5.0) - 1) / 2;
  double x1 = hi - ratio * (hi - lo), x2 = lo + ratio * (hi - lo);
  double f1 = objective(x1), f2 = objective(x2);
  for (int it = 0; it < 400 && hi - lo > 1e-13; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = objective(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = objective(x2);
    }
  }
  const double u = (lo + hi) / 2;
  fit.base = std::exp(u);
  double c = 0;
  for (const auto& [x, v] : peak) c = std::max(c, v / std::pow(fit.base, x));
  fit.constant = c * (1 + 1e-12);
  if (!(fit.base < 1.0)) throw FitError("decay fit did not produce a base below 1");
  if (fit.covered() != fit.samples.size()) throw InvariantViolation("decay envelope misses a sample");
  return fit;
}

/// A sampled triple (b, a, a') with the chains f(b,a), f(b,a') moved to base point e.
struct TripleSample {
  Element b, a, a2;
  HalfInt gromov;
  Chain0 fa, fa2;
};

/// Draws triples from the ball. Odd-indexed samples branch a' off the
/// geodesic q[b,a] so that large Gromov products are represented.
inline std::vector<TripleSample> draw_triples(const Mineyev& m, const CayleyBall& ball, int count,
                                              std::uint64_t seed) {
  if (count <= 0) throw DomainError("sample count must be positive");
  const Group& group = m.group();
  const Bicombing& q = m.bicombing();
  std::vector<TripleSample> out;
  out.reserve(static_cast<std::size_t>(count));
  std::uint64_t stream = 0;
  int failures = 0;
  while (static_cast<int>(out.size()) < count) {
    std::mt19937_64 rng(split_seed(seed, stream));
    std::uniform_int_distribution<std::size_t> pick(0, ball.size() - 1);
    const bool branch = (stream++ % 2) == 1;
    TripleSample s;
    s.b = ball.vertex(pick(rng));
    s.a = ball.vertex(pick(rng));
    try {
      if (!branch) {
        s.a2 = ball.vertex(pick(rng));
      } else {
        const int d = distance(group, s.b, s.a);
        const Element c = q.q_point(s.b, s.a, std::uniform_int_distribution<int>(0, d)(rng));
        s.a2 = s.a;
        for (int attempt = 0; attempt < 8; ++attempt) {
          Element y = c;
          const int len = std::uniform_int_distribution<int>(0, ball.radius())(rng);
          for (int k = 0; k < len; ++k)
            y = group.right_multiply(
                y, static_cast<GenIndex>(std::uniform_int_distribution<std::size_t>(0, group.generator_count() - 1)(rng)));
          if (ball.contains(y)) {
            s.a2 = std::move(y);
            break;
          }
        }
      }
      m.check_margin(s.b, s.a);
      m.check_margin(s.b, s.a2);
      const Element bi = group.invert(s.b);
      s.fa = m.f_from_identity(group.multiply(bi, s.a));
      s.fa2 = m.f_from_identity(group.multiply(bi, s.a2));
      s.gromov = gromov_product(group, s.b, s.a, s.a2);
      out.push_back(std::move(s));
    } catch (const ExactnessError&) {
      if (++failures > 100 * count) throw FitError("too few samples fit inside the ball margin");
    } catch (const OutOfWindow&) {
      if (++failures > 100 * count) throw FitError("too few samples fit inside the ball margin");
    }
  }
  return out;
}

inline DecayFit fit_f_decay(const std::vector<TripleSample>& triples) {
  std::vector<DecayPoint> pts;
  pts.reserve(triples.size());
  for (const auto& t : triples) pts.push_back({t.gromov.value(), to_double(norm_1(t.fa - t.fa2))});
  return fit_envelope(std::move(pts));
}

inline DecayFit fit_h_decay(const std::vector<TripleSample>& triples, double p) {
  std::vector<DecayPoint> pts;
  pts.reserve(triples.size());
  for (const auto& t : triples)
    pts.push_back({t.gromov.value(), h_difference_norm_p(normalize(t.fa, p), normalize(t.fa2, p), p)});
  return fit_envelope(std::move(pts));
}

inline DecayFit fit_f_decay(const Mineyev& m, const CayleyBall& ball, int count, std::uint64_t seed) {
  return fit_f_decay(draw_triples(m, ball, count, seed));
}

inline DecayFit fit_h_decay(const Mineyev& m, const CayleyBall& ball, double p, int count, std::uint64_t seed) {
  if (!(p >= 2.0)) throw DomainError("h-chains need p >= 2");
  return fit_h_decay(draw_triples(m, ball, count, seed), p);
}

struct PCandidate {
  double p = 0;
  double rho = 0;
  double rho_p_upsilon = 0;
};

struct PSelection {
  double upsilon = 0;
  double p = 0;
  double margin = 0;  // 1/2 - rho^p upsilon
  double rho_used = 0;
  std::vector<PCandidate> candidates;

  nlohmann::json to_json() const {
    nlohmann::json c = nlohmann::json::array();
    for (const auto& k : candidates) c.push_back({{"p", k.p}, {"rho", k.rho}, {"rho_p_upsilon", k.rho_p_upsilon}});
    return {{"upsilon", upsilon}, {"candidates", c}, {"chosen_p", p}, {"rho", rho_used}, {"margin", margin}};
  }
};

struct SelectOptions {
  int grid_per_unit = 10;  // grid step 1/grid_per_unit
  double p_min = 2.0;
  double ceiling = 64.0;
  double safety = 0.25;  // require rho^p upsilon < safety (<= 1/2)
};

/// Smallest grid value p >= 2 with rho(p)^p * upsilon below the safety level.
inline PSelection select_p(double upsilon, const std::function<double(double)>& rho_of_p,
                           const SelectOptions& opt = {}) {
  if (!(opt.safety > 0 && opt.safety <= 0.5)) throw DomainError("safety level must lie in (0, 1/2]");
  if (!(upsilon > 0)) throw DomainError("upsilon must be positive");
  PSelection sel;
  sel.upsilon = upsilon;
  const int first = static_cast<int>(std::ceil(opt.p_min * opt.grid_per_unit - 1e-9));
  const int last = static_cast<int>(std::floor(opt.ceiling * opt.grid_per_unit + 1e-9));
  for (int k = first; k <= last; ++k) {
    const double p = static_cast<double>(k) / opt.grid_per_unit;
    if (p < 2.0) continue;
    const double rho = rho_of_p(p);
    const double value = rho < 1.0 ? std::pow(rho, p) * upsilon : std::numeric_limits<double>::infinity();
    sel.candidates.push_back({p, rho, value});
    if (value < opt.safety) {
      sel.p = p;
      sel.rho_used = rho;
      sel.margin = 0.5 - value;
      if (!(value < 0.5)) throw InvariantViolation("selected p violates rho^p upsilon < 1/2");
      return sel;
    }
  }
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : sel.candidates) best = std::min(best, c.rho_p_upsilon);
  throw SelectionError("no p <= " + std::to_string(opt.ceiling) + " satisfies rho^p upsilon < " +
                       std::to_string(opt.safety) + " (best " + std::to_string(best) + ", upsilon " +
                       std::to_string(upsilon) + ")");
}

/// sum_{n > R} C^p rho^{p(n-d)} upsilon^n = C^p rho^{-pd} (rho^p upsilon)^{R+1} / (1 - rho^p upsilon).
/// With rho = 0 every term with n > d vanishes and terms with n <= d use the
/// trivial bound C^p upsilon^n.
inline double tail_bound(double C, double rho, double p, double upsilon, int R, int d) {
  if (C < 0 || rho < 0 || rho >= 1 || p < 1 || upsilon <= 0) throw DomainError("invalid tail-bound parameters");
  const double r = std::pow(rho, p) * upsilon;
  if (!(r < 0.5)) throw DomainError("tail bound needs rho^p upsilon < 1/2");
  if (C == 0) return 0.0;
  if (rho == 0) {
    double s = 0;
    for (int n = std::max(R + 1, 0); n <= d; ++n) s += std::pow(C, p) * std::pow(upsilon, n);
    return s;
  }
  const double log_t = p * std::log(C) - p * d * std::log(rho) + (R + 1) * std::log(r) - std::log1p(-r);
  return std::exp(log_t);
}

}  // namespace hyplp
