#pragma once

// Invariant checks over finite ranges, each producing a serializable outcome,
// and the suite run by `hyplp verify`.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hyplp/analysis.hpp"
#include "hyplp/bicombing.hpp"
#include "hyplp/cayley.hpp"
#include "hyplp/chains.hpp"
#include "hyplp/cocycle.hpp"
#include "hyplp/config.hpp"
#include "hyplp/error.hpp"
#include "hyplp/group.hpp"
#include "hyplp/mineyev.hpp"

namespace hyplp {

struct CheckOutcome {
  std::string name;
  bool pass = true;
  std::uint64_t checked = 0;
  std::uint64_t skipped = 0;
  std::uint64_t failures = 0;
  nlohmann::json witness;  // first failure, null when none
  nlohmann::json info = nlohmann::json::object();

  void fail(nlohmann::json w) {
    pass = false;
    ++failures;
    if (witness.is_null()) witness = std::move(w);
  }

  nlohmann::json to_json() const {
    return {{"name", name},         {"pass", pass},       {"checked", checked}, {"skipped", skipped},
            {"failures", failures}, {"witness", witness}, {"info", info}};
  }
};

struct SuiteReport {
  nlohmann::json config;
  std::vector<CheckOutcome> checks;

  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckOutcome& c) { return c.pass; });
  }

  nlohmann::json to_json() const {
    nlohmann::json list = nlohmann::json::array();
    nlohmann::json first_failure;
    for (const auto& c : checks) {
      list.push_back(c.to_json());
      if (!c.pass && first_failure.is_null()) first_failure = {{"check", c.name}, {"witness", c.witness}};
    }
    return {{"config", config}, {"checks", list}, {"pass", pass()}, {"first_failure", first_failure}};
  }
};

/// Runs `body` and turns a library error into a failed outcome.
inline CheckOutcome guarded(std::string name, const std::function<void(CheckOutcome&)>& body) {
  CheckOutcome out;
  out.name = std::move(name);
  try {
    body(out);
  } catch (const InvariantViolation& e) {
    out.fail({{"error", e.what()}, {"witness", e.witness()}});
  } catch (const Error& e) {
    out.fail({{"error", e.what()}});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Element sampling

/// Uniformly random element of the ball.
inline const Element& random_vertex(const CayleyBall& ball, std::mt19937_64& rng) {
  return ball.vertex(std::uniform_int_distribution<std::size_t>(0, ball.size() - 1)(rng));
}

/// Random element of word length exactly `length`, grown one letter at a time.
inline Element random_element_of_length(const Group& group, int length, std::mt19937_64& rng) {
  Element g = group.identity();
  std::uniform_int_distribution<std::size_t> pick(0, group.generator_count() - 1);
  for (int attempts = 0; group.word_length(g) < length; ++attempts) {
    if (attempts > 64 * (length + 1)) throw DomainError("cannot grow a word to length " + std::to_string(length));
    Element next = group.right_multiply(g, static_cast<GenIndex>(pick(rng)));
    if (group.word_length(next) == group.word_length(g) + 1) g = std::move(next);
  }
  return g;
}

inline std::vector<Element> random_elements(const Group& group, int count, int min_length, int max_length,
                                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Element> out;
  for (int i = 0; i < count; ++i)
    out.push_back(random_element_of_length(group, std::uniform_int_distribution<int>(min_length, max_length)(rng), rng));
  return out;
}

/// s^k for k in [from, to].
inline std::vector<Element> generator_powers(const Group& group, GenIndex s, int from, int to) {
  std::vector<Element> out;
  Element g = group.identity();
  for (int k = 1; k <= to; ++k) {
    g = group.right_multiply(g, s);
    if (k >= from) out.push_back(g);
  }
  return out;
}

// ---------------------------------------------------------------------------
// group_oracle and cayley

/// Associativity and inverse laws on every triple of B(e, radius).
inline CheckOutcome check_group_laws(const Group& group, int radius) {
  return guarded("group_laws", [&](CheckOutcome& out) {
    const CayleyBall ball = build_ball(group, radius);
    const Element e = group.identity();
    for (const Element& x : ball.vertices()) {
      const Element xi = group.invert(x);
      if (group.multiply(x, xi) != e || group.multiply(xi, x) != e || group.invert(xi) != x)
        out.fail({{"law", "inverse"}, {"x", group.format(x)}});
      for (const Element& y : ball.vertices()) {
        Element xy;
        try {
          xy = group.multiply(x, y);
        } catch (const OutOfWindow&) {
          out.skipped += ball.size();
          continue;
        }
        for (const Element& z : ball.vertices()) {
          try {
            ++out.checked;
            if (group.multiply(xy, z) != group.multiply(x, group.multiply(y, z)))
              out.fail({{"law", "associativity"},
                        {"x", group.format(x)},
                        {"y", group.format(y)},
                        {"z", group.format(z)}});
          } catch (const OutOfWindow&) {
            --out.checked;
            ++out.skipped;
          }
        }
      }
    }
    out.info["radius"] = radius;
  });
}

/// BFS layers agree with word length, adjacency is symmetric, words are distinct.
inline CheckOutcome check_ball(const CayleyBall& ball) {
  return guarded("ball_bfs_consistency", [&](CheckOutcome& out) {
    const Group& group = ball.group();
    for (std::size_t h = 0; h < ball.size(); ++h) {
      ++out.checked;
      const Element& v = ball.vertex(h);
      if (ball.dist_from_e(h) != group.word_length(v)) out.fail({{"vertex", group.format(v)}, {"issue", "length"}});
      for (std::size_t s = 0; s < group.generator_count(); ++s) {
        const int n = ball.neighbor(h, static_cast<GenIndex>(s));
        if (n >= 0 && ball.neighbor(static_cast<std::size_t>(n), group.generator(static_cast<GenIndex>(s)).inverse) !=
                          static_cast<int>(h))
          out.fail({{"vertex", group.format(v)}, {"issue", "asymmetric edge"}, {"generator", s}});
      }
    }
    std::vector<Element> sorted(ball.vertices().begin(), ball.vertices().end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) out.fail({{"issue", "duplicate normal form"}});
    nlohmann::json spheres = nlohmann::json::array();
    for (int r = 0; r <= ball.radius(); ++r) spheres.push_back(ball.layer(r).size());
    out.info["sphere_sizes"] = spheres;
  });
}

namespace detail {

inline bool path_is_geodesic(const Group& group, const GeodesicPath& path, bool all_pairs) {
  const auto& v = path.vertices;
  if (v.front() != path.origin || v.back() != path.terminus) return false;
  if (distance(group, path.origin, path.terminus) != path.length()) return false;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (distance(group, v.front(), v[i]) != static_cast<int>(i)) return false;
    if (all_pairs)
      for (std::size_t j = i + 1; j < v.size(); ++j)
        if (distance(group, v[i], v[j]) != static_cast<int>(j - i)) return false;
  }
  return true;
}

}  // namespace detail

/// Geodesy and equivariance of q: exhaustive over B(e, exhaustive_radius)^3,
/// plus random triples from the ball.
inline CheckOutcome check_bicombing(const Bicombing& q, const CayleyBall& ball, int exhaustive_radius, int samples,
                                    std::uint64_t seed) {
  return guarded("bicombing_geodesic_equivariant", [&](CheckOutcome& out) {
    const Group& group = q.group();
    auto check = [&](const Element& g, const Element& a, const Element& b, bool all_pairs) {
      try {
        const GeodesicPath base = q.q_path(a, b);
        const GeodesicPath moved = q.q_path(group.multiply(g, a), group.multiply(g, b));
        ++out.checked;
        bool ok = detail::path_is_geodesic(group, base, all_pairs) && moved.vertices.size() == base.vertices.size();
        for (std::size_t i = 0; ok && i < base.vertices.size(); ++i)
          ok = moved.vertices[i] == group.multiply(g, base.vertices[i]);
        if (ok) ok = q.q_path(a, b).vertices == base.vertices;
        if (!ok) out.fail({{"g", group.format(g)}, {"a", group.format(a)}, {"b", group.format(b)}});
      } catch (const OutOfWindow&) {
        ++out.skipped;
      }
    };
    const std::size_t n = ball.ball_size(exhaustive_radius);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) check(ball.vertex(i), ball.vertex(j), ball.vertex(k), false);
    std::mt19937_64 rng(seed);
    for (int s = 0; s < samples; ++s) {
      const Element& g = random_vertex(ball, rng);
      const Element& a = random_vertex(ball, rng);
      const Element& b = random_vertex(ball, rng);
      check(g, a, b, true);
    }
    out.info["exhaustive_radius"] = exhaustive_radius;
  });
}

/// Sampled and exhaustive small-radius fineness of bicombing triangles.
inline CheckOutcome check_fineness(const CayleyBall& ball, const Bicombing& q, int samples, std::uint64_t seed,
                                   int exhaustive_radius) {
  return guarded("delta_fineness", [&](CheckOutcome& out) {
    const int delta = q.group().delta();
    const CertReport sampled = certify_delta(ball, q, delta, samples, seed);
    const CertReport exhaustive = certify_delta_exhaustive(ball, q, delta, exhaustive_radius);
    out.checked = static_cast<std::uint64_t>(sampled.samples - sampled.skipped + exhaustive.samples - exhaustive.skipped);
    out.skipped = static_cast<std::uint64_t>(sampled.skipped + exhaustive.skipped);
    out.info["sampled"] = sampled.to_json();
    out.info["exhaustive"] = exhaustive.to_json();
    if (!sampled.pass) out.fail({{"triangle", sampled.witness}, {"deviation", sampled.max_deviation}});
    if (!exhaustive.pass) out.fail({{"triangle", exhaustive.witness}, {"deviation", exhaustive.max_deviation}});
  });
}

// ---------------------------------------------------------------------------
// mineyev

struct FPairOutcomes {
  CheckOutcome convexity;
  CheckOutcome support;
};

/// For every ordered pair (b, a) of B(e, radius): f(b,a) is a convex
/// combination; its support lies in B(q[b,a](10d), d) n S(b, 10d) when
/// d(a,b) >= 10d, and f(b,a) = a when d(a,b) <= 10d.
inline FPairOutcomes check_f_pairs(const Mineyev& m, const CayleyBall& ball, int radius) {
  FPairOutcomes out;
  out.convexity.name = "f_convex_combination";
  out.support.name = "f_support_and_base_case";
  const Group& group = m.group();
  const int step = m.step();
  const std::size_t n = ball.ball_size(radius);
  for (const auto* o : {&out.convexity, &out.support}) const_cast<CheckOutcome*>(o)->info["radius"] = radius;
  try {
    for (std::size_t i = 0; i < n; ++i) {
      const Element& b = ball.vertex(i);
      for (std::size_t j = 0; j < n; ++j) {
        const Element& a = ball.vertex(j);
        Chain0 f;
        try {
          f = m.f_chain(b, a);
        } catch (const ExactnessError&) {
          ++out.convexity.skipped;
          ++out.support.skipped;
          continue;
        }
        auto witness = [&] { return nlohmann::json{{"b", group.format(b)}, {"a", group.format(a)}}; };
        ++out.convexity.checked;
        bool positive = !f.empty();
        for (const auto& t : f.terms()) positive = positive && !is_negative(t.second) && !is_zero(t.second);
        if (!positive || f.coefficient_sum() != 1) out.convexity.fail(witness());

        ++out.support.checked;
        const int d = distance(group, b, a);
        if (d <= step) {
          if (f != Chain0::point(a)) out.support.fail(witness());
        } else {
          const Element c = m.bicombing().q_point(b, a, step);
          for (const auto& [v, coeff] : f.terms())
            if (distance(group, b, v) != step || distance(group, c, v) > m.delta()) {
              out.support.fail(witness());
              break;
            }
        }
      }
    }
  } catch (const Error& e) {
    out.convexity.fail({{"error", e.what()}});
    out.support.fail({{"error", e.what()}});
  }
  return out;
}

/// f(g b, g a) = g . f(b, a) for every g in B(e, g_radius) against sampled
/// pairs, and for random triples drawn from the whole ball.
inline CheckOutcome check_equivariance(const Mineyev& m, const CayleyBall& ball, int g_radius, int pairs_per_g,
                                       int random_triples, std::uint64_t seed) {
  return guarded("f_equivariance", [&](CheckOutcome& out) {
    const Group& group = m.group();
    auto check = [&](const Element& g, const Element& b, const Element& a) {
      try {
        const Chain0 lhs = m.f_chain(group.multiply(g, b), group.multiply(g, a));
        const Chain0 rhs = translate(group, g, m.f_chain(b, a));
        ++out.checked;
        if (lhs != rhs) out.fail({{"g", group.format(g)}, {"b", group.format(b)}, {"a", group.format(a)}});
      } catch (const ExactnessError&) {
        ++out.skipped;
      } catch (const OutOfWindow&) {
        ++out.skipped;
      }
    };
    std::mt19937_64 rng(seed);
    const std::size_t ng = ball.ball_size(g_radius);
    for (std::size_t i = 0; i < ng; ++i)
      for (int k = 0; k < pairs_per_g; ++k) {
        const Element& b = random_vertex(ball, rng);
        const Element& a = random_vertex(ball, rng);
        check(ball.vertex(i), b, a);
      }
    for (int k = 0; k < random_triples; ++k) {
      const Element& g = random_vertex(ball, rng);
      const Element& b = random_vertex(ball, rng);
      const Element& a = random_vertex(ball, rng);
      check(g, b, a);
    }
    out.info["g_radius"] = g_radius;
  });
}

/// In a free group every flower is a singleton, so f(a,b) is the unit mass at
/// the vertex 10d along the geodesic. Compares the cached recursion at e, the
/// literal recursion at a, and that vertex found by scanning S(a, 10d).
inline CheckOutcome check_tree_closed_form(const Mineyev& m, int count, int min_distance, int max_distance,
                                           std::uint64_t seed) {
  return guarded("tree_closed_form", [&](CheckOutcome& out) {
    const Group& group = m.group();
    if (group.family() != Family::free_group) {
      out.info["skipped_reason"] = "closed form holds for free groups only";
      return;
    }
    const int step = m.step();
    const CayleyBall sphere_ball = build_ball(group, step);
    const auto layer = sphere_ball.layer(step);
    std::mt19937_64 rng(seed);
    for (int k = 0; k < count; ++k) {
      const Element a = random_element_of_length(group, std::uniform_int_distribution<int>(0, 10)(rng), rng);
      const int d = std::uniform_int_distribution<int>(min_distance, max_distance)(rng);
      const Element b = group.multiply(a, random_element_of_length(group, d, rng));
      if (distance(group, a, b) != d) {
        ++out.skipped;
        continue;
      }
      std::optional<Element> target;
      int found = 0;
      for (const Element& u : layer) {
        Element v = group.multiply(a, u);
        if (distance(group, v, b) == d - step) {
          ++found;
          target = std::move(v);
        }
      }
      ++out.checked;
      const auto witness = nlohmann::json{{"a", group.format(a)}, {"b", group.format(b)}};
      if (found != 1) {
        out.fail(witness);
        continue;
      }
      const Chain0 expected = Chain0::point(*target);
      if (m.f_chain(a, b) != expected || m.f_chain_literal(a, b) != expected) out.fail(witness);
    }
  });
}

/// Recomputes a fraction of the memoized chains.
inline CheckOutcome check_cache_audit(const Mineyev& m, double fraction, std::uint64_t seed) {
  return guarded("cache_coherence", [&](CheckOutcome& out) {
    const CacheAudit audit = audit_cache(m, fraction, seed);
    out.checked = audit.checked;
    for (const auto& w : audit.witnesses) out.fail({{"key", w}});
    if (m.cache()) {
      out.info["entries"] = m.cache()->size();
      out.info["hits"] = m.cache()->hits();
      out.info["misses"] = m.cache()->misses();
    }
  });
}

// ---------------------------------------------------------------------------
// cocycle

/// b(gk) = pi(g) b(k) + b(g) pointwise on the window, with exact zero residual.
/// The first pairs are the degenerate cases k = e and g = k^-1.
inline CheckOutcome check_cocycle_identity(const Cocycle& c, const CayleyBall& window, int element_radius, int pairs,
                                           std::uint64_t seed) {
  return guarded("cocycle_identity", [&](CheckOutcome& out) {
    const Group& group = c.mineyev().group();
    const CayleyBall pool = build_ball(group, element_radius);
    std::mt19937_64 rng(seed);
    for (int i = 0; i < pairs; ++i) {
      const Element g = random_vertex(pool, rng);
      Element k = random_vertex(pool, rng);
      if (i == 0) k = group.identity();
      if (i == 1) k = group.invert(g);
      const IdentityReport r = c.verify_cocycle_identity(g, k, window.vertices());
      out.checked += r.checked;
      if (r.nonzero)
        out.fail({{"g", group.format(g)}, {"k", group.format(k)}, {"gamma", group.format(*r.witness)},
                  {"nonzero", r.nonzero}});
    }
    out.info["window_radius"] = window.radius();
    out.info["pairs"] = pairs;
  });
}

/// Supports of h(gamma,g) and h(gamma,e) are disjoint for every admissible
/// gamma on q[g,e].
inline CheckOutcome check_disjoint_support(const Cocycle& c, const std::vector<Element>& gs) {
  return guarded("disjoint_support", [&](CheckOutcome& out) {
    const Group& group = c.mineyev().group();
    for (const Element& g : gs) {
      const GeodesicPath path = c.mineyev().bicombing().q_path(g, group.identity());
      for (const Element& gamma : path.vertices) {
        if (!c.is_admissible(g, gamma)) continue;
        ++out.checked;
        if (!c.disjoint_support_check(g, gamma)) out.fail({{"g", group.format(g)}, {"gamma", group.format(gamma)}});
      }
    }
    out.info["elements"] = gs.size();
  });
}

/// Exact ||b(g)||^p against 2(d - 20d - 1) and the admissible count against
/// d - 20d - 1 and d - 100d.
inline CheckOutcome check_properness(const Cocycle& c, const std::vector<Element>& gs) {
  return guarded("properness", [&](CheckOutcome& out) {
    const Group& group = c.mineyev().group();
    const int delta = group.delta();
    nlohmann::json rows = nlohmann::json::array();
    for (const Element& g : gs) {
      const int d = group.word_length(g);
      const CocycleNorm norm = c.cocycle_norm_exact(g);
      const PropernessCount pc = c.properness_count(g);
      const double sharp = 2.0 * std::max(0, d - 20 * delta - 1);
      ++out.checked;
      const bool ok = norm.lower >= sharp && pc.count >= d - 20 * delta - 1 && pc.count >= d - 100 * delta &&
                      norm.lower >= d - 100 * delta;
      rows.push_back({{"g", group.format(g)}, {"d", d}, {"lower", norm.lower}, {"count", pc.count}});
      if (!ok) out.fail(rows.back());
    }
    out.info["rows"] = rows;
  });
}

/// lower <= exact <= lower + tail for the centered-ball window.
inline CheckOutcome check_tail_bracket(const Cocycle& c, const CayleyBall& window, const TailModel& tail,
                                       const std::vector<Element>& gs) {
  return guarded("tail_bound_bracket", [&](CheckOutcome& out) {
    const Group& group = c.mineyev().group();
    nlohmann::json rows = nlohmann::json::array();
    for (const Element& g : gs) {
      const double exact = c.cocycle_norm_exact(g).lower;
      const CocycleNorm w = c.cocycle_norm_windowed(g, window, tail);
      // Both sides are float sums of the same per-gamma terms in different orders.
      const double slack = 1e-9 * std::max(1.0, exact);
      ++out.checked;
      rows.push_back({{"g", group.format(g)}, {"exact", exact}, {"lower", w.lower}, {"tail_bound", w.tail_bound}});
      if (!(w.lower <= exact + slack && exact <= w.lower + w.tail_bound + slack)) out.fail(rows.back());
    }
    out.info["window_radius"] = window.radius();
    out.info["rows"] = rows;
  });
}

// ---------------------------------------------------------------------------
// analysis

struct DecayStudy {
  double upsilon = 0;
  DecayFit f_fit;
  PSelection selection;
  DecayFit h_fit;  // at the selected p
  std::vector<std::pair<double, std::size_t>> coverage;  // (p, samples covered) per candidate
  std::size_t sample_count = 0;
};

/// Draws one set of triples, fits (L, lambda), then selects p with a fresh
/// (C, rho) fit for every candidate.
inline DecayStudy study_decay(const Mineyev& m, const CayleyBall& ball, int samples, std::uint64_t seed,
                              const SelectOptions& options = {}) {
  DecayStudy s;
  s.upsilon = estimate_upsilon(ball);
  const auto triples = draw_triples(m, ball, samples, seed);
  s.sample_count = triples.size();
  s.f_fit = fit_f_decay(triples);
  s.selection = select_p(
      s.upsilon,
      [&](double p) {
        DecayFit fit = fit_h_decay(triples, p);
        s.coverage.emplace_back(p, fit.covered());
        return fit.base;
      },
      options);
  s.h_fit = fit_h_decay(triples, s.selection.p);
  return s;
}

inline CheckOutcome check_decay(const DecayStudy& s) {
  CheckOutcome out;
  out.name = "decay_fits_and_p";
  out.checked = s.sample_count;
  if (!(s.f_fit.base < 1.0) || s.f_fit.covered() != s.f_fit.samples.size())
    out.fail({{"fit", "f"}, {"base", s.f_fit.base}});
  for (const auto& [p, covered] : s.coverage)
    if (covered != s.sample_count) out.fail({{"fit", "h"}, {"p", p}, {"covered", covered}});
  const double value = std::pow(s.selection.rho_used, s.selection.p) * s.upsilon;
  if (!(value < 0.5) || !(s.selection.p >= 2.0)) out.fail({{"selection", s.selection.to_json()}});
  out.info["f_fit"] = s.f_fit.to_json();
  out.info["h_fit"] = s.h_fit.to_json();
  out.info["selection"] = s.selection.to_json();
  return out;
}

// ---------------------------------------------------------------------------
// Per-element cocycle summary

struct CocycleRow {
  Element g;
  int d = 0;
  double p = 2;
  double lower = 0;
  double tail_bound = 0;
  bool exact = false;
  int properness_count = 0;
  bool bound_20delta_ok = false;
  bool bound_100delta_ok = false;

  nlohmann::json to_json(const Group& group) const {
    return {{"g", group.format(g)}, {"d_g_e", d},          {"p", p},
            {"lower", lower},       {"tail_bound", tail_bound}, {"exact", exact},
            {"properness_count", properness_count}, {"paper_bound_ok", bound_100delta_ok},
            {"bound_20delta_ok", bound_20delta_ok}};
  }
};

/// Exact norm on the geodesic neighborhood when geodesics are unique,
/// otherwise the centered window plus the tail bound from `tail`.
inline CocycleRow cocycle_row(const Cocycle& c, const Element& g, const CayleyBall* window,
                              const std::optional<TailModel>& tail) {
  const Group& group = c.mineyev().group();
  const int delta = group.delta();
  CocycleRow row;
  row.g = g;
  row.d = group.word_length(g);
  row.p = c.p();
  if (group.has_unique_geodesics()) {
    row.lower = c.cocycle_norm_exact(g).lower;
    row.exact = true;
  } else {
    if (!window || !tail) throw ConfigError("a non-exact cocycle norm needs a window and a tail model");
    const CocycleNorm n = c.cocycle_norm_windowed(g, *window, *tail);
    row.lower = n.lower;
    row.tail_bound = n.tail_bound;
  }
  row.properness_count = c.properness_count(g).count;
  const int sharp = row.d - 20 * delta - 1;
  row.bound_20delta_ok = row.lower >= 2.0 * std::max(0, sharp) && row.properness_count >= sharp;
  row.bound_100delta_ok = row.lower >= row.d - 100 * delta;
  return row;
}

// ---------------------------------------------------------------------------
// Suite

struct Context {
  Group group;
  std::unique_ptr<Bicombing> q;
  std::unique_ptr<ChainCache> cache;
  std::unique_ptr<Mineyev> m;

  explicit Context(const RunConfig& config)
      : group(make_group(config.group, config.delta)),
        q(std::make_unique<Bicombing>(group, generator_order(group, config.gen_order))),
        cache(std::make_unique<ChainCache>()),
        m(std::make_unique<Mineyev>(*q, cache.get())) {}
};

/// The suite behind `hyplp verify`. Sizes scale with the configured radius
/// and sample count; explicit balls skip checks that need unique geodesics.
inline SuiteReport run_verify(const RunConfig& config) {
  config.validate();
  SuiteReport report;
  report.config = config.to_json();
  const Context ctx(config);
  const Group& group = ctx.group;
  const Mineyev& m = *ctx.m;
  const CayleyBall ball = build_ball(group, config.radius, config.memory_budget_mb);
  const std::uint64_t seed = config.seed;
  const int samples = config.samples;
  const bool builtin = group.has_unique_geodesics();
  // Explicit balls: f(gb, ga) with g, b, a in B(e,r) touches B(e, 4r + delta).
  std::optional<CayleyBall> inner;
  if (!builtin) inner.emplace(build_ball(group, std::max(0, (config.radius - config.delta) / 4)));
  const CayleyBall& sample_ball = inner ? *inner : ball;

  report.checks.push_back(check_group_laws(group, std::min(3, config.radius)));
  report.checks.push_back(check_ball(ball));
  report.checks.push_back(check_bicombing(*ctx.q, ball, std::min(2, config.radius), samples, split_seed(seed, 1)));
  report.checks.push_back(check_fineness(ball, *ctx.q, samples, split_seed(seed, 2), std::min(4, config.radius)));

  const int pair_radius = builtin ? std::min(5, config.radius / 2) : std::max(0, (config.radius - config.delta) / 3);
  FPairOutcomes fp = check_f_pairs(m, ball, pair_radius);
  report.checks.push_back(std::move(fp.convexity));
  report.checks.push_back(std::move(fp.support));
  report.checks.push_back(check_equivariance(m, sample_ball, std::min(2, config.radius), 4, samples, split_seed(seed, 3)));
  if (builtin) report.checks.push_back(check_tree_closed_form(m, std::min(samples, 100), m.step(), 3 * m.step(), split_seed(seed, 4)));

  std::optional<DecayStudy> study;
  report.checks.push_back(guarded("decay_fits_and_p", [&](CheckOutcome& out) {
    study = study_decay(m, sample_ball, samples, split_seed(seed, 5));
    out = check_decay(*study);
  }));
  const double p = config.p ? *config.p : (study ? study->selection.p : 2.0);

  if (builtin) {
    const Cocycle c(m, p);
    const CayleyBall window = build_ball(group, std::min(config.radius, 8), config.memory_budget_mb);
    report.checks.push_back(
        check_cocycle_identity(c, window, std::min(3, config.radius), std::max(2, samples / 500), split_seed(seed, 6)));
    const int step = m.step();
    std::vector<Element> gs = generator_powers(group, 0, 2 * step, 2 * step + 2);
    for (const Element& g : random_elements(group, 4, 2 * step, 2 * step + 3, split_seed(seed, 7))) gs.push_back(g);
    report.checks.push_back(check_disjoint_support(c, gs));
    report.checks.push_back(check_properness(c, {gs.front(), gs.back()}));
    if (study) {
      const TailModel tail{study->h_fit.constant, study->h_fit.base, study->upsilon};
      report.checks.push_back(guarded("tail_bound_bracket", [&](CheckOutcome& out) {
        const Cocycle ct(m, study->selection.p);
        out = check_tail_bracket(ct, window, tail, random_elements(group, 3, 1, 6, split_seed(seed, 8)));
      }));
    }
  }
  report.checks.push_back(check_cache_audit(m, 0.01, split_seed(seed, 9)));
  return report;
}

}  // namespace hyplp
