#pragma once

// The vector eta(gamma) = h(gamma, e), the isometric action
// (pi(g) xi)(gamma) = g . xi(g^-1 gamma), and the cocycle
// b(g) = pi(g) eta - eta, whose value at gamma is h(gamma, g) - h(gamma, e).

#include <algorithm>
#include <cmath>
#include <deque>
#include <exception>
#include <iterator>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "hyplp/analysis.hpp"
#include "hyplp/bicombing.hpp"
#include "hyplp/cayley.hpp"
#include "hyplp/chains.hpp"
#include "hyplp/error.hpp"
#include "hyplp/mineyev.hpp"

namespace hyplp {

/// Runs body(begin, end, chunk) over [0, n) in fixed chunks across hardware
/// threads. Chunk boundaries do not depend on the thread count.
template <class Body>
void parallel_chunks(std::size_t n, std::size_t chunk_size, Body body) {
  const std::size_t chunks = (n + chunk_size - 1) / chunk_size;
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), chunks));
  auto run = [&](std::size_t w) {
    for (std::size_t c = w; c < chunks; c += workers) body(c * chunk_size, std::min(n, (c + 1) * chunk_size), c);
  };
  if (workers == 1) {
    run(0);
    return;
  }
  std::vector<std::thread> threads;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (std::size_t w = 0; w < workers; ++w)
    threads.emplace_back([&, w] {
      try {
        run(w);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

/// Signed sum of (possibly translated) h-chains, kept exact at the level of
/// f: terms whose chains share a coefficient multiset share a normalizer and
/// are accumulated as exact rationals.
class HSum {
 public:
  HSum() = default;
  HSum(HSum&&) noexcept = default;
  HSum& operator=(HSum&&) noexcept = default;
  HSum(const HSum&) = delete;
  HSum& operator=(const HSum&) = delete;

  void add(HChain h, int sign) {
    const HChain& kept = chains_.emplace_back(std::move(h));
    auto& pending = class_for(kept).pending;
    for (const auto& t : kept.f.terms()) pending.push_back({t.first, &t.second, sign});
  }

  void add_translated(const Group& group, const Element& g, HChain h, int sign) {
    const HChain& kept = chains_.emplace_back(std::move(h));
    auto& pending = class_for(kept).pending;
    for (const auto& t : kept.f.terms()) pending.push_back({group.multiply(g, t.first), &t.second, sign});
  }

  /// True when every normalizer class cancels exactly.
  bool is_zero() const {
    return std::all_of(groups_.begin(), groups_.end(), [](const Class& c) { return c.cancels(); });
  }

  RealChain real() const {
    RealChain out;
    for (const auto& c : groups_) out += to_real(c.sum()).scaled(1.0 / c.rep->normalizer);
    return out;
  }

 private:
  struct Term {
    Element v;
    const Rational* coeff;
    int sign;
    Rational value() const { return sign > 0 ? *coeff : Rational(-*coeff); }
  };

  struct Class {
    const HChain* rep;
    std::vector<Term> pending;

    Chain0 sum() const {
      std::vector<Chain0::Term> terms;
      terms.reserve(pending.size());
      for (const auto& t : pending) terms.emplace_back(t.v, t.value());
      return Chain0::from_terms(std::move(terms));
    }

    bool cancels() const {
      std::vector<const Term*> order;
      order.reserve(pending.size());
      bool integral = true;
      for (const auto& t : pending) {
        order.push_back(&t);
        const auto* q = t.coeff->backend().data();
        integral = integral && mpz_cmp_ui(mpq_denref(q), 1) == 0 && mpz_fits_slong_p(mpq_numref(q));
      }
      std::sort(order.begin(), order.end(), [](const Term* x, const Term* y) { return x->v < y->v; });
      for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        if (integral) {
          __int128 total = 0;
          for (; j < order.size() && order[j]->v == order[i]->v; ++j)
            total += static_cast<__int128>(order[j]->sign) * mpz_get_si(mpq_numref(order[j]->coeff->backend().data()));
          if (total != 0) return false;
        } else {
          Rational total = 0;
          for (; j < order.size() && order[j]->v == order[i]->v; ++j) total += order[j]->value();
          if (!hyplp::is_zero(total)) return false;
        }
        i = j;
      }
      return true;
    }
  };

  Class& class_for(const HChain& h) {
    auto it = std::find_if(groups_.begin(), groups_.end(),
                           [&](const Class& c) { return c.rep->key == h.key; });
    if (it != groups_.end()) return *it;
    groups_.push_back({&h, {}});
    return groups_.back();
  }

  std::deque<HChain> chains_;  // stable storage for the referenced coefficients
  std::vector<Class> groups_;
};

/// Finitely supported element of X = l^p(Gamma, l^p(Gamma)).
using WindowedVector = std::vector<std::pair<Element, RealChain>>;

/// (pi(g) xi)(gamma) = g . xi(g^-1 gamma)
inline WindowedVector apply_pi(const Group& group, const Element& g, const WindowedVector& xi) {
  WindowedVector out;
  out.reserve(xi.size());
  for (const auto& [gamma, chain] : xi) out.emplace_back(group.multiply(g, gamma), translate(group, g, chain));
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  return out;
}

inline double norm_p_pow(const WindowedVector& xi, double p) {
  double s = 0;
  for (const auto& [gamma, chain] : xi) s += norm_p_pow(chain, p);
  return s;
}

enum class WindowKind { geodesic_neighborhood, centered_ball };

struct CocycleWindow {
  WindowKind kind = WindowKind::geodesic_neighborhood;
  int radius = 0;               // neighborhood radius, or R for a centered ball
  std::size_t size = 0;         // number of gamma evaluated
  double p = 2;
  /// Nonzero values b(g)(gamma) = h(gamma,g) - h(gamma,e), sorted by gamma.
  std::vector<std::pair<Element, RealChain>> values;
  double partial_norm_p_pow = 0;
  double tail_bound = 0;
  bool exact = false;
};

struct CocycleNorm {
  double lower = 0;
  double tail_bound = 0;
  CocycleWindow window;
};

struct IdentityReport {
  std::size_t checked = 0;
  std::size_t nonzero = 0;
  std::optional<Element> witness;
};

struct PropernessCount {
  int admissible = 0;  // gamma on q[g,e] with d(gamma,e), d(gamma,g) >= 10 delta
  int count = 0;       // of those, gamma with disjoint supports
};

/// Constants for the windowed (non-exact) cocycle norm.
struct TailModel {
  double C = 0;
  double rho = 0;
  double upsilon = 1;
};

class Cocycle {
 public:
  Cocycle(const Mineyev& m, double p) : m_(m), group_(m.group()), p_(p) {
    if (!(p >= 2.0)) throw DomainError("the cocycle is built for p >= 2");
  }

  double p() const noexcept { return p_; }
  const Mineyev& mineyev() const noexcept { return m_; }

  /// eta(gamma) = h(gamma, e)
  HChain eta_at(const Element& gamma) const { return m_.h_chain(gamma, group_.identity(), p_); }

  /// b(g)(gamma) = h(gamma, g) - h(gamma, e), exact at the f level.
  HSum b_at_exact(const Element& g, const Element& gamma) const {
    HSum s;
    s.add(m_.h_chain(gamma, g, p_), +1);
    s.add(m_.h_chain(gamma, group_.identity(), p_), -1);
    return s;
  }

  RealChain b_at(const Element& g, const Element& gamma) const { return b_at_exact(g, gamma).real(); }

  /// ||b(g)(gamma)||_p^p, evaluated at base point e via equivariance.
  double b_norm_p_pow(const Element& g, const Element& gamma) const {
    const Element w = group_.invert(gamma);
    const Chain0 fe = m_.f_from_identity(w);
    const Chain0 fg = m_.f_from_identity(group_.multiply(w, g));
    if (fe.size() == 1 && fg.size() == 1 && fe.terms().front().first != fg.terms().front().first) return 2.0;
    if (fe == fg) return 0.0;
    return h_difference_norm_p_pow(normalize(fg, p_), normalize(fe, p_), p_);
  }

  /// Vertices within `radius` of q[g,e], each listed once.
  ///
  /// With unique geodesics the Cayley graph is a tree of cliques and lines,
  /// so j -> d(gamma, v_j) is convex along the path v_0 = g, ..., v_d = e.
  /// Hence gamma = v_i u with |u| <= radius is new at index i exactly when
  /// i = 0 or d(gamma, v_{i-1}) > radius, and no hashing is needed.
  std::vector<Element> geodesic_neighborhood(const Element& g, int radius) const {
    if (!group_.has_unique_geodesics()) return neighborhood_by_bfs(g, radius);
    const GeodesicPath path = m_.bicombing().q_path(g, group_.identity());
    const CayleyBall ball = build_ball(group_, radius);
    const Element::Word steps = m_.bicombing().canonical_word(group_.invert(g));
    std::vector<Element> out;
    out.reserve(path.vertices.size() * ball.size());
    for (std::size_t i = 0; i < path.vertices.size(); ++i) {
      const Element& v = path.vertices[i];
      for (const Element& u : ball.vertices()) {
        if (i > 0 && group_.length_after_left_multiply(steps[i - 1], u) <= radius) continue;
        out.push_back(group_.multiply(v, u));
      }
    }
    return out;
  }

  /// Multi-source BFS from the vertices of q[g,e]; valid for every family.
  std::vector<Element> neighborhood_by_bfs(const Element& g, int radius) const {
    const GeodesicPath path = m_.bicombing().q_path(g, group_.identity());
    std::vector<Element> order(path.vertices.begin(), path.vertices.end());
    std::unordered_set<Element, ElementHash> seen(order.begin(), order.end());
    std::size_t begin = 0;
    for (int r = 0; r < radius; ++r) {
      const std::size_t end = order.size();
      for (std::size_t i = begin; i < end; ++i)
        for (std::size_t s = 0; s < group_.generator_count(); ++s) {
          Element n = group_.right_multiply(order[i], static_cast<GenIndex>(s));
          if (seen.insert(n).second) order.push_back(std::move(n));
        }
      begin = end;
    }
    return order;
  }

  /// Exact ||b(g)||_p^p for families with unique geodesics. There b(g)(gamma)
  /// vanishes unless q[gamma,e] and q[gamma,g] part within 10*delta steps,
  /// which confines the support to the 10*delta-neighborhood of q[g,e].
  CocycleNorm cocycle_norm_exact(const Element& g, std::optional<int> radius = std::nullopt,
                                 bool keep_values = false) const {
    if (!group_.has_unique_geodesics())
      throw ExactnessError("exact cocycle norms need a family with unique geodesics");
    const int r = radius.value_or(m_.step());
    if (r < m_.step())
      throw ExactnessError("window radius " + std::to_string(r) + " misses part of the support (needs " +
                           std::to_string(m_.step()) + ")");
    CocycleNorm out;
    out.window.kind = WindowKind::geodesic_neighborhood;
    out.window.radius = r;
    evaluate(g, geodesic_neighborhood(g, r), keep_values, out);
    out.window.exact = true;
    return out;
  }

  /// Sum over the centered ball B(e,R) plus a tail bound from fitted constants.
  CocycleNorm cocycle_norm_windowed(const Element& g, const CayleyBall& ball, const TailModel& tail,
                                    bool keep_values = false) const {
    if (!(std::pow(tail.rho, p_) * tail.upsilon < 0.5))
      throw SelectionError("rho^p upsilon >= 1/2; choose a larger p");
    CocycleNorm out;
    out.window.kind = WindowKind::centered_ball;
    out.window.radius = ball.radius();
    evaluate(g, std::vector<Element>(ball.vertices().begin(), ball.vertices().end()), keep_values, out);
    out.window.tail_bound = out.tail_bound =
        tail_bound(tail.C, tail.rho, p_, tail.upsilon, ball.radius(), group_.word_length(g));
    out.window.exact = false;
    return out;
  }

  bool is_admissible(const Element& g, const Element& gamma) const {
    return distance(group_, gamma, group_.identity()) >= m_.step() && distance(group_, gamma, g) >= m_.step();
  }

  /// supp h(gamma,g) and supp h(gamma,e) are disjoint for admissible gamma on q[g,e].
  bool disjoint_support_check(const Element& g, const Element& gamma) const {
    const GeodesicPath path = m_.bicombing().q_path(g, group_.identity());
    if (std::find(path.vertices.begin(), path.vertices.end(), gamma) == path.vertices.end())
      throw DomainError("gamma does not lie on q[g,e]");
    if (!is_admissible(g, gamma)) throw DomainError("gamma is within 10*delta of an endpoint of q[g,e]");
    return supports_disjoint(g, gamma);
  }

  PropernessCount properness_count(const Element& g) const {
    PropernessCount out;
    const GeodesicPath path = m_.bicombing().q_path(g, group_.identity());
    for (const Element& gamma : path.vertices) {
      if (!is_admissible(g, gamma)) continue;
      ++out.admissible;
      if (supports_disjoint(g, gamma)) {
        if (b_norm_p_pow(g, gamma) < 1.0 - 1e-12)
          throw InvariantViolation("disjoint unit vectors at distance below 1", group_.format(gamma));
        ++out.count;
      }
    }
    return out;
  }

  /// Checks b(gk)(gamma) = g.b(k)(g^-1 gamma) + b(g)(gamma) for each gamma in the window.
  IdentityReport verify_cocycle_identity(const Element& g, const Element& k, std::span<const Element> window) const {
    const Element e = group_.identity();
    const Element gk = group_.multiply(g, k);
    const Element g_inv = group_.invert(g);
    constexpr std::size_t kChunk = 2048;
    const std::size_t chunks = (window.size() + kChunk - 1) / kChunk;
    std::vector<std::size_t> nonzero(chunks, 0);
    std::vector<std::optional<std::size_t>> first(chunks);
    parallel_chunks(window.size(), kChunk, [&](std::size_t begin, std::size_t end, std::size_t c) {
      for (std::size_t i = begin; i < end; ++i) {
        const Element& gamma = window[i];
        const Element moved = group_.multiply(g_inv, gamma);
        const HChain h_e = m_.h_chain(gamma, e, p_);
        HSum residual;
        residual.add(m_.h_chain(gamma, gk, p_), +1);
        residual.add(h_e, -1);
        residual.add_translated(group_, g, m_.h_chain(moved, k, p_), -1);
        residual.add_translated(group_, g, m_.h_chain(moved, e, p_), +1);
        residual.add(m_.h_chain(gamma, g, p_), -1);
        residual.add(h_e, +1);
        if (!residual.is_zero()) {
          ++nonzero[c];
          if (!first[c]) first[c] = i;
        }
      }
    });
    IdentityReport report;
    report.checked = window.size();
    for (std::size_t c = 0; c < chunks; ++c) {
      report.nonzero += nonzero[c];
      if (!report.witness && first[c]) report.witness = window[*first[c]];
    }
    return report;
  }

 private:
  bool supports_disjoint(const Element& g, const Element& gamma) const {
    const auto a = m_.f_chain(gamma, g).support();
    const auto b = m_.f_chain(gamma, group_.identity()).support();
    std::vector<Element> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    return common.empty();
  }

  void evaluate(const Element& g, const std::vector<Element>& window, bool keep_values, CocycleNorm& out) const {
    constexpr std::size_t kChunk = 4096;
    const std::size_t chunks = (window.size() + kChunk - 1) / kChunk;
    std::vector<double> partial(chunks, 0.0);
    std::vector<std::vector<std::pair<Element, RealChain>>> kept(keep_values ? chunks : 0);
    parallel_chunks(window.size(), kChunk, [&](std::size_t begin, std::size_t end, std::size_t c) {
      double s = 0;
      for (std::size_t i = begin; i < end; ++i) {
        const double v = b_norm_p_pow(g, window[i]);
        if (v == 0) continue;
        s += v;
        if (keep_values) kept[c].emplace_back(window[i], b_at(g, window[i]));
      }
      partial[c] = s;
    });
    double total = 0;
    for (double s : partial) total += s;
    out.lower = total;
    out.window.size = window.size();
    out.window.p = p_;
    out.window.partial_norm_p_pow = total;
    for (auto& k : kept)
      for (auto& v : k) out.window.values.push_back(std::move(v));
    std::sort(out.window.values.begin(), out.window.values.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
  }

  const Mineyev& m_;
  Group group_;
  double p_;
};

}  // namespace hyplp
