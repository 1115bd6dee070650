#pragma once

// Averaged 0-chains f(a,b) and their l^p normalizations h(b,a).
//
// f is defined by recursion on d(a,b) in steps of 10*delta:
//   d <= 10d            : f(a,b) = b
//   d  > 10d, not k*10d : f(a,b) = f(a, pr_a(b))
//   d  = k*10d > 10d    : f(a,b) = mean over x in Fl(a,b) of f(a, pr_a(x))
// where Fl(v,w) = S(v, d(v,w)) n B(w, delta) and pr_a(b) is the point of
// q[a,b] at the largest multiple of 10*delta strictly below d(a,b).

#include <array>
#include <cmath>
#include <mutex>
#include <optional>
#include <random>
#include <unordered_map>
#include <vector>

#include "hyplp/bicombing.hpp"
#include "hyplp/cayley.hpp"
#include "hyplp/chains.hpp"
#include "hyplp/error.hpp"
#include "hyplp/group.hpp"

namespace hyplp {

struct FlowerSet {
  Element viewpoint;
  Element center;
  std::vector<Element> members;
};

/// Memo of f(e, x) keyed by x. Sharded so concurrent evaluations rarely
/// contend; a key may be computed twice but always to the same value.
class ChainCache {
 public:
  explicit ChainCache(std::size_t capacity = std::size_t{1} << 20) : capacity_(capacity) {}

  std::optional<Chain0> find(const Element& key) const {
    auto& shard = shard_for(key);
    std::lock_guard lock(shard.mutex);
    if (auto it = shard.map.find(key); it != shard.map.end()) {
      ++shard.hits;
      return it->second;
    }
    ++shard.misses;
    return std::nullopt;
  }

  void insert(const Element& key, const Chain0& value) {
    auto& shard = shard_for(key);
    std::lock_guard lock(shard.mutex);
    if (shard.map.size() * kShards < capacity_) shard.map.emplace(key, value);
  }

  std::size_t hits() const { return sum([](const Shard& s) { return s.hits; }); }
  std::size_t misses() const { return sum([](const Shard& s) { return s.misses; }); }
  std::size_t size() const { return sum([](const Shard& s) { return s.map.size(); }); }

  /// Snapshot of cached entries in key order.
  std::vector<std::pair<Element, Chain0>> entries() const {
    std::vector<std::pair<Element, Chain0>> out;
    for (const auto& s : shards_) {
      std::lock_guard lock(s.mutex);
      out.insert(out.end(), s.map.begin(), s.map.end());
    }
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    return out;
  }

 private:
  static constexpr std::size_t kShards = 16;
  struct Shard {
    mutable std::mutex mutex;
    std::unordered_map<Element, Chain0, ElementHash> map;
    mutable std::size_t hits = 0;
    mutable std::size_t misses = 0;
  };

  Shard& shard_for(const Element& key) const { return shards_[ElementHash{}(key) % kShards]; }

  template <class F>
  std::size_t sum(F f) const {
    std::size_t total = 0;
    for (const auto& s : shards_) {
      std::lock_guard lock(s.mutex);
      total += f(s);
    }
    return total;
  }

  std::size_t capacity_;
  mutable std::array<Shard, kShards> shards_;
};

/// f(b,a) / ||f(b,a)||_p, kept as the exact chain plus its normalizer.
struct HChain {
  Chain0 f;
  double p = 2.0;
  double normalizer = 1.0;
  /// Sorted |coefficients| of f; the normalizer is a function of this multiset.
  std::vector<Rational> key;
  /// sum |c|^p, exactly, when p is an integer.
  std::optional<Rational> exact_norm_pow;

  RealChain real() const { return to_real(f).scaled(1.0 / normalizer); }
};

inline Rational rational_pow(Rational base, unsigned exponent) {
  Rational result = 1;
  while (exponent) {
    if (exponent & 1u) result *= base;
    base *= base;
    exponent >>= 1u;
  }
  return result;
}

inline HChain normalize(Chain0 f, double p) {
  if (f.empty()) throw DomainError("cannot normalize the zero chain");
  HChain h;
  h.p = p;
  if (f.size() == 1) {
    // A single coefficient c normalizes to sign(c).
    const Rational& c = f.terms().front().second;
    h.key.push_back(is_negative(c) ? Rational(-c) : c);
    const bool unit = h.key.front() == 1;
    h.normalizer = unit ? 1.0 : static_cast<double>(h.key.front());
    if (p == std::floor(p) && p <= 256)
      h.exact_norm_pow = unit ? h.key.front() : rational_pow(h.key.front(), static_cast<unsigned>(p));
  } else {
    h.key.reserve(f.size());
    for (const auto& t : f.terms()) h.key.push_back(abs(t.second));
    std::sort(h.key.begin(), h.key.end());
    h.normalizer = norm_p(f, p);
    if (p == std::floor(p) && p <= 256) {
      Rational s = 0;
      for (const auto& c : h.key) s += rational_pow(c, static_cast<unsigned>(p));
      h.exact_norm_pow = s;
    }
  }
  h.f = std::move(f);
  return h;
}

/// ||x - y||_p^p for two normalized chains. When both share a coefficient
/// multiset the difference is formed exactly before dividing.
inline double h_difference_norm_p_pow(const HChain& x, const HChain& y, double p) {
  if (x.f.size() == 1 && y.f.size() == 1) {
    const auto& [vx, cx] = x.f.terms().front();
    const auto& [vy, cy] = y.f.terms().front();
    if (vx != vy) return 2.0;
    if (x.key == y.key && is_negative(cx) == is_negative(cy)) return 0.0;
  }
  if (x.key == y.key) {
    const Chain0 diff = x.f - y.f;
    if (diff.empty()) return 0.0;
    return norm_p_pow(diff, p) / std::pow(x.normalizer, p);
  }
  RealChain diff = to_real(x.f).scaled(1.0 / x.normalizer);
  diff -= to_real(y.f).scaled(1.0 / y.normalizer);
  return norm_p_pow(diff, p);
}

inline double h_difference_norm_p(const HChain& x, const HChain& y, double p) {
  const double s = h_difference_norm_p_pow(x, y, p);
  return s == 0 ? 0.0 : std::pow(s, 1.0 / p);
}

class Mineyev {
 public:
  explicit Mineyev(const Bicombing& q, ChainCache* cache = nullptr)
      : q_(q), group_(q.group()), delta_(group_.delta()), step_(10 * group_.delta()),
        local_(build_ball(group_, std::min(group_.delta(), group_.window_radius().value_or(group_.delta())))),
        cache_(cache) {}

  const Group& group() const noexcept { return group_; }
  const Bicombing& bicombing() const noexcept { return q_; }
  int delta() const noexcept { return delta_; }
  /// 10 * delta
  int step() const noexcept { return step_; }
  ChainCache* cache() const noexcept { return cache_; }

  /// Fl(v,w) = S(v, d(v,w)) n B(w, delta), computed as v . Fl(e, v^-1 w).
  FlowerSet flower(const Element& v, const Element& w) const {
    FlowerSet out{v, w, {}};
    try {
      const Element x = group_.multiply(group_.invert(v), w);
      for (const Element& m : flower_from_identity(x)) out.members.push_back(group_.multiply(v, m));
    } catch (const OutOfWindow& e) {
      throw ExactnessError(std::string("flower truncated by the ball window: ") + e.what());
    }
    std::sort(out.members.begin(), out.members.end());
    return out;
  }

  /// pr_a(b)
  Element project(const Element& a, const Element& b) const {
    if (a == b) return a;
    const int d = distance(group_, a, b);
    return q_.q_point(a, b, largest_step_below(d));
  }

  /// f(a,b) = a . f(e, a^-1 b)
  Chain0 f_chain(const Element& a, const Element& b) const {
    check_margin(a, b);
    const Element x = group_.multiply(group_.invert(a), b);
    return translate(group_, a, f_from_identity(x));
  }

  /// f(e, x), memoized when a cache is attached.
  Chain0 f_from_identity(const Element& x) const {
    const int n = group_.word_length(x);
    if (n <= step_) return Chain0::point(x);
    const int m = largest_step_below(n);
    // Off the step lengths the value is that of the projection; only the
    // flower levels are memoized.
    if (n % step_ != 0) {
      try {
        return f_from_identity(q_.point_from_identity(x, m));
      } catch (const OutOfWindow& e) {
        throw ExactnessError(std::string("f recursion left the ball window: ") + e.what());
      }
    }
    if (cache_) {
      if (auto hit = cache_->find(x)) return std::move(*hit);
    }
    Chain0 result;
    try {
      const auto members = flower_from_identity(x);
      if (members.size() == 1) {
        result = f_from_identity(checked_projection(members.front(), m, n));
      } else {
        const Rational weight(Rational(1) / static_cast<long>(members.size()));
        for (const Element& y : members) result.add_scaled(f_from_identity(checked_projection(y, m, n)), weight);
      }
    } catch (const OutOfWindow& e) {
      throw ExactnessError(std::string("f recursion left the ball window: ") + e.what());
    }
    if (cache_) cache_->insert(x, result);
    return result;
  }

  /// The recursion evaluated directly at base point a: flowers around a,
  /// projections along q[a, .], no translation to e and no cache.
  Chain0 f_chain_literal(const Element& a, const Element& b) const {
    const int d = distance(group_, a, b);
    if (d <= step_) return Chain0::point(b);
    if (d % step_ != 0) return f_chain_literal(a, project(a, b));
    const FlowerSet fl = flower(a, b);
    Chain0 result;
    const Rational weight(Rational(1) / static_cast<long>(fl.members.size()));
    for (const Element& x : fl.members) result.add_scaled(f_chain_literal(a, project(a, x)), weight);
    return result;
  }

  /// h(b,a) = f(b,a) / ||f(b,a)||_p
  HChain h_chain(const Element& b, const Element& a, double p) const {
    if (!(p >= 2.0)) throw DomainError("h(b,a) is defined for p >= 2");
    return normalize(f_chain(b, a), p);
  }

  /// Same as h_chain(b, a, p) translated by b^-1, i.e. h(e, b^-1 a).
  HChain h_from_identity(const Element& x, double p) const {
    if (!(p >= 2.0)) throw DomainError("h(b,a) is defined for p >= 2");
    return normalize(f_from_identity(x), p);
  }

  /// Explicit balls: computing f(a,b) touches B(e, d(e,a) + d(a,b) + delta).
  void check_margin(const Element& a, const Element& b) const {
    const auto window = group_.window_radius();
    if (!window) return;
    int need = 0;
    try {
      need = group_.word_length(a) + distance(group_, a, b) + delta_;
    } catch (const OutOfWindow& e) {
      throw ExactnessError(std::string("f(a,b) leaves the ball window: ") + e.what());
    }
    if (need > *window)
      throw ExactnessError("f(a,b) needs radius " + std::to_string(need) + " but the ball has radius " +
                           std::to_string(*window));
  }

  /// {x u : u in B(e, delta), |x u| = |x|}, sorted.
  std::vector<Element> flower_from_identity(const Element& x) const {
    const int n = group_.word_length(x);
    std::vector<Element> members;
    for (const Element& u : local_.vertices()) {
      Element y = group_.multiply(x, u);
      if (group_.word_length(y) == n) members.push_back(std::move(y));
    }
    if (local_.radius() < delta_ && !members.empty())
      throw ExactnessError("explicit ball is smaller than delta");
    std::sort(members.begin(), members.end());
    return members;
  }

 private:
  int largest_step_below(int d) const { return ((d - 1) / step_) * step_; }

  Element checked_projection(const Element& y, int m, int n) const {
    Element pr = q_.point_from_identity(y, m);
    if (group_.word_length(pr) != n - step_)
      throw InvariantViolation("projection of a flower member did not drop by 10*delta", group_.format(y));
    return pr;
  }

  const Bicombing& q_;
  Group group_;
  int delta_;
  int step_;
  CayleyBall local_;
  ChainCache* cache_;
};

/// Exact ||f(b,a) - f(b,a')||_1.
inline Rational f_difference_norm_1(const Mineyev& m, const Element& b, const Element& a, const Element& a2) {
  const Group& g = m.group();
  const Element bi = g.invert(b);
  return norm_1(m.f_from_identity(g.multiply(bi, a)) - m.f_from_identity(g.multiply(bi, a2)));
}

struct CacheAudit {
  std::size_t checked = 0;
  std::size_t mismatches = 0;
  std::vector<std::string> witnesses;
};

/// Recomputes a random fraction of cached f(e,x) without the cache.
inline CacheAudit audit_cache(const Mineyev& m, double fraction, std::uint64_t seed) {
  CacheAudit audit;
  if (!m.cache()) return audit;
  Mineyev fresh(m.bicombing());
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution keep(fraction);
  for (const auto& [key, value] : m.cache()->entries()) {
    if (!keep(rng)) continue;
    ++audit.checked;
    if (fresh.f_from_identity(key) != value) {
      ++audit.mismatches;
      audit.witnesses.push_back(m.group().format(key));
    }
  }
  return audit;
}

}  // namespace hyplp
