#pragma once

// Equivariant geodesic bicombing: q[a,b] = a . canonical(a^-1 b), where the
// canonical path from e to x descends greedily, always taking the least
// generator (in the configured order) that decreases the distance to x.

#include <mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "hyplp/error.hpp"
#include "hyplp/group.hpp"

namespace hyplp {

struct GeodesicPath {
  Element origin;
  Element terminus;
  std::vector<Element> vertices;

  int length() const noexcept { return static_cast<int>(vertices.size()) - 1; }
};

class Bicombing {
 public:
  /// `order` permutes generator indices for tie-breaking; empty means
  /// declaration order.
  explicit Bicombing(Group group, std::vector<GenIndex> order = {}, std::size_t cache_capacity = 1u << 18)
      : group_(std::move(group)), order_(std::move(order)), capacity_(cache_capacity) {
    if (order_.empty()) {
      for (std::size_t s = 0; s < group_.generator_count(); ++s) order_.push_back(static_cast<GenIndex>(s));
    } else {
      std::vector<bool> seen(group_.generator_count(), false);
      if (order_.size() != seen.size()) throw DomainError("generator order must be a permutation");
      for (GenIndex s : order_) {
        if (s >= seen.size() || seen[s]) throw DomainError("generator order must be a permutation");
        seen[s] = true;
      }
    }
  }

  const Group& group() const noexcept { return group_; }
  std::span<const GenIndex> order() const noexcept { return order_; }

  /// Greedy lexicographic descent from e to x, always run literally.
  Element::Word greedy_word(const Element& x) const {
    Element::Word letters;
    Element remaining = x;
    int dist = group_.word_length(remaining);
    letters.reserve(static_cast<std::size_t>(dist));
    while (dist > 0) {
      bool moved = false;
      for (GenIndex s : order_) {
        const GenIndex s_inv = group_.generator(s).inverse;
        if (group_.length_after_left_multiply(s_inv, remaining) == dist - 1) {
          letters.push_back(s);
          remaining = group_.multiply(group_.generator_element(s_inv), remaining);
          --dist;
          moved = true;
          break;
        }
      }
      if (!moved)
        throw InvariantViolation("no distance-decreasing generator toward " + group_.format(x), group_.format(x));
    }
    return letters;
  }

  /// Letters of the canonical geodesic from e to x.
  Element::Word canonical_word(const Element& x) const {
    // With unique geodesics the greedy descent can only follow the normal form.
    if (group_.has_unique_geodesics()) {
      group_.check(x);
      return x.word();
    }
    {
      std::lock_guard lock(mutex_);
      if (auto it = cache_.find(x); it != cache_.end()) return it->second;
    }
    Element::Word w = greedy_word(x);
    std::lock_guard lock(mutex_);
    if (cache_.size() < capacity_) cache_.emplace(x, w);
    return w;
  }

  /// q[e,x](t)
  Element point_from_identity(const Element& x, int t) const {
    const int n = group_.word_length(x);
    if (t < 0 || t > n) throw RangeError("path parameter outside [0, d(a,b)]");
    if (group_.has_unique_geodesics()) return group_.prefix(x, static_cast<std::size_t>(t));
    const auto w = canonical_word(x);
    return group_.from_letters(std::span<const GenIndex>(w.data(), static_cast<std::size_t>(t)));
  }

  Element q_point(const Element& a, const Element& b, int t) const {
    const Element x = group_.multiply(group_.invert(a), b);
    return group_.multiply(a, point_from_identity(x, t));
  }

  GeodesicPath q_path(const Element& a, const Element& b) const {
    const Element x = group_.multiply(group_.invert(a), b);
    const auto w = canonical_word(x);
    GeodesicPath path{a, b, {}};
    path.vertices.reserve(w.size() + 1);
    path.vertices.push_back(a);
    Element v = a;
    for (GenIndex s : w) {
      v = group_.right_multiply(v, s);
      path.vertices.push_back(v);
    }
    if (path.vertices.back() != b) throw InvariantViolation("canonical path does not reach its terminus");
    return path;
  }

  std::size_t cache_size() const {
    std::lock_guard lock(mutex_);
    return cache_.size();
  }

 private:
  Group group_;
  std::vector<GenIndex> order_;
  std::size_t capacity_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<Element, Element::Word, ElementHash> cache_;
};

}  // namespace hyplp
