#pragma once

// Group elements as canonical normal-form words.
//
// Built-in families are free products of cyclic groups (free groups being the
// case where every factor is infinite). With all nontrivial powers of each
// finite cyclic factor in the generating set, the syllable normal form is the
// unique geodesic word, so word length is the word metric. Explicit Cayley
// balls loaded from file use the shortlex-least geodesic word of each vertex.

#include <algorithm>
#include <atomic>
#include <cctype>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <boost/container/small_vector.hpp>
#include <nlohmann/json.hpp>

#include "hyplp/error.hpp"

namespace hyplp {

using GenIndex = std::uint8_t;

struct Generator {
  GenIndex index = 0;
  std::string label;
  GenIndex inverse = 0;
  // Normal-form families only: the cyclic factor this letter belongs to and
  // the power of that factor's generator it represents (+-1 when infinite).
  int factor = -1;
  int exponent = 0;
};

enum class Family { free_group, free_product_cyclic, explicit_ball };

class Element {
 public:
  using Word = boost::container::small_vector<GenIndex, 32>;

  Element() = default;

  std::size_t length() const noexcept { return word_.size(); }
  bool is_identity() const noexcept { return word_.empty(); }
  const Word& word() const noexcept { return word_; }
  std::span<const GenIndex> letters() const noexcept { return {word_.data(), word_.size()}; }
  std::uint32_t group_tag() const noexcept { return tag_; }

  friend bool operator==(const Element& x, const Element& y) noexcept {
    return x.tag_ == y.tag_ && x.word_ == y.word_;
  }

  /// Shortlex order: length first, then letters by generator index.
  friend std::strong_ordering operator<=>(const Element& x, const Element& y) noexcept {
    if (auto c = x.tag_ <=> y.tag_; c != 0) return c;
    if (auto c = x.word_.size() <=> y.word_.size(); c != 0) return c;
    return std::lexicographical_compare_three_way(x.word_.begin(), x.word_.end(),
                                                  y.word_.begin(), y.word_.end());
  }

 private:
  friend class Group;
  Element(std::uint32_t tag, Word word) : tag_(tag), word_(std::move(word)) {}

  std::uint32_t tag_ = 0;
  Word word_;
};

struct ElementHash {
  std::size_t operator()(const Element& g) const noexcept {
    std::uint64_t h = 1469598103934665603ull ^ g.group_tag();
    for (GenIndex s : g.word()) {
      h ^= s;
      h *= 1099511628211ull;
    }
    h ^= g.length();
    h *= 1099511628211ull;
    return static_cast<std::size_t>(h);
  }
};

/// Immutable, cheaply copyable handle to a group and its generating set.
class Group {
 public:
  static Group free(int rank, int delta = 1) {
    if (rank < 1 || rank > 26) throw DomainError("free group rank must lie in [1, 26]");
    auto d = std::make_shared<Data>();
    d->family = Family::free_group;
    d->delta = checked_delta(delta);
    for (int i = 0; i < rank; ++i) {
      const std::string lower(1, static_cast<char>('a' + i));
      const std::string upper(1, static_cast<char>('A' + i));
      d->factor_orders.push_back(0);
      add_generator(*d, lower, i, 1);
      add_generator(*d, upper, i, -1);
    }
    finish_normal_form(*d);
    return Group(std::move(d));
  }

  /// Free product of cyclic groups; an order of 0 denotes an infinite factor.
  static Group free_product_cyclic(const std::vector<int>& orders, int delta = 1) {
    static constexpr std::string_view letters = "stuvwxyzmnopqr";
    if (orders.empty() || orders.size() > letters.size())
      throw DomainError("free product needs between 1 and 14 factors");
    auto d = std::make_shared<Data>();
    d->family = Family::free_product_cyclic;
    d->delta = checked_delta(delta);
    for (std::size_t i = 0; i < orders.size(); ++i) {
      const int m = orders[i];
      const std::string base(1, letters[i]);
      d->factor_orders.push_back(m);
      if (m == 0) {
        add_generator(*d, base, static_cast<int>(i), 1);
        add_generator(*d, std::string(1, static_cast<char>(letters[i] - 'a' + 'A')),
                      static_cast<int>(i), -1);
      } else if (m >= 2) {
        for (int e = 1; e < m; ++e)
          add_generator(*d, e == 1 ? base : base + std::to_string(e), static_cast<int>(i), e);
      } else {
        throw DomainError("cyclic factor orders must be 0 (infinite) or at least 2");
      }
    }
    if (d->generators.size() > 255) throw DomainError("too many generators");
    finish_normal_form(*d);
    return Group(std::move(d));
  }

  /// Explicit Cayley ball in the JSON format
  /// {generators: [{label, inverse}], basepoint, radius, vertices, edges}.
  static Group from_ball_json(const nlohmann::json& doc, int delta = 1);

  static Group load_ball_file(const std::filesystem::path& path, int delta = 1) {
    std::ifstream in(path);
    if (!in) throw LoadError(LoadErrorKind::malformed, "cannot open ball file " + path.string());
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw LoadError(LoadErrorKind::malformed, std::string("ball file is not JSON: ") + e.what());
    }
    return from_ball_json(doc, delta);
  }

  Family family() const noexcept { return d_->family; }
  int delta() const noexcept { return d_->delta; }
  std::uint32_t tag() const noexcept { return d_->tag; }
  std::size_t generator_count() const noexcept { return d_->generators.size(); }
  const Generator& generator(GenIndex s) const { return d_->generators.at(s); }
  std::span<const Generator> generators() const noexcept { return d_->generators; }
  const std::vector<int>& factor_orders() const noexcept { return d_->factor_orders; }

  /// Geodesics between any two vertices are unique (true for every built-in family).
  bool has_unique_geodesics() const noexcept { return d_->family != Family::explicit_ball; }

  /// Radius of the materialized window; empty for built-in (infinite) families.
  std::optional<int> window_radius() const noexcept {
    if (d_->family == Family::explicit_ball) return d_->ball_radius;
    return std::nullopt;
  }

  /// Same group with a different declared fineness constant.
  Group with_delta(int delta) const {
    auto d = std::make_shared<Data>(*d_);
    d->delta = checked_delta(delta);
    return Group(std::move(d));
  }

  std::string description() const {
    switch (d_->family) {
      case Family::free_group:
        return "free:" + std::to_string(d_->factor_orders.size());
      case Family::free_product_cyclic: {
        std::string s = "free-product:";
        for (std::size_t i = 0; i < d_->factor_orders.size(); ++i)
          s += (i ? "," : "") + std::to_string(d_->factor_orders[i]);
        return s;
      }
      case Family::explicit_ball:
        return "ball:" + std::to_string(d_->ball_words.size()) + "@" +
               std::to_string(d_->ball_radius);
    }
    return {};
  }

  Element identity() const { return Element(d_->tag, {}); }

  Element generator_element(GenIndex s) const {
    check_generator(s);
    if (d_->family == Family::explicit_ball)
      return d_->ball_words[static_cast<std::size_t>(step(d_->ball_basepoint, s))];
    return Element(d_->tag, Element::Word{s});
  }

  Element multiply(const Element& g, const Element& h) const {
    check(g);
    check(h);
    if (d_->family == Family::explicit_ball) {
      int v = vertex_of(g);
      for (GenIndex s : h.word()) v = step(v, s);
      return d_->ball_words[static_cast<std::size_t>(v)];
    }
    Element::Word w = g.word_;
    for (GenIndex s : h.word()) push_right(w, s);
    return Element(d_->tag, std::move(w));
  }

  Element right_multiply(const Element& g, GenIndex s) const {
    check(g);
    check_generator(s);
    if (d_->family == Family::explicit_ball)
      return d_->ball_words[static_cast<std::size_t>(step(vertex_of(g), s))];
    Element::Word w = g.word_;
    push_right(w, s);
    return Element(d_->tag, std::move(w));
  }

  Element invert(const Element& g) const {
    check(g);
    Element::Word w;
    w.reserve(g.length());
    for (auto it = g.word_.rbegin(); it != g.word_.rend(); ++it)
      w.push_back(d_->generators[*it].inverse);
    if (d_->family == Family::explicit_ball) {
      int v = d_->ball_basepoint;
      for (GenIndex s : w) v = step(v, s);
      return d_->ball_words[static_cast<std::size_t>(v)];
    }
    return Element(d_->tag, std::move(w));
  }

  int word_length(const Element& g) const {
    check(g);
    return static_cast<int>(g.length());
  }

  /// |s * w| without materializing the product.
  int length_after_left_multiply(GenIndex s, const Element& w) const {
    check(w);
    check_generator(s);
    const int n = static_cast<int>(w.length());
    if (d_->family == Family::explicit_ball) {
      int v = step(d_->ball_basepoint, s);
      for (GenIndex x : w.word()) v = step(v, x);
      return d_->ball_dist[static_cast<std::size_t>(v)];
    }
    if (n == 0) return 1;
    const Generator& a = d_->generators[s];
    const Generator& b = d_->generators[w.word_.front()];
    if (a.factor != b.factor) return n + 1;
    const int m = d_->factor_orders[static_cast<std::size_t>(a.factor)];
    if (m == 0) return a.exponent == -b.exponent ? n - 1 : n + 1;
    return (a.exponent + b.exponent) % m == 0 ? n - 1 : n;
  }

  /// Product of a sequence of generators, reduced to normal form.
  Element from_letters(std::span<const GenIndex> letters) const {
    if (d_->family == Family::explicit_ball) {
      int v = d_->ball_basepoint;
      for (GenIndex s : letters) {
        check_generator(s);
        v = step(v, s);
      }
      return d_->ball_words[static_cast<std::size_t>(v)];
    }
    Element::Word w;
    for (GenIndex s : letters) {
      check_generator(s);
      push_right(w, s);
    }
    return Element(d_->tag, std::move(w));
  }

  /// Leading `t` letters of a normal form. For the built-in families this is
  /// the vertex at distance t along the unique geodesic from e.
  Element prefix(const Element& g, std::size_t t) const {
    check(g);
    if (t > g.length()) throw RangeError("prefix longer than word");
    Element::Word w(g.word_.begin(), g.word_.begin() + static_cast<std::ptrdiff_t>(t));
    if (d_->family == Family::explicit_ball) return from_letters(std::span<const GenIndex>(w.data(), w.size()));
    return Element(d_->tag, std::move(w));
  }

  std::optional<GenIndex> find_generator(std::string_view label) const {
    for (const auto& g : d_->generators)
      if (g.label == label) return g.index;
    return std::nullopt;
  }

  /// Parses words such as "abA", "(ab)^3", "s t2 s", "a^-2" or "e".
  Element parse(std::string_view text) const;

  std::string format(const Element& g) const {
    check(g);
    if (g.is_identity()) return find_generator("e") ? "1" : "e";
    std::string out;
    for (std::size_t i = 0; i < g.length(); ++i) {
      if (i && !d_->separator.empty()) out += d_->separator;
      out += d_->generators[g.word_[i]].label;
    }
    return out;
  }

  bool owns(const Element& g) const noexcept { return g.tag_ == d_->tag; }

  void check(const Element& g) const {
    if (g.tag_ != d_->tag) throw SpecMismatch("element belongs to a different group");
  }

  /// Explicit balls: vertex id (as in the source file) of an element.
  const std::string& vertex_id(const Element& g) const {
    return d_->ball_ids.at(static_cast<std::size_t>(vertex_of(g)));
  }

  /// Explicit balls: every vertex, in shortlex order of its normal form.
  std::span<const Element> ball_elements() const noexcept { return d_->ball_words; }

 private:
  struct Data {
    Family family = Family::free_group;
    int delta = 1;
    std::uint32_t tag = next_tag();
    std::vector<Generator> generators;
    std::vector<int> factor_orders;
    // factor_letter[f][exponent mod order] for finite factors.
    std::vector<std::vector<int>> factor_letter;
    std::string separator;

    int ball_radius = 0;
    int ball_basepoint = 0;
    std::vector<std::string> ball_ids;
    std::vector<int> ball_adjacency;  // vertex * generator_count + s -> neighbor or -1
    std::vector<int> ball_dist;
    std::vector<Element> ball_words;
    std::unordered_map<Element, int, ElementHash> ball_index;
  };

  explicit Group(std::shared_ptr<const Data> d) : d_(std::move(d)) {}

  static std::uint32_t next_tag() {
    static std::atomic<std::uint32_t> counter{1};
    return counter.fetch_add(1, std::memory_order_relaxed);
  }

  static int checked_delta(int delta) {
    if (delta < 1) throw DomainError("delta must be a positive integer");
    return delta;
  }

  static void add_generator(Data& d, std::string label, int factor, int exponent) {
    Generator g;
    g.index = static_cast<GenIndex>(d.generators.size());
    g.label = std::move(label);
    g.factor = factor;
    g.exponent = exponent;
    d.generators.push_back(std::move(g));
  }

  static void finish_normal_form(Data& d) {
    d.factor_letter.assign(d.factor_orders.size(), {});
    for (std::size_t f = 0; f < d.factor_orders.size(); ++f) {
      const int m = d.factor_orders[f];
      d.factor_letter[f].assign(static_cast<std::size_t>(m == 0 ? 0 : m), -1);
    }
    for (auto& g : d.generators) {
      const int m = d.factor_orders[static_cast<std::size_t>(g.factor)];
      if (m > 0) d.factor_letter[static_cast<std::size_t>(g.factor)][static_cast<std::size_t>(g.exponent)] = g.index;
    }
    for (auto& g : d.generators) {
      const int m = d.factor_orders[static_cast<std::size_t>(g.factor)];
      int target = m == 0 ? -g.exponent : (m - g.exponent) % m;
      for (auto& h : d.generators)
        if (h.factor == g.factor && h.exponent == target) g.inverse = h.index;
    }
    for (auto& g : d.generators)
      if (g.label.size() > 1) d.separator = d.family == Family::free_product_cyclic ? "" : ".";
  }

  void check_generator(GenIndex s) const {
    if (s >= d_->generators.size()) throw DomainError("generator index out of range");
  }

  // Appends one letter to a normal form, merging or cancelling syllables.
  void push_right(Element::Word& w, GenIndex s) const {
    if (w.empty()) {
      w.push_back(s);
      return;
    }
    const Generator& last = d_->generators[w.back()];
    const Generator& next = d_->generators[s];
    if (last.factor != next.factor) {
      w.push_back(s);
      return;
    }
    const int m = d_->factor_orders[static_cast<std::size_t>(next.factor)];
    if (m == 0) {
      if (last.exponent == -next.exponent)
        w.pop_back();
      else
        w.push_back(s);
      return;
    }
    const int e = (last.exponent + next.exponent) % m;
    w.pop_back();
    if (e != 0)
      w.push_back(static_cast<GenIndex>(d_->factor_letter[static_cast<std::size_t>(next.factor)][static_cast<std::size_t>(e)]));
  }

  int vertex_of(const Element& g) const {
    auto it = d_->ball_index.find(g);
    if (it == d_->ball_index.end()) throw OutOfWindow("element is not a vertex of the explicit ball");
    return it->second;
  }

  int step(int v, GenIndex s) const {
    const int n = d_->ball_adjacency[static_cast<std::size_t>(v) * d_->generators.size() + s];
    if (n < 0) throw OutOfWindow("product leaves the explicit ball");
    return n;
  }

  std::shared_ptr<const Data> d_;
};

// ---------------------------------------------------------------------------

inline Group Group::from_ball_json(const nlohmann::json& doc, int delta) {
  using K = LoadErrorKind;
  auto d = std::make_shared<Data>();
  d->family = Family::explicit_ball;
  d->delta = checked_delta(delta);
  try {
    if (!doc.is_object()) throw LoadError(K::malformed, "ball file must be a JSON object");
    for (const char* key : {"generators", "radius", "vertices", "edges"})
      if (!doc.contains(key)) throw LoadError(K::malformed, std::string("missing field '") + key + "'");
    if (!doc.contains("basepoint") || doc["basepoint"].is_null())
      throw LoadError(K::missing_basepoint, "ball file has no basepoint");

    const auto& gens = doc.at("generators");
    if (!gens.is_array() || gens.empty() || gens.size() > 255)
      throw LoadError(K::malformed, "generators must be a nonempty array of at most 255 entries");
    for (std::size_t i = 0; i < gens.size(); ++i) {
      Generator g;
      g.index = static_cast<GenIndex>(i);
      g.label = gens[i].at("label").get<std::string>();
      if (g.label.empty()) throw LoadError(K::malformed, "empty generator label");
      d->generators.push_back(std::move(g));
    }
    for (std::size_t i = 0; i < gens.size(); ++i) {
      const auto& inv = gens[i].at("inverse");
      int idx = -1;
      if (inv.is_number_integer()) {
        idx = inv.get<int>();
      } else {
        const auto label = inv.get<std::string>();
        for (const auto& g : d->generators)
          if (g.label == label) idx = g.index;
      }
      if (idx < 0 || idx >= static_cast<int>(gens.size()))
        throw LoadError(K::malformed, "generator " + d->generators[i].label + " has unknown inverse");
      d->generators[i].inverse = static_cast<GenIndex>(idx);
    }
    for (const auto& g : d->generators) {
      if (d->generators[g.inverse].inverse != g.index)
        throw LoadError(K::non_symmetric, "generator inverses are not an involution at " + g.label);
      for (const auto& h : d->generators)
        if (h.index != g.index && h.label == g.label)
          throw LoadError(K::malformed, "duplicate generator label " + g.label);
      if (g.label.size() > 1) d->separator = ".";
    }

    d->ball_radius = doc.at("radius").get<int>();
    if (d->ball_radius < 0) throw LoadError(K::malformed, "radius must be nonnegative");

    std::unordered_map<std::string, int> id_index;
    for (const auto& v : doc.at("vertices")) {
      auto id = v.get<std::string>();
      if (!id_index.emplace(id, static_cast<int>(d->ball_ids.size())).second)
        throw LoadError(K::malformed, "duplicate vertex id " + id);
      d->ball_ids.push_back(std::move(id));
    }
    const auto base_it = id_index.find(doc.at("basepoint").get<std::string>());
    if (base_it == id_index.end())
      throw LoadError(K::missing_basepoint, "basepoint is not among the vertices");
    d->ball_basepoint = base_it->second;

    const std::size_t ngen = d->generators.size();
    const std::size_t nv = d->ball_ids.size();
    d->ball_adjacency.assign(nv * ngen, -1);
    for (const auto& e : doc.at("edges")) {
      if (!e.is_array() || e.size() != 3) throw LoadError(K::malformed, "edge must be [src, generator, dst]");
      auto src = id_index.find(e[0].get<std::string>());
      auto dst = id_index.find(e[2].get<std::string>());
      if (src == id_index.end() || dst == id_index.end())
        throw LoadError(K::malformed, "edge references an unknown vertex");
      int s = -1;
      if (e[1].is_number_integer()) {
        s = e[1].get<int>();
      } else {
        const auto label = e[1].get<std::string>();
        for (const auto& g : d->generators)
          if (g.label == label) s = g.index;
      }
      if (s < 0 || s >= static_cast<int>(ngen)) throw LoadError(K::malformed, "edge has unknown generator");
      int& slot = d->ball_adjacency[static_cast<std::size_t>(src->second) * ngen + static_cast<std::size_t>(s)];
      if (slot >= 0 && slot != dst->second)
        throw LoadError(K::malformed, "vertex " + src->first + " has two edges labeled " + d->generators[static_cast<std::size_t>(s)].label);
      slot = dst->second;
    }
    for (std::size_t v = 0; v < nv; ++v)
      for (std::size_t s = 0; s < ngen; ++s) {
        const int w = d->ball_adjacency[v * ngen + s];
        if (w < 0) continue;
        if (d->ball_adjacency[static_cast<std::size_t>(w) * ngen + d->generators[s].inverse] != static_cast<int>(v))
          throw LoadError(K::non_symmetric, "edge " + d->ball_ids[v] + " -" + d->generators[s].label + "-> " +
                                                d->ball_ids[static_cast<std::size_t>(w)] + " has no reverse edge");
      }

    // BFS in generator declaration order yields shortlex-least geodesic words.
    d->ball_dist.assign(nv, -1);
    std::vector<int> parent(nv, -1), parent_gen(nv, -1), order;
    order.reserve(nv);
    d->ball_dist[static_cast<std::size_t>(d->ball_basepoint)] = 0;
    order.push_back(d->ball_basepoint);
    for (std::size_t head = 0; head < order.size(); ++head) {
      const int v = order[head];
      for (std::size_t s = 0; s < ngen; ++s) {
        const int w = d->ball_adjacency[static_cast<std::size_t>(v) * ngen + s];
        if (w < 0 || d->ball_dist[static_cast<std::size_t>(w)] >= 0) continue;
        d->ball_dist[static_cast<std::size_t>(w)] = d->ball_dist[static_cast<std::size_t>(v)] + 1;
        parent[static_cast<std::size_t>(w)] = v;
        parent_gen[static_cast<std::size_t>(w)] = static_cast<int>(s);
        order.push_back(w);
      }
    }
    if (order.size() != nv) throw LoadError(K::malformed, "ball file has vertices unreachable from the basepoint");
    const int max_dist = d->ball_dist[static_cast<std::size_t>(order.back())];
    if (max_dist != d->ball_radius)
      throw LoadError(K::radius_mismatch, "declared radius " + std::to_string(d->ball_radius) +
                                              " but BFS depth is " + std::to_string(max_dist));
    for (std::size_t v = 0; v < nv; ++v)
      if (d->ball_dist[v] < d->ball_radius)
        for (std::size_t s = 0; s < ngen; ++s)
          if (d->ball_adjacency[v * ngen + s] < 0)
            throw LoadError(K::malformed, "interior vertex " + d->ball_ids[v] + " lacks an edge labeled " +
                                              d->generators[s].label);

    d->ball_words.resize(nv);
    for (int v : order) {
      Element::Word w;
      if (parent[static_cast<std::size_t>(v)] >= 0) {
        w = d->ball_words[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])].word_;
        w.push_back(static_cast<GenIndex>(parent_gen[static_cast<std::size_t>(v)]));
      }
      d->ball_words[static_cast<std::size_t>(v)] = Element(d->tag, std::move(w));
    }
    // Re-index vertices so that handle order is shortlex order.
    std::vector<int> perm(nv);
    for (std::size_t i = 0; i < nv; ++i) perm[i] = static_cast<int>(i);
    std::sort(perm.begin(), perm.end(), [&](int x, int y) {
      return d->ball_words[static_cast<std::size_t>(x)] < d->ball_words[static_cast<std::size_t>(y)];
    });
    std::vector<int> inv_perm(nv);
    for (std::size_t i = 0; i < nv; ++i) inv_perm[static_cast<std::size_t>(perm[i])] = static_cast<int>(i);
    auto remap = [&](auto& vec) {
      auto copy = vec;
      for (std::size_t i = 0; i < nv; ++i) vec[i] = copy[static_cast<std::size_t>(perm[i])];
    };
    remap(d->ball_ids);
    remap(d->ball_dist);
    remap(d->ball_words);
    std::vector<int> adj(nv * ngen, -1);
    for (std::size_t i = 0; i < nv; ++i)
      for (std::size_t s = 0; s < ngen; ++s) {
        const int w = d->ball_adjacency[static_cast<std::size_t>(perm[i]) * ngen + s];
        adj[i * ngen + s] = w < 0 ? -1 : inv_perm[static_cast<std::size_t>(w)];
      }
    d->ball_adjacency = std::move(adj);
    d->ball_basepoint = inv_perm[static_cast<std::size_t>(d->ball_basepoint)];
    for (std::size_t i = 0; i < nv; ++i) d->ball_index.emplace(d->ball_words[i], static_cast<int>(i));
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(K::malformed, std::string("ball file field has the wrong type: ") + e.what());
  }
  return Group(std::move(d));
}

inline Element Group::parse(std::string_view text) const {
  // Grammar: word := item*, item := (label | '(' word ')') ('^' int)?
  std::size_t pos = 0;
  auto skip = [&] {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '.' || text[pos] == '*' || text[pos] == '\t'))
      ++pos;
  };
  auto fail = [&](const std::string& why) -> Element {
    throw DomainError("cannot parse word '" + std::string(text) + "': " + why);
  };
  std::function<Element()> parse_word;
  auto parse_power = [&](Element base) -> Element {
    skip();
    if (pos >= text.size() || text[pos] != '^') return base;
    ++pos;
    bool neg = false;
    if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) neg = text[pos++] == '-';
    if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos]))) fail("exponent expected");
    long k = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      k = k * 10 + (text[pos++] - '0');
      if (k > 100000) fail("exponent too large");
    }
    if (neg) base = invert(base);
    Element out = identity();
    for (long i = 0; i < k; ++i) out = multiply(out, base);
    return out;
  };
  parse_word = [&]() -> Element {
    Element acc = identity();
    for (;;) {
      skip();
      if (pos >= text.size() || text[pos] == ')') return acc;
      Element item;
      if (text[pos] == '(') {
        ++pos;
        item = parse_word();
        if (pos >= text.size() || text[pos] != ')') fail("unbalanced parenthesis");
        ++pos;
      } else {
        std::size_t best = 0;
        GenIndex best_gen = 0;
        for (const auto& g : d_->generators)
          if (g.label.size() > best && text.substr(pos, g.label.size()) == g.label) {
            best = g.label.size();
            best_gen = g.index;
          }
        if (best == 0) {
          if (text[pos] == 'e' || text[pos] == '1') {
            ++pos;
            item = identity();
          } else {
            fail("unknown generator at offset " + std::to_string(pos));
          }
        } else {
          pos += best;
          item = generator_element(best_gen);
        }
      }
      acc = multiply(acc, parse_power(std::move(item)));
    }
  };
  Element out = parse_word();
  if (pos != text.size()) fail("unexpected ')'");
  return out;
}

}  // namespace hyplp
