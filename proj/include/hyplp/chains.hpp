#pragma once

// Finitely supported 0-chains: sparse maps from group elements to coefficients,
// stored as a vector of terms sorted by shortlex order with no zero entries.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include <boost/multiprecision/gmp.hpp>
#include <nlohmann/json.hpp>

#include "hyplp/error.hpp"
#include "hyplp/group.hpp"

namespace hyplp {

using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;

inline bool is_zero(const Rational& c) { return c.is_zero(); }
inline bool is_zero(double c) { return c == 0; }
inline bool is_negative(const Rational& c) { return c.sign() < 0; }
inline bool is_negative(double c) { return c < 0; }

template <class Coeff>
class Chain {
 public:
  using Term = std::pair<Element, Coeff>;

  Chain() = default;

  static Chain point(Element v) {
    Chain out;
    out.terms_.emplace_back(std::move(v), Coeff(1));
    return out;
  }

  static Chain point(Element v, Coeff c) {
    Chain out;
    if (!is_zero(c)) out.terms_.emplace_back(std::move(v), std::move(c));
    return out;
  }

  /// Left translation in place; translation is injective so only the order changes.
  Chain translated(const Group& group, const Element& g) && {
    for (auto& t : terms_) t.first = group.multiply(g, t.first);
    std::sort(terms_.begin(), terms_.end(), [](const Term& x, const Term& y) { return x.first < y.first; });
    return std::move(*this);
  }

  /// Builds a chain from arbitrary terms, combining duplicates and dropping zeros.
  static Chain from_terms(std::vector<Term> terms) {
    std::sort(terms.begin(), terms.end(), [](const Term& x, const Term& y) { return x.first < y.first; });
    Chain out;
    out.terms_.reserve(terms.size());
    for (auto& t : terms) {
      if (!out.terms_.empty() && out.terms_.back().first == t.first)
        out.terms_.back().second += t.second;
      else
        out.terms_.push_back(std::move(t));
      if (is_zero(out.terms_.back().second)) out.terms_.pop_back();
    }
    return out;
  }

  std::span<const Term> terms() const noexcept { return terms_; }
  bool empty() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }

  std::vector<Element> support() const {
    std::vector<Element> out;
    out.reserve(terms_.size());
    for (const auto& t : terms_) out.push_back(t.first);
    return out;
  }

  Coeff coefficient(const Element& v) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), v,
                               [](const Term& t, const Element& x) { return t.first < x; });
    if (it != terms_.end() && it->first == v) return it->second;
    return Coeff(0);
  }

  Coeff coefficient_sum() const {
    Coeff s(0);
    for (const auto& t : terms_) s += t.second;
    return s;
  }

  Chain& operator+=(const Chain& y) {
    return merge(y, [](const Coeff& c) { return c; }, [](Coeff& a, const Coeff& c) { a += c; });
  }
  Chain& operator-=(const Chain& y) {
    return merge(y, [](const Coeff& c) { return Coeff(-c); }, [](Coeff& a, const Coeff& c) { a -= c; });
  }

  /// this += factor * y
  Chain& add_scaled(const Chain& y, const Coeff& factor) {
    if (is_zero(factor)) return *this;
    return merge(y, [&](const Coeff& c) { return Coeff(c * factor); }, [&](Coeff& a, const Coeff& c) { a += c * factor; });
  }

  Chain scaled(const Coeff& r) const {
    if (is_zero(r)) return {};
    Chain out = *this;
    for (auto& t : out.terms_) t.second *= r;
    return out;
  }

  friend Chain operator+(Chain x, const Chain& y) { return x += y; }
  friend Chain operator-(Chain x, const Chain& y) { return x -= y; }
  friend bool operator==(const Chain& x, const Chain& y) { return x.terms_ == y.terms_; }

 private:
  // Sorted merge; `fresh` maps a coefficient of y alone, `accumulate` adds
  // one into an existing coefficient.
  template <class Fresh, class Accumulate>
  Chain& merge(const Chain& y, Fresh fresh, Accumulate accumulate) {
    if (y.terms_.empty()) return *this;
    std::vector<Term> merged;
    merged.reserve(terms_.size() + y.terms_.size());
    auto a = terms_.begin();
    auto b = y.terms_.begin();
    while (a != terms_.end() || b != y.terms_.end()) {
      if (b == y.terms_.end() || (a != terms_.end() && a->first < b->first)) {
        merged.push_back(std::move(*a++));
      } else if (a == terms_.end() || b->first < a->first) {
        merged.emplace_back(b->first, fresh(b->second));
        ++b;
      } else {
        accumulate(a->second, b->second);
        if (!is_zero(a->second)) merged.push_back(std::move(*a));
        ++a;
        ++b;
      }
    }
    terms_ = std::move(merged);
    return *this;
  }

  std::vector<Term> terms_;
};

using Chain0 = Chain<Rational>;
using RealChain = Chain<double>;

inline Chain0 add(const Chain0& x, const Chain0& y) { return x + y; }
inline Chain0 scale(const Rational& r, const Chain0& x) { return x.scaled(r); }
inline std::vector<Element> support(const Chain0& x) { return x.support(); }
inline Rational coefficient_sum(const Chain0& x) { return x.coefficient_sum(); }

template <class Coeff>
Coeff norm_1(const Chain<Coeff>& x) {
  Coeff s(0);
  for (const auto& t : x.terms()) s += is_negative(t.second) ? Coeff(-t.second) : t.second;
  return s;
}

inline double to_double(const Rational& r) { return static_cast<double>(r); }
inline double to_double(double r) { return r; }

namespace detail {

// Sum of |c|^p for the given magnitudes, returned as max^p * scaled_sum to
// survive large exponents. Magnitudes are summed in ascending order so that
// the result depends only on the multiset of coefficients.
inline std::pair<double, double> scaled_power_sum(std::vector<double>& mags, double p) {
  if (mags.empty()) return {0.0, 0.0};
  std::sort(mags.begin(), mags.end());
  const double m = mags.back();
  if (m == 0) return {0.0, 0.0};
  double s = 0;
  for (double v : mags) s += std::pow(v / m, p);
  return {m, s};
}

inline void check_p(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("p-norm requires p >= 1");
}

}  // namespace detail

/// (sum |c|^p)^(1/p); coefficients are converted to double only here.
template <class Coeff>
double norm_p(const Chain<Coeff>& x, double p) {
  detail::check_p(p);
  std::vector<double> mags;
  mags.reserve(x.size());
  for (const auto& t : x.terms()) mags.push_back(std::fabs(to_double(t.second)));
  auto [m, s] = detail::scaled_power_sum(mags, p);
  if (m == 0) return 0.0;
  const double n1 = to_double(norm_1(x));
  return std::min(m * std::pow(s, 1.0 / p), n1);
}

/// sum |c|^p
template <class Coeff>
double norm_p_pow(const Chain<Coeff>& x, double p) {
  detail::check_p(p);
  std::vector<double> mags;
  mags.reserve(x.size());
  for (const auto& t : x.terms()) mags.push_back(std::fabs(to_double(t.second)));
  auto [m, s] = detail::scaled_power_sum(mags, p);
  if (m == 0) return 0.0;
  return std::pow(m, p) * s;
}

/// Left action g . sum c_x x = sum c_x (g x).
template <class Coeff>
Chain<Coeff> translate(const Group& group, const Element& g, const Chain<Coeff>& x) {
  if (g.is_identity()) {
    group.check(g);
    return x;
  }
  if (x.size() == 1) return Chain<Coeff>::point(group.multiply(g, x.terms().front().first), x.terms().front().second);
  std::vector<typename Chain<Coeff>::Term> terms;
  terms.reserve(x.size());
  for (const auto& t : x.terms()) terms.emplace_back(group.multiply(g, t.first), t.second);
  return Chain<Coeff>::from_terms(std::move(terms));
}

template <class Coeff>
Chain<Coeff> translate(const Group& group, const Element& g, Chain<Coeff>&& x) {
  if (g.is_identity()) {
    group.check(g);
    return std::move(x);
  }
  return std::move(x).translated(group, g);
}

inline RealChain to_real(const Chain0& x) {
  std::vector<RealChain::Term> terms;
  terms.reserve(x.size());
  for (const auto& t : x.terms()) terms.emplace_back(t.first, to_double(t.second));
  return RealChain::from_terms(std::move(terms));
}

namespace detail {

inline nlohmann::json integer_json(const Integer& v) {
  if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max())
    return static_cast<std::int64_t>(v);
  return v.str();
}

}  // namespace detail

/// {entries: [[word, numerator, denominator]]}
inline nlohmann::json to_json(const Group& group, const Chain0& x) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [v, c] : x.terms())
    entries.push_back({group.format(v), detail::integer_json(boost::multiprecision::numerator(c)),
                       detail::integer_json(boost::multiprecision::denominator(c))});
  return {{"entries", entries}};
}

/// {entries: [[word, value]]}
inline nlohmann::json to_json(const Group& group, const RealChain& x) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [v, c] : x.terms()) entries.push_back({group.format(v), c});
  return {{"entries", entries}};
}

}  // namespace hyplp
