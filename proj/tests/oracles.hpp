#pragma once

// Brute-force reference models used as test oracles. They share no code with
// the library: free groups are reduced letter strings, Z/2*Z/3 is PSL(2,Z)
// with BFS distances, and the chain recursion is written out from the
// definitions over these models.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

namespace oracle {

// ---------------------------------------------------------------------------
// Free group on letters a,b,... with inverses A,B,...

inline char inverse_letter(char c) {
  return std::islower(static_cast<unsigned char>(c)) ? static_cast<char>(std::toupper(c))
                                                      : static_cast<char>(std::tolower(c));
}

inline std::string free_reduce(const std::string& w) {
  std::string out;
  for (char c : w) {
    if (!out.empty() && out.back() == inverse_letter(c))
      out.pop_back();
    else
      out.push_back(c);
  }
  return out;
}

inline std::string free_inverse(const std::string& w) {
  std::string out(w.rbegin(), w.rend());
  for (char& c : out) c = inverse_letter(c);
  return out;
}

struct FreeModel {
  using E = std::string;
  std::vector<std::string> gens;  // declaration order

  explicit FreeModel(int rank) {
    for (int i = 0; i < rank; ++i) {
      gens.push_back(std::string(1, static_cast<char>('a' + i)));
      gens.push_back(std::string(1, static_cast<char>('A' + i)));
    }
  }
  E identity() const { return {}; }
  E mul(const E& x, const E& y) const { return free_reduce(x + y); }
  E inv(const E& x) const { return free_inverse(x); }
  int len(const E& x) const { return static_cast<int>(x.size()); }
  int dist(const E& x, const E& y) const { return len(mul(inv(x), y)); }
};

// ---------------------------------------------------------------------------
// Z/2 * Z/3 as PSL(2,Z): s = [[0,-1],[1,0]], t = [[1,-1],[1,0]].

using Mat = std::array<long long, 4>;

inline Mat normalize_sign(Mat m) {
  for (long long v : m) {
    if (v == 0) continue;
    if (v < 0)
      for (auto& x : m) x = -x;
    break;
  }
  return m;
}

inline Mat mat_mul(const Mat& x, const Mat& y) {
  return normalize_sign({x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2],
                         x[2] * y[1] + x[3] * y[3]});
}

struct ModularModel {
  using E = Mat;
  std::vector<Mat> gens;
  std::vector<std::string> labels;
  std::map<Mat, int> length;  // BFS distance from the identity
  int radius;

  explicit ModularModel(int radius_) : radius(radius_) {
    const Mat s{0, -1, 1, 0};
    const Mat t{1, -1, 1, 0};
    gens = {normalize_sign(s), normalize_sign(t), mat_mul(t, t)};
    labels = {"s", "t", "t2"};
    std::deque<Mat> queue{identity()};
    length[identity()] = 0;
    while (!queue.empty()) {
      const Mat x = queue.front();
      queue.pop_front();
      const int d = length[x];
      if (d == radius) continue;
      for (const Mat& g : gens) {
        const Mat y = mat_mul(x, g);
        if (length.emplace(y, d + 1).second) queue.push_back(y);
      }
    }
  }
  E identity() const { return {1, 0, 0, 1}; }
  E mul(const E& x, const E& y) const { return mat_mul(x, y); }
  E inv(const E& x) const { return normalize_sign({x[3], -x[1], -x[2], x[0]}); }
  int len(const E& x) const {
    auto it = length.find(x);
    if (it == length.end()) throw std::out_of_range("element outside the oracle ball");
    return it->second;
  }
  int dist(const E& x, const E& y) const { return len(mul(inv(x), y)); }
  E word(const std::vector<std::string>& letters) const {
    E out = identity();
    for (const auto& l : letters)
      out = mul(out, gens.at(static_cast<std::size_t>(std::find(labels.begin(), labels.end(), l) - labels.begin())));
    return out;
  }
};

// ---------------------------------------------------------------------------
// Greedy bicombing and the chain recursion, from the definitions.

template <class Model>
struct Construction {
  using E = typename Model::E;
  using Q = boost::rational<long long>;
  using Chain = std::map<E, Q>;

  const Model& G;
  int delta;

  /// q[a,b]: from the current vertex step along the first generator (in
  /// declaration order) that decreases the distance to b.
  std::vector<E> path(const E& a, const E& b) const {
    std::vector<E> out{a};
    E cur = a;
    while (G.dist(cur, b) > 0) {
      const int d = G.dist(cur, b);
      bool moved = false;
      for (const E& s : G.gens) {
        const E next = G.mul(cur, s);
        if (G.dist(next, b) == d - 1) {
          cur = next;
          moved = true;
          break;
        }
      }
      if (!moved) throw std::logic_error("no descending generator");
      out.push_back(cur);
    }
    return out;
  }

  /// All vertices within distance r of x, by BFS through generators.
  std::set<E> ball(const E& x, int r) const {
    std::set<E> seen{x};
    std::vector<E> frontier{x};
    for (int k = 0; k < r; ++k) {
      std::vector<E> next;
      for (const E& v : frontier)
        for (const E& s : G.gens) {
          E w = G.mul(v, s);
          if (seen.insert(w).second) next.push_back(w);
        }
      frontier = std::move(next);
    }
    return seen;
  }

  E project(const E& a, const E& b) const {
    const int d = G.dist(a, b);
    const int m = ((d - 1) / (10 * delta)) * (10 * delta);
    return path(a, b).at(static_cast<std::size_t>(m));
  }

  Chain f(const E& a, const E& b) const {
    const int d = G.dist(a, b);
    if (d <= 10 * delta) return {{b, Q(1)}};
    if (d % (10 * delta) != 0) return f(a, project(a, b));
    std::vector<E> flower;
    for (const E& x : ball(b, delta))
      if (G.dist(a, x) == d) flower.push_back(x);
    Chain out;
    const Q w(1, static_cast<long long>(flower.size()));
    for (const E& x : flower)
      for (const auto& [v, c] : f(a, project(a, x))) out[v] += w * c;
    for (auto it = out.begin(); it != out.end();) it = it->second.numerator() == 0 ? out.erase(it) : std::next(it);
    return out;
  }
};

}  // namespace oracle
