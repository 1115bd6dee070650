// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <string>

#include "hyplp/config.hpp"
#include "hyplp/verify.hpp"

using namespace hyplp;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

Verdict from(const CheckOutcome& c) {
  std::string d = "checked " + std::to_string(c.checked) + ", skipped " + std::to_string(c.skipped) + ", failures " +
                  std::to_string(c.failures);
  if (!c.witness.is_null()) d += ", first failure " + c.witness.dump();
  return {c.pass && c.checked > 0, d};
}

Verdict both(const Verdict& x, const Verdict& y) { return {x.pass && y.pass, x.detail + "; " + y.detail}; }

struct Instance {
  Group group;
  Bicombing q;
  ChainCache cache;
  Mineyev m;
  explicit Instance(Group g) : group(g), q(g), m(q, &cache) {}
};

Verdict convexity_and_support(bool support) {
  Verdict out{true, ""};
  for (const Group& g : {Group::free(2), Group::free_product_cyclic({2, 3})}) {
    Instance in(g);
    const FPairOutcomes r = check_f_pairs(in.m, build_ball(g, 6), 6);
    const Verdict v = from(support ? r.support : r.convexity);
    const bool complete = r.convexity.skipped == 0;
    out = {out.pass && v.pass && complete, out.detail + (out.detail.empty() ? "" : "; ") + g.description() + ": " + v.detail};
  }
  return out;
}

Verdict equivariance() {
  Verdict out{true, ""};
  for (const Group& g : {Group::free(2), Group::free_product_cyclic({2, 3})}) {
    Instance in(g);
    const Verdict v = from(check_equivariance(in.m, build_ball(g, 10), 2, 50, 1000, 301));
    out = {out.pass && v.pass, out.detail + (out.detail.empty() ? "" : "; ") + g.description() + ": " + v.detail};
  }
  return out;
}

Verdict tree_closed_form() {
  Instance in(Group::free(2));
  return from(check_tree_closed_form(in.m, 1000, 10, 30, 401));
}

Verdict cocycle_identity() {
  Instance in(Group::free(2));
  const DecayStudy study = study_decay(in.m, build_ball(in.group, 8), 2000, 501);
  const Cocycle c(in.m, study.selection.p);
  return from(check_cocycle_identity(c, build_ball(in.group, 10), 6, 200, 502));
}

Verdict disjoint_support() {
  Instance f(Group::free(2));
  const Cocycle cf(f.m, 4.0);
  std::vector<Element> gs;
  for (const char* base : {"a", "b", "ab", "aB", "abAB", "aab"}) {
    const Element x = f.group.parse(base);
    Element g = f.group.identity();
    while (f.group.word_length(f.group.multiply(g, x)) <= 25) {
      g = f.group.multiply(g, x);
      gs.push_back(g);
    }
  }
  for (const Element& g : random_elements(f.group, 200, 20, 25, 601)) gs.push_back(g);
  const Verdict free_part = from(check_disjoint_support(cf, gs));

  Instance z(Group::free_product_cyclic({2, 3}));
  const Cocycle cz(z.m, 4.0);
  std::mt19937_64 rng(602);
  std::vector<std::pair<Element, Element>> pairs;
  while (pairs.size() < 1000) {
    const Element g = random_element_of_length(z.group, std::uniform_int_distribution<int>(20, 40)(rng), rng);
    std::vector<Element> admissible;
    for (const Element& gamma : z.q.q_path(g, z.group.identity()).vertices)
      if (cz.is_admissible(g, gamma)) admissible.push_back(gamma);
    if (admissible.empty()) continue;
    pairs.emplace_back(g, admissible[std::uniform_int_distribution<std::size_t>(0, admissible.size() - 1)(rng)]);
  }
  std::size_t failures = 0;
  for (const auto& [g, gamma] : pairs)
    if (!cz.disjoint_support_check(g, gamma)) ++failures;
  const Verdict mod_part{failures == 0, "free-product:2,3 sampled pairs " + std::to_string(pairs.size()) +
                                            ", failures " + std::to_string(failures)};
  return both(free_part, mod_part);
}

Verdict properness() {
  Instance in(Group::free(2));
  const DecayStudy study = study_decay(in.m, build_ball(in.group, 8), 2000, 701);
  const Cocycle c(in.m, study.selection.p);
  std::vector<Element> gs = generator_powers(in.group, 0, 1, 30);
  for (const Element& g : random_elements(in.group, 50, 20, 30, 702)) gs.push_back(g);
  const CheckOutcome r = check_properness(c, gs);
  Verdict v = from(r);
  double min_slack = 1e300;
  for (const auto& row : r.info["rows"]) {
    const int d = row["d"];
    min_slack = std::min(min_slack, row["lower"].get<double>() - 2.0 * (d - 21));
  }
  v.detail += ", p " + std::to_string(study.selection.p) + ", min(lower - 2(d-21)) " + std::to_string(min_slack);
  return v;
}

Verdict decay() {
  Instance in(Group::free_product_cyclic({2, 3}));
  const DecayStudy s = study_decay(in.m, build_ball(in.group, 12), 10000, 801);
  Verdict v = from(check_decay(s));
  bool rho_ok = !s.selection.candidates.empty();
  for (const auto& k : s.selection.candidates) rho_ok = rho_ok && k.rho < 1.0;
  const double value = std::pow(s.selection.rho_used, s.selection.p) * s.upsilon;
  v.pass = v.pass && rho_ok && value < 0.5 && s.sample_count == 10000;
  v.detail += ", lambda " + std::to_string(s.f_fit.base) + ", candidates " +
              std::to_string(s.selection.candidates.size()) + (rho_ok ? " all rho < 1" : " some rho >= 1") + ", p " +
              std::to_string(s.selection.p) + ", rho^p upsilon " + std::to_string(value);
  return v;
}

Verdict tail_bracket() {
  Instance in(Group::free(2));
  const DecayStudy study = study_decay(in.m, build_ball(in.group, 8), 2000, 901);
  const Cocycle c(in.m, study.selection.p);
  const TailModel tail{study.h_fit.constant, study.h_fit.base, study.upsilon};
  return from(check_tail_bracket(c, build_ball(in.group, 8), tail, random_elements(in.group, 20, 1, 8, 902)));
}

Verdict determinism() {
  RunConfig config;
  config.seed = 1001;
  const std::string first = run_verify(config).to_json().dump(2);
  const std::string second = run_verify(config).to_json().dump(2);
  return {first == second, "report bytes " + std::to_string(first.size()) + (first == second ? " identical" : " differ")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"convex combination, all pairs in B(e,6)", [] { return convexity_and_support(false); }},
      {"support containment and base case", [] { return convexity_and_support(true); }},
      {"equivariance", equivariance},
      {"tree closed form", tree_closed_form},
      {"cocycle identity, 200 pairs over B(e,10)", cocycle_identity},
      {"disjoint supports", disjoint_support},
      {"properness inequality", properness},
      {"decay fits and choice of p", decay},
      {"tail-bound bracket", tail_bracket},
      {"determinism of verify", determinism},
  };
  bool all = true;
  int n = 0;
  for (const auto& [name, run] : criteria) {
    ++n;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    all = all && v.pass;
    std::printf("%s criterion %d: %s (%.1f s): %s\n", v.pass ? "PASS" : "FAIL", n, name.c_str(), secs,
                v.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
