#pragma once

// Conversions from library elements to oracle models, and sampling helpers.

#include <random>
#include <string>
#include <vector>

#include "hyplp/group.hpp"
#include "oracles.hpp"

namespace test {

inline std::vector<std::string> labels(const hyplp::Group& g, const hyplp::Element& x) {
  std::vector<std::string> out;
  for (hyplp::GenIndex s : x.word()) out.push_back(g.generator(s).label);
  return out;
}

inline oracle::Mat to_matrix(const hyplp::Group& g, const oracle::ModularModel& model, const hyplp::Element& x) {
  return model.word(labels(g, x));
}

inline std::string to_free(const hyplp::Group& g, const hyplp::Element& x) {
  std::string out;
  for (const auto& l : labels(g, x)) out += l;
  return out;
}

}  // namespace test
