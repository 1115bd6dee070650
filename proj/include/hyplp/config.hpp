#pragma once

// Run configuration shared by the command-line tool and the verification
// suites, and the group descriptors "free:N", "free-product:m1,m2,..." and
// "ball:PATH".

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hyplp/error.hpp"
#include "hyplp/group.hpp"

namespace hyplp {

struct RunConfig {
  std::string group = "free:2";
  int radius = 8;
  int delta = 1;
  std::optional<double> p;  // empty means "auto"
  std::uint64_t seed = 1;
  int samples = 1000;
  std::size_t memory_budget_mb = 2048;
  std::string output;                   // empty means stdout
  std::vector<std::string> gen_order;   // generator labels; empty means declaration order

  void validate() const {
    if (radius <= 0) throw ConfigError("radius must be positive");
    if (delta <= 0) throw ConfigError("delta must be positive");
    if (samples <= 0) throw ConfigError("samples must be positive");
    if (memory_budget_mb == 0) throw ConfigError("memory_budget_mb must be positive");
    if (p && !(*p >= 2.0)) throw ConfigError("p must be at least 2 or \"auto\"");
  }

  nlohmann::json to_json() const {
    nlohmann::json j = {{"group", group},
                        {"radius", radius},
                        {"delta", delta},
                        {"seed", seed},
                        {"samples", samples},
                        {"memory_budget_mb", memory_budget_mb}};
    j["p"] = p ? nlohmann::json(*p) : nlohmann::json("auto");
    if (!output.empty()) j["output"] = output;
    if (!gen_order.empty()) j["gen_order"] = gen_order;
    return j;
  }

  static RunConfig from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    RunConfig c;
    try {
      for (const auto& [key, value] : j.items()) {
        if (key == "group") c.group = value.get<std::string>();
        else if (key == "radius") c.radius = value.get<int>();
        else if (key == "delta") c.delta = value.get<int>();
        else if (key == "seed") c.seed = value.get<std::uint64_t>();
        else if (key == "samples") c.samples = value.get<int>();
        else if (key == "memory_budget_mb") c.memory_budget_mb = value.get<std::size_t>();
        else if (key == "output") c.output = value.get<std::string>();
        else if (key == "gen_order") c.gen_order = value.get<std::vector<std::string>>();
        else if (key == "p") c.p = parse_p(value.is_string() ? value.get<std::string>() : value.dump());
        else throw ConfigError("unknown config key \"" + key + "\"");
      }
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("bad config value: ") + e.what());
    }
    c.validate();
    return c;
  }

  static RunConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config is not JSON: ") + e.what());
    }
    return from_json(j);
  }

  /// "auto" or a number.
  static std::optional<double> parse_p(const std::string& text) {
    if (text == "auto") return std::nullopt;
    try {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used != text.size()) throw ConfigError("p must be a number or \"auto\"");
      return v;
    } catch (const std::logic_error&) {
      throw ConfigError("p must be a number or \"auto\"");
    }
  }
};

namespace detail {

inline int parse_int(std::string_view s, const std::string& what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ConfigError("bad integer in " + what);
  return v;
}

}  // namespace detail

/// Builds the group named by a descriptor with the given fineness constant.
inline Group make_group(const std::string& descriptor, int delta) {
  const auto colon = descriptor.find(':');
  if (colon == std::string::npos) throw ConfigError("group descriptor needs a family prefix: " + descriptor);
  const std::string family = descriptor.substr(0, colon);
  const std::string rest = descriptor.substr(colon + 1);
  if (family == "free") return Group::free(detail::parse_int(rest, descriptor), delta);
  if (family == "free-product") {
    std::vector<int> orders;
    std::size_t start = 0;
    while (start <= rest.size()) {
      const auto comma = rest.find(',', start);
      const auto end = comma == std::string::npos ? rest.size() : comma;
      orders.push_back(detail::parse_int(std::string_view(rest).substr(start, end - start), descriptor));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return Group::free_product_cyclic(orders, delta);
  }
  if (family == "ball") return Group::load_ball_file(rest, delta);
  throw ConfigError("unknown group family \"" + family + "\"");
}

/// Generator indices for a list of labels; must name every generator once.
inline std::vector<GenIndex> generator_order(const Group& group, const std::vector<std::string>& labels) {
  std::vector<GenIndex> order;
  for (const auto& l : labels) {
    auto s = group.find_generator(l);
    if (!s) throw ConfigError("unknown generator label \"" + l + "\" in generator order");
    order.push_back(*s);
  }
  return order;
}

}  // namespace hyplp
