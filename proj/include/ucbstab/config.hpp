#ifndef UCBSTAB_CONFIG_HPP_
#define UCBSTAB_CONFIG_HPP_

// Experiment config files: INI-style sections of key = value pairs, '#' or
// ';' comments. Unknown sections or keys are rejected.
//
//   [instance]   horizon, arms, sub_gaussian_bound
//   [policy]     kind (ucb | epsilon_greedy), epsilon
//   [experiment] replications, root_seed, direction, alpha, ci_form,
//                workers, solver_tolerance
//   [stability]  horizons
//   [growing_k]  delta_exponent, horizons, arm, gap_scale,
//                min_near_optimal_fraction
//
// Arms are written gaussian(mean, sd), bernoulli(p) or uniform(lower, upper)
// and separated by commas. Lists of numbers are comma separated.

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ucbstab/bandit.hpp"
#include "ucbstab/errors.hpp"
#include "ucbstab/harness.hpp"
#include "ucbstab/policy.hpp"

namespace ucbstab {

namespace config_detail {

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

/// Splits on commas that are not inside parentheses.
inline std::vector<std::string> split_top_level(std::string_view s) {
  std::vector<std::string> parts;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    if (s[i] == ')') --depth;
    if (s[i] == ',' && depth == 0) {
      parts.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  parts.push_back(trim(s.substr(start)));
  if (parts.size() == 1 && parts.front().empty()) parts.clear();
  return parts;
}

inline double parse_real(const std::string &key, std::string_view text) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty() || !std::isfinite(value))
    throw ConfigError(key, "expected a real number, got '" + t + "'");
  return value;
}

/// Integers may be written in scientific notation (1e4) if exact.
inline std::int64_t parse_integer(const std::string &key, std::string_view text) {
  const std::string t = trim(text);
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec == std::errc() && ptr == t.data() + t.size() && !t.empty()) return value;
  const double real = parse_real(key, t);
  if (real != std::floor(real) || std::abs(real) > 9.0e15)
    throw ConfigError(key, "expected an integer, got '" + t + "'");
  return static_cast<std::int64_t>(real);
}

inline std::uint64_t parse_seed(const std::string &key, std::string_view text) {
  const std::string t = trim(text);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ConfigError(key, "expected a non-negative integer seed, got '" + t + "'");
  return value;
}

inline std::vector<double> parse_real_list(const std::string &key, std::string_view text) {
  std::vector<double> out;
  for (const auto &part : split_top_level(text)) out.push_back(parse_real(key, part));
  return out;
}

inline std::vector<std::int64_t> parse_integer_list(const std::string &key,
                                                    std::string_view text) {
  std::vector<std::int64_t> out;
  for (const auto &part : split_top_level(text)) out.push_back(parse_integer(key, part));
  return out;
}

inline ArmSpec parse_arm(const std::string &key, std::string_view text) {
  const std::string t = trim(text);
  const auto open = t.find('(');
  if (open == std::string::npos || t.back() != ')')
    throw ConfigError(key, "expected family(params), got '" + t + "'");
  const std::string family = trim(std::string_view(t).substr(0, open));
  const auto params =
      parse_real_list(key, std::string_view(t).substr(open + 1, t.size() - open - 2));
  auto expect = [&](std::size_t n) {
    if (params.size() != n)
      throw ConfigError(key, family + " takes " + std::to_string(n) + " parameter(s)");
  };
  try {
    if (family == "gaussian") {
      expect(2);
      return ArmSpec::gaussian(params[0], params[1]);
    }
    if (family == "bernoulli") {
      expect(1);
      return ArmSpec::bernoulli(params[0]);
    }
    if (family == "uniform") {
      expect(2);
      return ArmSpec::uniform(params[0], params[1]);
    }
  } catch (const DomainError &e) {
    throw ConfigError(key, e.what());
  }
  throw ConfigError(key, "unknown reward family '" + family + "'");
}

inline std::vector<ArmSpec> parse_arm_list(const std::string &key, std::string_view text) {
  std::vector<ArmSpec> arms;
  for (const auto &part : split_top_level(text)) arms.push_back(parse_arm(key, part));
  if (arms.empty()) throw ConfigError(key, "at least one arm is required");
  return arms;
}

inline const std::map<std::string, std::set<std::string>> &known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"instance", {"horizon", "arms", "sub_gaussian_bound"}},
      {"policy", {"kind", "epsilon"}},
      {"experiment",
       {"replications", "root_seed", "direction", "alpha", "ci_form", "workers",
        "solver_tolerance"}},
      {"stability", {"horizons"}},
      {"growing_k",
       {"delta_exponent", "horizons", "arm", "gap_scale", "min_near_optimal_fraction"}},
  };
  return keys;
}

/// Flattened "section.key" -> value, with unknown entries rejected.
inline std::map<std::string, std::string> flatten(const boost::property_tree::ptree &tree) {
  std::map<std::string, std::string> flat;
  for (const auto &[section, body] : tree) {
    const auto it = known_keys().find(section);
    if (!body.data().empty())
      throw ConfigError(section, "key outside of any section");
    if (it == known_keys().end()) throw ConfigError(section, "unknown section");
    for (const auto &[key, value] : body) {
      const std::string full = section + "." + key;
      if (!it->second.contains(key)) throw ConfigError(full, "unknown key");
      flat[full] = trim(value.data());
    }
  }
  return flat;
}

inline std::map<std::string, std::string> read_flat(std::istream &in) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error &e) {
    throw ConfigError("config", "line " + std::to_string(e.line()) + ": " + e.message());
  }
  return flatten(tree);
}

}  // namespace config_detail

/// FNV-1a 64-bit hash of the canonical "section.key=value" lines, sorted.
/// Comments, whitespace and key order do not affect it.
inline std::uint64_t config_hash(const std::map<std::string, std::string> &flat) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto &[key, value] : flat) {
    for (char c : key + "=" + value + "\n") {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

struct LoadedConfig {
  ExperimentConfig config;
  std::map<std::string, std::string> entries;
  std::uint64_t hash = 0;
};

/// Parses and validates a config stream.
inline LoadedConfig parse_config(std::istream &in) {
  using namespace config_detail;
  LoadedConfig loaded;
  loaded.entries = read_flat(in);
  loaded.hash = config_hash(loaded.entries);
  const auto &e = loaded.entries;
  auto get = [&](const std::string &key) -> const std::string * {
    const auto it = e.find(key);
    return it == e.end() ? nullptr : &it->second;
  };
  auto require = [&](const std::string &key) -> const std::string & {
    const auto *v = get(key);
    if (!v) throw ConfigError(key, "required key is missing");
    return *v;
  };

  ExperimentConfig &c = loaded.config;
  c.arms = parse_arm_list("instance.arms", require("instance.arms"));
  c.horizon = parse_integer("instance.horizon", require("instance.horizon"));
  if (const auto *v = get("instance.sub_gaussian_bound"))
    c.sub_gaussian_bound = parse_real("instance.sub_gaussian_bound", *v);

  const std::string kind = get("policy.kind") ? *get("policy.kind") : "ucb";
  if (kind == "ucb") {
    c.policy = Ucb{};
  } else if (kind == "epsilon_greedy") {
    EpsilonGreedy eg;
    if (const auto *v = get("policy.epsilon")) eg.epsilon = parse_real("policy.epsilon", *v);
    c.policy = eg;
  } else {
    throw ConfigError("policy.kind", "expected 'ucb' or 'epsilon_greedy', got '" + kind + "'");
  }

  if (const auto *v = get("experiment.replications"))
    c.replications = parse_integer("experiment.replications", *v);
  if (const auto *v = get("experiment.root_seed"))
    c.root_seed = parse_seed("experiment.root_seed", *v);
  if (const auto *v = get("experiment.direction"))
    c.direction = parse_real_list("experiment.direction", *v);
  if (const auto *v = get("experiment.alpha")) c.alpha = parse_real("experiment.alpha", *v);
  if (const auto *v = get("experiment.ci_form")) {
    if (*v == "sqrt") {
      c.ci_form = CiForm::kSqrt;
    } else if (*v == "literal") {
      c.ci_form = CiForm::kLiteral;
    } else {
      throw ConfigError("experiment.ci_form", "expected 'sqrt' or 'literal'");
    }
  }
  if (const auto *v = get("experiment.workers")) {
    const auto w = parse_integer("experiment.workers", *v);
    if (w < 0) throw ConfigError("experiment.workers", "must be >= 0");
    c.workers = static_cast<unsigned>(w);
  }
  if (const auto *v = get("experiment.solver_tolerance"))
    c.solver_tolerance = parse_real("experiment.solver_tolerance", *v);
  if (const auto *v = get("stability.horizons"))
    c.stability_horizons = parse_integer_list("stability.horizons", *v);

  const bool has_growing = std::any_of(e.begin(), e.end(), [](const auto &kv) {
    return kv.first.starts_with("growing_k.");
  });
  if (has_growing) {
    GrowingKSchedule g;
    g.horizons = parse_integer_list("growing_k.horizons", require("growing_k.horizons"));
    if (const auto *v = get("growing_k.delta_exponent"))
      g.delta_exponent = parse_real("growing_k.delta_exponent", *v);
    if (const auto *v = get("growing_k.arm")) g.arm = parse_arm("growing_k.arm", *v);
    if (const auto *v = get("growing_k.gap_scale"))
      g.gap_scale = parse_real("growing_k.gap_scale", *v);
    if (const auto *v = get("growing_k.min_near_optimal_fraction"))
      g.min_near_optimal_fraction = parse_real("growing_k.min_near_optimal_fraction", *v);
    c.growing_k = g;
  }

  validate(c);
  return loaded;
}

inline LoadedConfig parse_config_text(const std::string &text) {
  std::istringstream in(text);
  return parse_config(in);
}

inline LoadedConfig load_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path.string() + "'");
  return parse_config(in);
}

/// Documented template emitted by `export-schema`; parses back unchanged.
inline std::string config_template() {
  return R"(# ucbstab experiment configuration
#
# Arms: gaussian(mean, sd) | bernoulli(p) | uniform(lower, upper)
# Logarithms are natural throughout.

[instance]
# Known horizon T (total pulls); must be at least the number of arms.
horizon = 10000
arms = gaussian(0.3, 1), gaussian(0.3, 1)
# Optional upper bound on every arm's sub-Gaussian parameter.
# sub_gaussian_bound = 1

[policy]
# ucb | epsilon_greedy
kind = ucb
# Exploration probability, used by epsilon_greedy only.
epsilon = 0.1

[experiment]
replications = 1000
root_seed = 20240601
# Direction u of the interval for u . mu; defaults to the last arm.
direction = 0, 1
alpha = 0.05
# sqrt: z * sqrt(sum var u^2 / n); literal: z * sum sd u^2 / n
ci_form = sqrt
# 0 = $UCBSTAB_WORKERS or the hardware concurrency.
workers = 0
solver_tolerance = 1e-10

[stability]
# Horizons for the `stability` subcommand.
horizons = 1000, 10000

[growing_k]
# K = round(exp((ln T)^(1 - delta_exponent))) at each horizon.
delta_exponent = 0.5
horizons = 1000, 10000
arm = gaussian(0.3, 1)
# Gap of arm a is gap_scale * a / K; 0 keeps all means equal.
gap_scale = 0
min_near_optimal_fraction = 0.5
)";
}

}  // namespace ucbstab

#endif  // UCBSTAB_CONFIG_HPP_
