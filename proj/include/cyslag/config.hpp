// Suite configuration: a flat INI file (one section per module), overridden by
// command-line flags.
#pragma once

#include "cyslag/core.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>

namespace cyslag {

struct SuiteConfig {
  std::uint64_t seed = 1;
  double tol_scale = 1.0;
  std::string out = ".";

  int metric_points = 100;
  int calabi_points = 1000;

  int orbifold_grid = 50;

  int lbc_grid = 21;
  int coverage_samples = 1000;
  int coverage_b_grid = 401;
  int matrices = 1000;

  double neck_r0 = 0.5;
  double neck_r1 = 1.0;
  double neck_scale = 0.1;
  int neck_smoothness = 2;
  std::vector<double> neck_a_list{0.1, 0.05, 0.025, 0.0125};

  int perturb_modes = 4;
  int perturb_glued_modes = 16;
  double perturb_glued_a = 0.01;
  double perturb_tol = 1e-14;
  int perturb_max_iter = 200;

  void validate() const {
    auto positive = [](double v, const char* key) {
      if (!(v > 0.0)) throw ConfigError(std::string(key) + " must be positive");
    };
    positive(tol_scale, "tol_scale");
    for (auto [v, k] : {std::pair{metric_points, "metrics.points"}, {calabi_points, "metrics.calabi_points"},
                        {orbifold_grid, "orbifold.grid"}, {lbc_grid, "slag.lbc_grid"},
                        {coverage_samples, "slag.coverage_samples"}, {coverage_b_grid, "slag.coverage_b_grid"},
                        {matrices, "slag.matrices"}, {perturb_max_iter, "perturb.max_iter"}})
      if (v < 1) throw ConfigError(std::string(k) + " must be >= 1");
    if (!(neck_r0 > 0.0 && neck_r0 < neck_r1)) throw ConfigError("neck: need 0 < r0 < r1");
    positive(neck_scale, "neck.scale");
    if (neck_a_list.empty()) throw ConfigError("neck.a_list must be non-empty");
    for (double a : neck_a_list) positive(a, "neck.a_list entries");
    if (perturb_modes < 0 || perturb_glued_modes < 0) throw ConfigError("perturb.modes must be >= 0");
    positive(perturb_tol, "perturb.tol");
    positive(perturb_glued_a, "perturb.glued_a");
  }
};

inline std::vector<double> parse_number_list(const std::string& text, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(key + ": cannot parse '" + item + "' as a number");
    }
  }
  return out;
}

/// 1-based line of `section.key` in an INI file, or 0 when not found.
inline int ini_line_of(const std::string& path, const std::string& full_key) {
  std::ifstream in(path);
  std::string line, section;
  for (int n = 1; std::getline(in, line); ++n) {
    const auto b = line.find_first_not_of(" \t");
    if (b == std::string::npos || line[b] == ';' || line[b] == '#') continue;
    if (line[b] == '[') {
      section = line.substr(b + 1, line.find(']') - b - 1);
      continue;
    }
    std::string key = line.substr(b, line.find('=') - b);
    key.erase(key.find_last_not_of(" \t") + 1);
    if ((section.empty() ? key : section + "." + key) == full_key) return n;
  }
  return 0;
}

/// Reads known keys from an INI file; unknown keys are rejected so typos surface.
inline SuiteConfig load_config(const std::string& path, SuiteConfig cfg = {}) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(path, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config " + e.filename() + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  const std::set<std::string> known{
      "seed",           "tol_scale",          "out",           "metrics.points",     "metrics.calabi_points",
      "orbifold.grid",  "slag.lbc_grid",      "slag.coverage_samples",               "slag.coverage_b_grid",
      "slag.matrices",  "neck.r0",            "neck.r1",       "neck.scale",         "neck.smoothness",
      "neck.a_list",    "perturb.modes",      "perturb.glued_modes",                 "perturb.glued_a",
      "perturb.tol",    "perturb.max_iter"};
  auto walk = [&](const pt::ptree& node, const std::string& prefix, auto&& self) -> void {
    for (const auto& [key, child] : node) {
      const std::string full = prefix.empty() ? key : prefix + "." + key;
      if (!child.empty()) {
        self(child, full, self);
      } else if (!known.count(full)) {
        throw ConfigError("config " + path + ":" + std::to_string(ini_line_of(path, full)) +
                          ": unknown key '" + full + "'");
      }
    }
  };
  walk(tree, "", walk);
  auto get = [&](const std::string& key, auto& field) {
    using T = std::decay_t<decltype(field)>;
    if (auto v = tree.get_optional<std::string>(key)) {
      try {
        if constexpr (std::is_same_v<T, std::string>) field = *v;
        else field = tree.get<T>(key);
      } catch (const pt::ptree_bad_data&) {
        throw ConfigError("config " + path + ":" + std::to_string(ini_line_of(path, key)) +
                          ": bad value for '" + key + "': " + *v);
      }
    }
  };
  get("seed", cfg.seed);
  get("tol_scale", cfg.tol_scale);
  get("out", cfg.out);
  get("metrics.points", cfg.metric_points);
  get("metrics.calabi_points", cfg.calabi_points);
  get("orbifold.grid", cfg.orbifold_grid);
  get("slag.lbc_grid", cfg.lbc_grid);
  get("slag.coverage_samples", cfg.coverage_samples);
  get("slag.coverage_b_grid", cfg.coverage_b_grid);
  get("slag.matrices", cfg.matrices);
  get("neck.r0", cfg.neck_r0);
  get("neck.r1", cfg.neck_r1);
  get("neck.scale", cfg.neck_scale);
  get("neck.smoothness", cfg.neck_smoothness);
  if (auto v = tree.get_optional<std::string>("neck.a_list"))
    cfg.neck_a_list = parse_number_list(*v, "config " + path + ":" +
                                                std::to_string(ini_line_of(path, "neck.a_list")) + ": neck.a_list");
  get("perturb.modes", cfg.perturb_modes);
  get("perturb.glued_modes", cfg.perturb_glued_modes);
  get("perturb.glued_a", cfg.perturb_glued_a);
  get("perturb.tol", cfg.perturb_tol);
  get("perturb.max_iter", cfg.perturb_max_iter);
  cfg.validate();
  return cfg;
}

}  // namespace cyslag
