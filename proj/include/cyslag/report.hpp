// Suite reports: named checks with a status, numeric payload and the claim
// they exercise, serialized to JSON with a stable key order.
#pragma once

#include "json.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cyslag {

inline constexpr int kReportSchemaVersion = 1;

enum class CheckStatus { pass, fail, measured };

inline std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::measured: return "measured";
  }
  return "unknown";
}

struct Check {
  std::string key;     // "<module>/<name>", unique within a report
  CheckStatus status = CheckStatus::measured;
  std::string anchor;  // the claim exercised, or "plumbing"
  nlohmann::json values = nlohmann::json::object();
  std::string note;
};

class Report {
 public:
  explicit Report(std::string suite, std::uint64_t seed) : suite_(std::move(suite)), seed_(seed) {}

  const std::string& suite() const { return suite_; }
  const std::vector<Check>& checks() const { return checks_; }

  Check& add(Check c) {
    checks_.push_back(std::move(c));
    return checks_.back();
  }

  /// Hard check `value <= bound`.
  Check& bound(const std::string& key, const std::string& anchor, double value, double limit,
               nlohmann::json extra = nlohmann::json::object()) {
    extra["value"] = value;
    extra["bound"] = limit;
    return add({key, value <= limit ? CheckStatus::pass : CheckStatus::fail, anchor, std::move(extra), {}});
  }

  Check& require(const std::string& key, const std::string& anchor, bool ok,
                 nlohmann::json values = nlohmann::json::object()) {
    return add({key, ok ? CheckStatus::pass : CheckStatus::fail, anchor, std::move(values), {}});
  }

  Check& measure(const std::string& key, const std::string& anchor, nlohmann::json values,
                 std::string note = {}) {
    return add({key, CheckStatus::measured, anchor, std::move(values), std::move(note)});
  }

  void limitation(std::string text) { limitations_.push_back(std::move(text)); }

  void merge(const Report& other) {
    for (const Check& c : other.checks_) checks_.push_back(c);
    for (const std::string& l : other.limitations_)
      if (std::find(limitations_.begin(), limitations_.end(), l) == limitations_.end()) limitations_.push_back(l);
  }

  bool passed() const {
    return std::none_of(checks_.begin(), checks_.end(), [](const Check& c) { return c.status == CheckStatus::fail; });
  }

  nlohmann::json to_json() const {
    std::vector<Check> sorted = checks_;
    std::stable_sort(sorted.begin(), sorted.end(), [](const Check& a, const Check& b) { return a.key < b.key; });
    nlohmann::json checks = nlohmann::json::array();
    std::size_t fails = 0, passes = 0, measured = 0;
    for (const Check& c : sorted) {
      nlohmann::json j{{"key", c.key}, {"status", to_string(c.status)}, {"anchor", c.anchor}, {"values", c.values}};
      if (!c.note.empty()) j["note"] = c.note;
      checks.push_back(std::move(j));
      (c.status == CheckStatus::fail ? fails : c.status == CheckStatus::pass ? passes : measured)++;
    }
    nlohmann::json out{{"schema_version", kReportSchemaVersion},
                       {"suite", suite_},
                       {"seed", seed_},
                       {"passed", passed()},
                       {"counts", {{"pass", passes}, {"fail", fails}, {"measured", measured}}},
                       {"checks", std::move(checks)},
                       {"limitations", limitations_}};
    if (wall_time_) out["wall_time_s"] = *wall_time_;
    return out;
  }

  void set_wall_time(double seconds) { wall_time_ = seconds; }

 private:
  std::string suite_;
  std::uint64_t seed_;
  std::vector<Check> checks_;
  std::vector<std::string> limitations_;
  std::optional<double> wall_time_;
};

}  // namespace cyslag
