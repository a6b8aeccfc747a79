#include "cyslag/suites.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace cyslag;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cyslag-test-" + name + "-" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_ini(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "cfg.ini";
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_tool(const std::string& args) {
  const std::string cmd = std::string(CYSLAG_TOOL) + " " + args + " > /dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string config_error(const fs::path& ini) {
  try {
    load_config(ini.string());
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Config, ReadsKnownKeys) {
  const fs::path d = scratch("cfg");
  const fs::path ini = write_ini(d, "seed = 9\n[neck]\na_list = 0.2, 0.1\nsmoothness = 3\n[slag]\nmatrices = 5\n");
  const SuiteConfig c = load_config(ini.string());
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.neck_a_list, (std::vector<double>{0.2, 0.1}));
  EXPECT_EQ(c.neck_smoothness, 3);
  EXPECT_EQ(c.matrices, 5);
  EXPECT_EQ(c.lbc_grid, SuiteConfig{}.lbc_grid);
}

TEST(Config, UnknownKeyNamesLine) {
  const fs::path d = scratch("unknown");
  const std::string msg = config_error(write_ini(d, "seed = 1\n\n[neck]\nr0 = 0.4\nr9 = 2\n"));
  EXPECT_NE(msg.find(":5:"), std::string::npos) << msg;
  EXPECT_NE(msg.find("neck.r9"), std::string::npos) << msg;
}

TEST(Config, BadValueNamesLine) {
  const fs::path d = scratch("bad");
  const std::string msg = config_error(write_ini(d, "[metrics]\npoints = many\n"));
  EXPECT_NE(msg.find(":2:"), std::string::npos) << msg;
  EXPECT_NE(msg.find("metrics.points"), std::string::npos) << msg;
  EXPECT_NE(config_error(write_ini(d, "[neck]\na_list = 0.1, x\n")).find(":2:"), std::string::npos);
}

TEST(Config, ParseErrorNamesLine) {
  const fs::path d = scratch("parse");
  const std::string msg = config_error(write_ini(d, "seed = 1\n[neck\n"));
  EXPECT_NE(msg.find(":2:"), std::string::npos) << msg;
}

TEST(Config, ValidationRejectsBadRanges) {
  const fs::path d = scratch("range");
  EXPECT_FALSE(config_error(write_ini(d, "[neck]\nr0 = 2\n")).empty());
  EXPECT_FALSE(config_error(write_ini(d, "tol_scale = 0\n")).empty());
  EXPECT_FALSE(config_error(write_ini(d, "[slag]\nmatrices = 0\n")).empty());
}

TEST(Config, NumberList) {
  EXPECT_EQ(parse_number_list("1, 2.5,3e-2", "k"), (std::vector<double>{1.0, 2.5, 0.03}));
  EXPECT_THROW(parse_number_list("1,,2", "k"), ConfigError);
  EXPECT_THROW(parse_number_list("1 2", "k"), ConfigError);
}

TEST(ReportJson, SortedWithSchemaVersion) {
  Report r("demo", 5);
  r.bound("z/last", "plumbing", 0.5, 1.0);
  r.require("a/first", "plumbing", false);
  r.measure("m/mid", "plumbing", {{"x", 1}}, "why");
  const nlohmann::json j = r.to_json();
  EXPECT_EQ(j["schema_version"], kReportSchemaVersion);
  EXPECT_EQ(j["checks"][0]["key"], "a/first");
  EXPECT_EQ(j["checks"][1]["key"], "m/mid");
  EXPECT_EQ(j["checks"][2]["key"], "z/last");
  EXPECT_EQ(j["checks"][1]["note"], "why");
  EXPECT_FALSE(j["passed"].get<bool>());
  EXPECT_EQ(j["counts"]["fail"], 1);
  EXPECT_FALSE(j.contains("wall_time_s"));
  EXPECT_EQ(r.to_json().dump(), j.dump());
}

TEST(Suites, UnknownNamesAreUsageErrors) {
  EXPECT_THROW(run_suite("nope", SuiteConfig{}), UsageError);
  EXPECT_THROW(scan_schema("nope"), UsageError);
  std::ostringstream os;
  EXPECT_THROW(scan("nope", SuiteConfig{}, os), UsageError);
}

TEST(Suites, OrbifoldSuitePasses) {
  const Report r = run_suite("orbifold", SuiteConfig{});
  EXPECT_TRUE(r.passed());
  for (const Check& c : r.checks()) EXPECT_FALSE(c.anchor.empty()) << c.key;
}

TEST(Tool, UsageAndConfigExitCodes) {
  const fs::path d = scratch("codes");
  EXPECT_EQ(run_tool(""), 2);
  EXPECT_EQ(run_tool("verify"), 2);
  EXPECT_EQ(run_tool("verify nosuch"), 2);
  EXPECT_EQ(run_tool("scan nosuch"), 2);
  EXPECT_EQ(run_tool("verify orbifold --seed notanumber"), 2);
  EXPECT_EQ(run_tool("verify orbifold --config " + write_ini(d, "bogus = 1\n").string() + " --out " + d.string()), 3);
  EXPECT_EQ(run_tool("verify orbifold --tol-scale -1 --out " + d.string()), 3);
  EXPECT_EQ(run_tool("report " + (d / "missing").string()), 1);
}

TEST(Tool, ScanWritesHeader) {
  const fs::path d = scratch("scan");
  ASSERT_EQ(run_tool("scan torus --out " + d.string()), 0);
  const std::string csv = slurp(d / "scan-torus.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), scan_schema("torus"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 125);
}

TEST(Tool, VerifyIsDeterministicAndAggregates) {
  const fs::path a = scratch("det-a"), b = scratch("det-b");
  ASSERT_EQ(run_tool("verify orbifold --seed 3 --out " + a.string()), 0);
  ASSERT_EQ(run_tool("verify orbifold --seed 3 --out " + b.string()), 0);
  const std::string ra = slurp(a / "report-orbifold.json");
  EXPECT_FALSE(ra.empty());
  EXPECT_EQ(ra, slurp(b / "report-orbifold.json"));
  const nlohmann::json j = nlohmann::json::parse(ra);
  EXPECT_EQ(j["seed"], 3);
  EXPECT_EQ(j["suite"], "orbifold");

  ASSERT_EQ(run_tool("report " + a.string()), 0);
  const nlohmann::json s = nlohmann::json::parse(slurp(a / "summary.json"));
  EXPECT_TRUE(s["passed"].get<bool>());
  EXPECT_EQ(s["reports"].size(), 1u);
}

TEST(Tool, TimingFlagAddsWallTime) {
  const fs::path d = scratch("timing");
  ASSERT_EQ(run_tool("verify orbifold --timing --out " + d.string()), 0);
  EXPECT_TRUE(nlohmann::json::parse(slurp(d / "report-orbifold.json")).contains("wall_time_s"));
}
