#include "cyslag/cli.hpp"

#include "cyslag/suites.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace cyslag;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitConfig = 3;

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<double> tol_scale;
  bool timing = false;
};

SuiteConfig resolve(const Overrides& o) {
  SuiteConfig cfg = o.config.empty() ? SuiteConfig{} : load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.out) cfg.out = *o.out;
  if (o.tol_scale) cfg.tol_scale = *o.tol_scale;
  cfg.validate();
  return cfg;
}

fs::path prepare_out(const SuiteConfig& cfg) {
  const fs::path dir(cfg.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

int verify(const std::string& suite, const Overrides& o) {
  const SuiteConfig cfg = resolve(o);
  const auto t0 = std::chrono::steady_clock::now();
  Report rep = run_suite(suite, cfg);
  if (o.timing) rep.set_wall_time(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  const nlohmann::json j = rep.to_json();
  const fs::path path = prepare_out(cfg) / ("report-" + suite + ".json");
  write_file(path, j.dump(2) + "\n");
  for (const auto& c : j["checks"])
    std::cout << std::left << std::setw(9) << c["status"].get<std::string>() << c["key"].get<std::string>() << "\n";
  std::cout << (rep.passed() ? "PASS" : "FAIL") << "  " << path.string() << "\n";
  return rep.passed() ? kExitPass : kExitFail;
}

int run_scan(const std::string& family, const Overrides& o) {
  const SuiteConfig cfg = resolve(o);
  scan_schema(family);
  const fs::path path = prepare_out(cfg) / ("scan-" + family + ".csv");
  std::ostringstream os;
  scan(family, cfg, os);
  write_file(path, os.str());
  std::cout << path.string() << "\n";
  return kExitPass;
}

int aggregate(const std::string& dir) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".json" && e.path().filename().string().rfind("report-", 0) == 0)
      files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw IoError("no report-*.json files in " + dir);
  bool ok = true;
  nlohmann::json summary{{"schema_version", kReportSchemaVersion}, {"reports", nlohmann::json::array()}};
  for (const fs::path& f : files) {
    std::ifstream in(f);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw IoError("cannot parse " + f.string() + ": " + e.what());
    }
    if (j.value("schema_version", 0) != kReportSchemaVersion)
      throw IoError(f.string() + ": unsupported schema version");
    ok = ok && j.value("passed", false);
    summary["reports"].push_back({{"file", f.filename().string()}, {"suite", j["suite"]}, {"passed", j["passed"]},
                                  {"counts", j["counts"]}});
    std::cout << std::left << std::setw(12) << j["suite"].get<std::string>() << (j["passed"].get<bool>() ? "PASS" : "FAIL")
              << "  pass " << j["counts"]["pass"] << " fail " << j["counts"]["fail"] << " measured "
              << j["counts"]["measured"] << "\n";
  }
  summary["passed"] = ok;
  write_file(fs::path(dir) / "summary.json", summary.dump(2) + "\n");
  return ok ? kExitPass : kExitFail;
}

}  // namespace

int cyslag::run_cli(int argc, char** argv) {
  CLI::App app{"Special Lagrangian tori and gluing checks on a resolved T^6/(Z2 x Z2)"};
  app.require_subcommand(1);
  Overrides o;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "INI configuration file")->check(CLI::ExistingFile);
    sub->add_option_function<std::uint64_t>("--seed", [&](std::uint64_t s) { o.seed = s; }, "random seed");
    sub->add_option_function<std::string>("--out", [&](const std::string& d) { o.out = d; }, "output directory");
    sub->add_option_function<double>("--tol-scale", [&](double t) { o.tol_scale = t; }, "multiply tolerances");
  };

  std::string suite, family, dir;
  std::vector<std::string> suites = suite_names();
  suites.push_back("all");
  auto* v = app.add_subcommand("verify", "run a verification suite and write report-<suite>.json");
  v->add_option("suite", suite, "suite name")->required()->check(CLI::IsMember(suites));
  v->add_flag("--timing", o.timing, "include wall time in the report");
  add_common(v);

  std::string families_help = "scan family; CSV columns:";
  for (const auto& f : scan_families()) families_help += "\n  " + f + ": " + scan_schema(f);
  auto* s = app.add_subcommand("scan", "write scan-<family>.csv");
  s->add_option("family", family, families_help)->required()->check(CLI::IsMember(scan_families()));
  add_common(s);

  auto* r = app.add_subcommand("report", "summarize report-*.json files in a directory");
  r->add_option("dir", dir, "directory with reports")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitPass : kExitUsage;
  }
  try {
    if (*v) return verify(suite, o);
    if (*s) return run_scan(family, o);
    return aggregate(dir);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
}
