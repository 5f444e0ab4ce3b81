// Command-line front end; talks to the library only through the C API.
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "zdiheat/zdiheat.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumeric = 2;

int report_failure(zdh_status status) {
  const std::string stage = zdh_last_stage();
  if (!stage.empty()) std::fprintf(stderr, "stage: %s\n", stage.c_str());
  std::fprintf(stderr, "error (%s): %s\n", zdh_status_name(status), zdh_last_error());
  return zdh_last_error_is_validation() || stage == "validate" ? kExitValidation : kExitNumeric;
}

struct ConfigHandle {
  zdh_config* ptr = nullptr;
  ~ConfigHandle() { zdh_config_free(ptr); }
};

// Loads the config and applies --set overrides; returns an exit code or -1.
int load(const std::string& path, const std::vector<std::string>& overrides, ConfigHandle& config) {
  zdh_status st = zdh_config_load(path.c_str(), &config.ptr);
  if (st != ZDH_OK) return report_failure(st);
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "error: --set expects key=value, got '%s'\n", kv.c_str());
      return kExitValidation;
    }
    st = zdh_config_set(config.ptr, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str());
    if (st != ZDH_OK) return report_failure(st);
  }
  return -1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Set-point control of the heat equation with in-domain point actuators"};
  app.require_subcommand(1);
  std::string out_dir;
  std::size_t workers = 1;
  std::vector<std::string> overrides;
  app.add_option("--out", out_dir, "Output directory (overrides output.dir)");
  app.add_option("--workers", workers, "Parallel runs for sweep")->check(CLI::PositiveNumber);
  app.add_option("--set", overrides, "Override a config field, key=value (repeatable)");

  std::string config_path;
  auto* run = app.add_subcommand("run", "Plan, synthesize, simulate and write artifacts");
  run->add_option("config", config_path, "Config file")->required();
  auto* verify = app.add_subcommand("verify", "Run the invariant suites and print a pass/fail table");
  verify->add_option("config", config_path, "Config file")->required();
  auto* sweep = app.add_subcommand("sweep", "Repeat the run over a list of parameter values");
  sweep->add_option("config", config_path, "Config file")->required();
  std::string param;
  std::vector<double> values;
  sweep->add_option("--param", param, "sigma, m, nx or tolerance")->required();
  sweep->add_option("--values", values, "Comma-separated values")->delimiter(',');
  for (auto* sub : {run, verify, sweep}) {
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--workers", workers, "Parallel runs for sweep")->check(CLI::PositiveNumber);
    sub->add_option("--set", overrides, "Override a config field, key=value");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  ConfigHandle config;
  if (const int code = load(config_path, overrides, config); code >= 0) return code;

  if (run->parsed()) {
    zdh_report* report = nullptr;
    const zdh_status st = zdh_run(config.ptr, out_dir.empty() ? nullptr : out_dir.c_str(), &report);
    if (st != ZDH_OK) return report_failure(st);
    std::fputs(zdh_report_text(report), stdout);
    zdh_report_free(report);
    return kExitOk;
  }
  if (verify->parsed()) {
    char* table = nullptr;
    int all_passed = 0;
    const zdh_status st = zdh_verify(config.ptr, &table, &all_passed);
    if (st != ZDH_OK) return report_failure(st);
    std::fputs(table, stdout);
    zdh_string_free(table);
    return all_passed ? kExitOk : kExitNumeric;
  }
  const std::string dir = out_dir.empty() ? std::string("sweep_out") : out_dir;
  std::size_t failed = 0;
  const zdh_status st = zdh_sweep(config.ptr, param.c_str(), values.data(), values.size(),
                                  dir.c_str(), workers, &failed);
  if (st != ZDH_OK) return report_failure(st);
  std::printf("%zu runs, %zu failed; summary in %s/summary.csv\n", values.size(), failed, dir.c_str());
  return kExitOk;
}
