#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "zdiheat/config.hpp"
#include "zdiheat/error.hpp"
#include "zdiheat/gevrey.hpp"
#include "zdiheat/sim.hpp"
#include "zdiheat/zdi.hpp"

namespace zdiheat {

/// Numeric or validation failure tagged with the pipeline stage it came from.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause)
      : Error(cause.kind(), stage + ": " + cause.what(), cause.order()), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

inline constexpr const char* kValidateStage = "validate";

/// Everything the pipeline computes before anything is written to disk.
struct Synthesis {
  ValidatedConfig setup;
  std::shared_ptr<const GevreyFunction> basis;
  double condition_estimate = 0.0;
  SteadyPlan plan;
  GevreyBound bound;
  std::vector<ZdiState> states;
  std::vector<SeriesTruncation> truncations;
  GammaForm gamma = GammaForm::kDerived;

  /// u_j(t) for all actuators.
  void controls(double t, std::span<double> out) const;
  /// z^D(x, t) at the given points.
  void reference(double t, std::span<const double> xs, std::span<double> out) const;
};

/// validate -> static plan -> bound fit -> truncation planning.
Synthesis synthesize(const ExperimentConfig& config);

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct EmittedFile {
  std::string name;
  std::uintmax_t bytes = 0;
  std::string sha256;
};

struct RunReport {
  std::vector<std::size_t> achieved_orders;
  std::vector<double> tail_estimates;
  GevreyBound bound;
  double condition_estimate = 0.0;
  std::vector<double> alpha_bar;
  std::vector<double> ybar;
  std::vector<double> target;
  std::vector<double> final_errors;  // e_i(t_end)
  double final_max_error = 0.0;
  double max_target = 0.0;
  double midpoint_error = 0.0;       // |z - z^D| at x = 0.5, t_end
  double model_discrepancy = 0.0;   // max |z_delta - z_jump| over the grid
  double max_snap = 0.0;
  std::vector<StageTiming> timings;
  std::vector<EmittedFile> files;

  std::size_t max_achieved_order() const;
  double total_seconds() const;
};

/// Full pipeline; writes field.csv, controls.csv, errors.csv, three SVG plots
/// and report.txt into `output_dir` (created if needed).
RunReport run(const ExperimentConfig& config, const std::string& output_dir);
inline RunReport run(const ExperimentConfig& config) { return run(config, config.output_dir); }

std::string format_report(const RunReport& report, const ExperimentConfig& config);

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

/// Invariant suites at the config's parameters.
std::vector<CheckResult> verify(const ExperimentConfig& config);
std::string format_checks(const std::vector<CheckResult>& checks);

struct SweepRow {
  double value = 0.0;
  std::string status;  // "ok" or the error kind
  double max_error = 0.0;
  std::size_t achieved_order = 0;
  double model_discrepancy = 0.0;
  double runtime = 0.0;
  std::string message;
};

/// One run per value of `parameter` (sigma, m, nx or tolerance), each in its
/// own subdirectory, up to `workers` at once; writes summary.csv.
std::vector<SweepRow> sweep(const ExperimentConfig& config, const std::string& parameter,
                            const std::vector<double>& values, const std::string& output_dir,
                            std::size_t workers = 1);

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

}  // namespace zdiheat
