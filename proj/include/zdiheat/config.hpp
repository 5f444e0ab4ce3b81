#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "zdiheat/greens.hpp"
#include "zdiheat/sim.hpp"
#include "zdiheat/types.hpp"

namespace zdiheat {

enum class InitialKind { kCosine, kZero, kTable };
enum class TargetKind { kSine, kValues };

/// One experiment, defaults mirroring the twelve-actuator reproduction
/// scenario. Parsed from flat `key = value` text with dotted keys.
struct ExperimentConfig {
  double k0 = 10.0;
  double k1 = 10.0;
  std::size_t uniform_m = 12;
  std::vector<double> points;  // explicit layout; empty means uniform_m

  double sigma = 1.1;
  double duration = 1.0;
  BumpForm form = BumpForm::kPrinted;

  std::size_t nx = 200;
  std::size_t nt = 50;
  double t_end = 2.0;
  std::size_t substeps = 20;

  InitialKind initial = InitialKind::kCosine;
  std::vector<double> initial_values;  // samples on a uniform grid over [0,1]

  TargetKind target = TargetKind::kSine;
  double target_amplitude = 0.5;
  std::vector<double> target_values;

  double tolerance = 1.0e-10;
  std::size_t max_order = 79;
  GammaForm gamma = GammaForm::kDerived;

  std::string output_dir = "out";
};

/// Parses config text; malformed lines raise ConfigError naming the line and
/// field. `origin` prefixes the diagnostics (usually the file name).
ExperimentConfig parse_config(std::string_view text, std::string_view origin = "config");
ExperimentConfig load_config(const std::string& path);

/// Sets one dotted key from its textual value (ConfigError on failure).
void set_config_value(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Canonical text form; parse_config(format_config(c)) reproduces c.
std::string format_config(const ExperimentConfig& config);

/// Domain objects built from a config, each invariant checked. Failures carry
/// the offending field in the message.
struct ValidatedConfig {
  BoundaryParams bc;
  ActuatorLayout layout;
  GevreySpec spec;
  SpaceTimeGrid grid;
  std::vector<double> target;  // one value per actuator
};

ValidatedConfig validate_config(const ExperimentConfig& config);

/// Initial profile selected by the config.
InitialFn initial_profile(const ExperimentConfig& config);

}  // namespace zdiheat
