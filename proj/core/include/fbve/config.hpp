/// @file config.hpp
/// @brief Run configuration documents.
///
/// The file format is a small TOML subset: `[section]` headers, `key = value`
/// lines, `#` comments; values are numbers, booleans, double-quoted strings
/// or flat arrays of numbers. Sections are [grid], [material], [run],
/// [experiment] and [diagnostics]; unknown sections or keys are rejected.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fbve/diagnostics.hpp"
#include "fbve/experiments.hpp"
#include "fbve/initial_data.hpp"

namespace fbve::io {

struct ExperimentOptions {
  std::vector<double> epsilons{1e-2, 3.1622776601683794e-3, 1e-3, 3.1622776601683794e-4, 1e-4, 0.0};
  int threads = 1;
  double layer_delta = 0.1;
  double r_bound = 3.0;
  double alpha_min = 0.9;
  double r2_min = 0.95;
  double noise_floor = 1e-12;
  bool ablation = true;
  std::vector<int> mms_n1{32, 64, 128};
  double mms_t_end = 0.5;
  double mms_amplitude = 0.01;
  double mms_omega = 3.0;
  bool mms_discrete = false;
  double order_min = 1.9;
  double order_max = 2.2;
};

/// Warning thresholds for the monitored inequality ratios.
struct MonitorLimits {
  double trace_ratio = 4.0;
  double korn_ratio = 4.0;
};

struct Config {
  RunConfig run;
  MaterialParams params;  // rho0 filled with rho0_value on run.grid
  double rho0_value = 1.0;
  PerturbationSpec perturbation;
  bool equilibrium_initial = false;
  ExperimentOptions experiment;
  diagnostics::RecorderOptions diagnostics;
  MonitorLimits monitors;

  /// Fully resolved document (every default expanded) as JSON text.
  std::string to_json() const;
  /// Same document in the TOML subset accepted by parse_config_text.
  std::string to_toml() const;
  /// FNV-1a 64 of to_json().
  std::uint64_t hash() const;

  experiments::SweepConfig sweep_config() const;
  experiments::MmsConfig mms_config() const;
  FlowState initial_state() const;
};

/// Throws ConfigError naming the key and the violated constraint.
Config parse_config_text(const std::string& text);
Config parse_config(const std::string& path);
/// Inverse of Config::to_json.
Config config_from_json(const std::string& json);

std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t x);

}  // namespace fbve::io
