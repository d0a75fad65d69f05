/// @file experiments.hpp
/// @brief Viscosity sweeps, the boundary-layer verdict and MMS order studies.
#pragma once

#include <string>
#include <vector>

#include "fbve/diagnostics.hpp"
#include "fbve/initial_data.hpp"
#include "fbve/manufactured.hpp"

namespace fbve::experiments {

struct SweepConfig {
  RunConfig run;
  MaterialParams params;  // epsilon is overridden per run
  PerturbationSpec perturbation;
  /// Strictly decreasing, last entry 0.
  std::vector<double> epsilons{1e-2, 3.1622776601683794e-3, 1e-3, 3.1622776601683794e-4, 1e-4, 0.0};
  bool equilibrium_initial = false;
  int threads = 1;
  int m_diag = 2;
  int diag_every = 10;
  double layer_delta = 0.1;
  double r_bound = 3.0;
  /// Errors below this are treated as the norm's noise floor.
  double noise_floor = 1e-12;
};

struct RunSummary {
  double epsilon = 0.0;
  bool ok = true;
  std::string failure;
  double error_h1 = 0.0;  // ||eta - eta0||_{H1} at t_end
  double error_v_l2 = 0.0;
  double sup_E = 0.0;
  std::array<double, 3> layer{};  // r(delta) at t_end for the three report deltas
  double layer_at_delta = 0.0;    // r at the sweep delta
  double energy_residual = 0.0;
  double max_piola = 0.0;
  long steps = 0;
};

enum class FitStatus { ok, floor, insufficient };

struct RateFit {
  FitStatus status = FitStatus::insufficient;
  double slope = 0.0;
  double r2 = 0.0;
};

const char* to_string(FitStatus s);

/// Least-squares slope of log e against log eps over pairs with eps > 0.
RateFit convergence_rate(const std::vector<double>& errors, const std::vector<double>& epsilons,
                         double noise_floor = 1e-12);

struct SweepResult {
  std::vector<RunSummary> runs;  // ordered as the epsilon list
  double dt = 0.0;
  bool ok = true;
  std::string failed_epsilon;
  bool monotone = true;
  RateFit fit;
  double sup_E_ratio = 0.0;  // max over eps of sup E / sup E at eps_max
};

/// Runs every epsilon with the dt of the largest epsilon.
SweepResult viscosity_sweep(const SweepConfig& cfg);

/// Sweep parameters with the elastic flux removed; p_e is raised by 1 so
/// the flat state stays an equilibrium.
SweepConfig ablation(const SweepConfig& cfg);

/// Stable byte rendering of a sweep result (CSV, %.17g).
std::string sweep_csv(const SweepResult& r);

struct LayerVerdict {
  bool no_layer = true;
  double growth = 0.0;    // max over eps of r(eps) / r(eps_max)
  double exponent = 0.0;  // slope of log r against log eps (eps > 0)
  const char* label() const { return no_layer ? "NO_LAYER" : "LAYER_SUSPECTED"; }
};

LayerVerdict layer_study(const SweepResult& sweep, double r_bound = 3.0);

struct MmsConfig {
  MaterialParams params;  // rho0 is rebuilt per grid; must be spatially constant
  double t_end = 0.5;
  double cfl = 0.5;
  double amplitude = 0.01;
  double omega = 3.0;
  bool discrete = false;
  FaultInjection fault;
  std::vector<int> n1{32, 64, 128};
  int threads = 1;
};

struct OrderStudy {
  std::vector<int> n1;
  std::vector<double> h;
  std::vector<double> errors;  // ||u_h - u*||_{H1} at t_end
  double order = 0.0;
  std::string status;  // ok, floor, inconclusive, aborted
};

OrderStudy mms_order_study(const MmsConfig& cfg);

}  // namespace fbve::experiments
