/// @file diagnostics.hpp
/// @brief Energies, identity residuals, the normal-system matrix, the
/// boundary-layer indicator and the monitored inequality ratios.
#pragma once

#include <array>
#include <deque>
#include <string>
#include <vector>

#include "fbve/dynamics.hpp"

namespace fbve::diagnostics {

/// Quadrature pieces of the basic energy. Stored terms use the half-row
/// quadrature of the scheme; the surface term sums h1 |D1 eta| over both faces.
struct EnergyTerms {
  double kinetic = 0.0;
  double elastic = 0.0;
  double pressure_potential = 0.0;
  double surface = 0.0;
  double volume = 0.0;  // integral of J

  /// kinetic + elastic + pressure_potential + surface - volume.
  double total() const { return kinetic + elastic + pressure_potential + surface - volume; }
  /// The quantity whose change is exactly minus the dissipation.
  double conserved() const { return kinetic + elastic + pressure_potential + surface; }
};

EnergyTerms basic_energy(const FlowState& state, const MaterialParams& p);

/// D = eps * integral of J (2 mu |S_A v|^2 + lambda (div_A v)^2).
double dissipation_rate(const FlowState& state, const MaterialParams& p);

struct EnergyBalance {
  std::vector<double> t;
  std::vector<double> energy;
  std::vector<double> dissipation_integral;
  std::vector<double> residual;  // |E(t) + int D - E(0)|
  double max_residual = 0.0;
  double min_dissipation = 0.0;
};

EnergyBalance energy_balance_residual(const dynamics::Trajectory& traj, const MaterialParams& p);

/// Backward-difference d^k v/dt^k (first-order accurate) from the newest
/// history entries. Throws InsufficientHistoryError when history is too short.
VectorField time_derivative_v(const std::deque<FlowState>& history, int order, double dt);

/// Terms of the discrete energy functional truncated at order m.
struct EnergyFunctionalTerms {
  int m = 2;
  /// eta in H^m-type norm, tangential grad eta, boundary curvature term,
  /// eps-weighted second derivatives.
  std::array<double, 4> point{};
  /// Time integrals accumulated by the trapezoidal rule.
  std::array<double, 7> integral{};

  double total() const;
};

/// Point terms at the newest history entry; integrals left at zero.
EnergyFunctionalTerms energy_functional_point(const std::deque<FlowState>& history, double dt, int m,
                                              const MaterialParams& p);

/// Integrand values (before the squaring of the last term) at the newest entry.
std::array<double, 7> energy_functional_integrands(const std::deque<FlowState>& history, double dt,
                                                   int m, const MaterialParams& p);

struct NormalSystemMatrix {
  MatrixField calA;
  ScalarField min_eig;  // closed form rho0 J
  ScalarField max_eig;
};

/// calA_ij = rho0 J delta_ij + gamma A (rho0/J)^gamma a_i2 a_j2 at every node.
NormalSystemMatrix normal_system_matrix(const FlowState& state, const GeometryCache& cache,
                                        const MaterialParams& p);

/// r(delta) = ||d2 v||_{strips} / max(||d2 v||_{interior}, 1e-14).
double boundary_layer_indicator(const VectorField& v, double delta);

struct InequalityRatios {
  double trace = 0.0;
  double korn = 0.0;
};

/// |g|_0^2 / (||g||_0^2 + ||g||_0 ||grad g||_0) over both faces; 0 for g = 0.
double trace_ratio(const ScalarField& g);
/// ||grad f||^2 / (||S_A f||^2 + ||f||^2); 0 for f = 0.
double korn_ratio(const VectorField& f, const MatrixField& A);

InequalityRatios inequality_monitors(const FlowState& state, const GeometryCache& cache);

/// max |(J_n - J_{n-1})/dt - a : grad v_n| over nodes.
double jacobi_residual(const FlowState& prev, const FlowState& cur, double dt);

/// max |dJ/dt + J^(gamma+1)/(gamma A rho0^gamma) dq/dt| with backward differences.
double pressure_jacobian_residual(const FlowState& prev, const FlowState& cur, double dt,
                                  const MaterialParams& p);

struct DiagnosticsReport {
  double t = 0.0;
  double basic_energy = 0.0;
  double conserved_energy = 0.0;
  double dissipation_rate = 0.0;
  double dissipation_integral = 0.0;
  double energy_residual = 0.0;
  double E_eps = 0.0;
  double piola_res = 0.0;
  double piola_boundary_res = 0.0;
  double decomp_res = 0.0;
  double cofactor_res = 0.0;
  double jacobi_res = 0.0;
  double q_res = 0.0;
  double B_res = 0.0;
  double compat_res = 0.0;
  double normal_matrix_min_eig = 0.0;
  std::array<double, 3> layer_indicator{};  // delta = 0.05, 0.1, 0.2
  double norm_v_h1 = 0.0;
  double norm_grad_eta_h1 = 0.0;
  double boundary_curvature_half = 0.0;  // |d1^2 eta . n|_{1/2}, both faces
  double trace_ratio = 0.0;
  double korn_ratio = 0.0;
};

inline constexpr std::array<double, 3> kLayerDeltas{0.05, 0.1, 0.2};

/// CSV header matching `csv_row`.
std::string csv_header();
std::string csv_row(const DiagnosticsReport& r);

struct RecorderOptions {
  int m_diag = 2;
  /// Steps between report rows; the first and last steps always get one.
  int every = 10;
};

/// Observer that accumulates the energy functional every step and emits
/// report rows at its cadence.
class Recorder {
 public:
  Recorder(const MaterialParams& p, RecorderOptions opt = {});

  dynamics::Observer observer();

  const std::vector<DiagnosticsReport>& rows() const { return rows_; }
  /// Energy functional at the most recent step with enough history.
  const EnergyFunctionalTerms& energy_functional() const { return ef_; }
  double sup_energy_functional() const { return sup_ef_; }
  double max_jacobi_residual() const { return max_jacobi_; }
  double max_q_residual() const { return max_q_; }
  double max_trace_ratio() const { return max_trace_; }
  double max_korn_ratio() const { return max_korn_; }

 private:
  void on_step(const dynamics::StepView& view);
  DiagnosticsReport make_row(const dynamics::StepView& view);

  MaterialParams p_;
  RecorderOptions opt_;
  std::vector<DiagnosticsReport> rows_;
  EnergyFunctionalTerms ef_;
  std::array<double, 7> prev_integrand_{};
  bool have_prev_integrand_ = false;
  double t7_inner_ = 0.0;
  double sup_ef_ = 0.0;
  double e0_ = 0.0;
  double max_jacobi_ = 0.0;
  double max_q_ = 0.0;
  double max_trace_ = 0.0;
  double max_korn_ = 0.0;
};

}  // namespace fbve::diagnostics
