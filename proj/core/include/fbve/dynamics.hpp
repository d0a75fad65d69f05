/// @file dynamics.hpp
/// @brief Semi-discrete momentum balance, stable timestep and the run loop.
///
/// The momentum balance is discretised from the discrete energy. Stress is
/// evaluated at the half rows (i, j + 1/2), where
///   d2 u = (u_{j+1} - u_j) / h2,   d1 u = (D1 u_j + D1 u_{j+1}) / 2
/// with D1 the centred periodic difference. The nodal force is
///   H_j rho_j dv/dt = h2/2 [D1 P_1(j-1/2) + D1 P_1(j+1/2)] + P_2(j+1/2) - P_2(j-1/2)
/// with H_j = h2 inside and h2/2 on the faces, where a missing half row is
/// replaced by the surface-tension traction sigma D1(D1 eta / |D1 eta|).
/// The scheme conserves kinetic + stored + surface energy up to viscous
/// dissipation.
#pragma once

#include <array>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fbve/constitutive.hpp"
#include "fbve/state.hpp"

namespace fbve {

enum class Integrator { rk4, euler };

struct RunConfig {
  Grid grid;
  double t_end = 1.0;
  double cfl = 0.5;
  Integrator integrator = Integrator::rk4;
  /// Fixed step; 0 selects t_end / ceil(t_end / stable_dt).
  double dt = 0.0;
  /// Steps between stored snapshots; 0 stores about 50 snapshots.
  int output_every = 0;
  int history_depth = 5;
  double j_floor = geometry::kDefaultJFloor;
  /// Abort threshold for the interior discrete Piola residual.
  double piola_tolerance = 1e-10;

  void validate() const;
};

/// Deliberate defects used by regression traps.
struct FaultInjection {
  bool flip_bottom_traction = false;
  /// Added to the normal component of the bottom traction.
  double bottom_traction_offset = 0.0;
  /// Forward instead of centred difference in the x1 divergence.
  bool lopsided_x1 = false;
};

/// External forcing: a body acceleration added to dv/dt and a boundary
/// traction added to the surface-tension traction.
struct Forcing {
  std::function<VectorField(double t)> body;
  std::function<void(double t, BoundaryTrace<2>& bottom, BoundaryTrace<2>& top)> boundary;
};

/// F = I + grad u, L = grad v and the density at the half rows.
struct HalfRowFields {
  Grid grid;
  int rows = 0;  // n2 - 1
  std::vector<std::array<double, 4>> F;
  std::vector<std::array<double, 4>> L;
  std::vector<double> rho;

  std::size_t index(int i, int f) const { return static_cast<std::size_t>(i) * rows + f; }
};

namespace dynamics {

HalfRowFields half_row_fields(const FlowState& state, const MaterialParams& p,
                              const FaultInjection& fault = {});

/// Nodal lumped mass H_j rho_j.
double nodal_mass(const Grid& g, const ScalarField& rho0, int i, int j);

/// dv/dt without body forcing; `boundary` adds an extra traction per face.
VectorField momentum_rhs(const FlowState& state, const MaterialParams& p,
                         const FaultInjection& fault = {},
                         const BoundaryTrace<2>* extra_bottom = nullptr,
                         const BoundaryTrace<2>* extra_top = nullptr);

struct Rhs {
  VectorField deta;
  VectorField dv;
};

Rhs rhs(const FlowState& state, const MaterialParams& p, const Forcing* forcing = nullptr,
        const FaultInjection& fault = {});

struct StableDt {
  double dt = 0.0;
  double wave = 0.0;
  double viscous = 0.0;
  double capillary = 0.0;
  double wave_speed = 0.0;
};

/// dt = cfl * min(h / w, rho_min h^2 / (4 eps (2 mu + lambda) kappa), dt_cap).
StableDt stable_dt(const FlowState& state, const MaterialParams& p, double cfl);

FlowState step_rk4(const FlowState& s, double dt, const MaterialParams& p,
                   const Forcing* forcing = nullptr, const FaultInjection& fault = {});
FlowState step_euler(const FlowState& s, double dt, const MaterialParams& p,
                     const Forcing* forcing = nullptr, const FaultInjection& fault = {});

/// Semi-discrete dissipation sum over half rows of h1 h2 eps J (2 mu |S|^2 + lambda div^2).
double dissipation(const FlowState& state, const MaterialParams& p);

/// Face J at the half rows (the Jacobian the scheme evaluates pressure with).
std::vector<double> half_row_jacobian(const FlowState& state);

/// Max over both faces of |s Sigma_{.2} - sigma d1(d1 eta / |d1 eta|)| with
/// nodal Sigma from the centred/one-sided stencils.
double compatibility_residual(const FlowState& initial, const MaterialParams& p);

enum class RunStatus { completed, aborted };

struct RunFailure {
  std::string reason;
  double t = 0.0;
  FlowState last_good;
};

/// Everything an observer can see after each step (and once at t = 0).
struct StepView {
  long step = 0;
  double dt = 0.0;
  const FlowState& state;
  const std::deque<FlowState>& history;  // newest at back, includes state
  double dissipation_rate = 0.0;
  double dissipation_integral = 0.0;
  bool final_step = false;
};

using Observer = std::function<void(const StepView&)>;

struct Trajectory {
  std::vector<FlowState> snapshots;
  std::vector<double> dissipation_integral;  // matching snapshots
  std::deque<FlowState> history;
  RunStatus status = RunStatus::completed;
  std::optional<RunFailure> failure;
  double dt = 0.0;
  long steps = 0;
  StableDt dt_report;
  double max_piola_residual = 0.0;
  double max_j_drift = 0.0;

  const FlowState& final_state() const { return snapshots.back(); }
  bool ok() const { return status == RunStatus::completed; }
};

/// Fixed step used by simulate for a given initial state.
double choose_dt(const RunConfig& cfg, const FlowState& initial, const MaterialParams& p);

Trajectory simulate(const RunConfig& cfg, const MaterialParams& p, const FlowState& initial,
                    const Forcing* forcing = nullptr, const Observer& observer = {},
                    const FaultInjection& fault = {});

}  // namespace dynamics
}  // namespace fbve
