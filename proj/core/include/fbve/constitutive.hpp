/// @file constitutive.hpp
/// @brief Pressure law, neo-Hookean flux, viscous stress and surface tension.
#pragma once

#include <array>
#include <cmath>

#include "fbve/dual.hpp"
#include "fbve/geometry.hpp"
#include "fbve/state.hpp"

namespace fbve {

struct MaterialParams {
  double gamma = 2.0;
  double A_pressure = 1.0;
  double mu = 1.0;
  double lambda = 0.0;
  double epsilon = 1e-2;
  double sigma = 0.05;
  double p_e = 1.0;
  /// Density bounds c0 <= rho0 <= C0.
  double c0 = 0.5;
  double C0 = 2.0;
  /// Ablation switch for the rho0 * grad(eta) flux.
  bool elastic = true;
  ScalarField rho0;

  /// Throws ConfigError naming the violated constraint.
  void validate() const;
  bool viscous() const { return epsilon > 0.0; }

  /// Default parameters with rho0 = 1 on g.
  static MaterialParams unit(const Grid& g);
};

namespace constitutive {

/// q = A (rho0 / J)^gamma + 1 - p_e. Throws DegenerateMapError for J <= 0.
ScalarField pressure(const ScalarField& rho0, const ScalarField& J, const MaterialParams& p);
double pressure(double rho0, double J, const MaterialParams& p);

/// Q(f) = A (f^(gamma-1) - 1)/(gamma-1) + (1 - p_e)(1 - 1/f).
double potential_Q(double f, const MaterialParams& p);
ScalarField potential_Q(const ScalarField& f, const MaterialParams& p);

/// (S_A v)_ik = (A_kj d_j v_i + A_ij d_j v_k)/2, nodal.
MatrixField symmetric_gradient(const VectorField& v, const MatrixField& A);

/// A_kl d_l v_k, nodal.
ScalarField div_A(const VectorField& v, const MatrixField& A);

/// Nodal Piola stress
/// Sigma_ij = -q a_ij + 2 mu eps (S_A v)_ik a_kj + lambda eps (div_A v) a_ij + rho0 d_j eta_i.
MatrixField piola_stress(const FlowState& state, const GeometryCache& cache, const MaterialParams& p);

/// sigma * d1(d1 eta / |d1 eta|) along a face.
BoundaryTrace<2> traction(const VectorField& eta, Face face, const MaterialParams& p);

/// max over face nodes of |B_lhs - B_rhs| with
/// B_lhs = s sigma (d1^2 eta . a_2) / |d1 eta|^3 + q,
/// B_rhs = 2 mu eps (a_k2 A_il d_l v_k a_i2)/|d1 eta|^2 + lambda eps div_A v + rho0 J / |d1 eta|^2.
double boundary_B_residual(const FlowState& state, const GeometryCache& cache,
                           const MaterialParams& p, Face face);

/// Pointwise kernel shared by the solver and the continuous manufactured
/// forcing. F and L are row-major 2x2 (F_rc = d_c eta_r, L_rc = d_c v_r).
template <class T>
std::array<T, 4> stress_kernel(const std::array<T, 4>& F, const std::array<T, 4>& L, const T& rho,
                               const MaterialParams& p) {
  const T J = F[0] * F[3] - F[1] * F[2];
  const std::array<T, 4> a{F[3], -F[2], -F[1], F[0]};
  const T f = rho / J;
  using std::pow;
  const T q = p.A_pressure * pow(f, p.gamma) + (1.0 - p.p_e);
  std::array<T, 4> s{-q * a[0], -q * a[1], -q * a[2], -q * a[3]};
  if (p.epsilon > 0.0) {
    // M = L A^T with A = a / J.
    std::array<T, 4> M;
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) M[2 * r + c] = (L[2 * r] * a[2 * c] + L[2 * r + 1] * a[2 * c + 1]) / J;
    const T div = M[0] + M[3];
    const std::array<T, 4> S{M[0], 0.5 * (M[1] + M[2]), 0.5 * (M[1] + M[2]), M[3]};
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) {
        T v = p.lambda * div * a[2 * r + c];
        v += 2.0 * p.mu * (S[2 * r] * a[c] + S[2 * r + 1] * a[2 + c]);
        s[2 * r + c] += p.epsilon * v;
      }
  }
  if (p.elastic)
    for (int k = 0; k < 4; ++k) s[k] += rho * F[k];
  return s;
}

}  // namespace constitutive
}  // namespace fbve
