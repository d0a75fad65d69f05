/// @file geometry.hpp
/// @brief Kinematics of the flow map: deformation gradient, Jacobian,
/// cofactor, outward normal and the exact-identity residuals.
#pragma once

#include "fbve/grid_ops.hpp"

namespace fbve {

struct GeometryCache {
  MatrixField grad_eta;  // (r, c) = d_c eta_r
  ScalarField J;
  MatrixField a;  // cofactor, J * A
  MatrixField A;  // inverse transpose of grad_eta
  BoundaryTrace<1> g_metric_bottom, g_metric_top;
  BoundaryTrace<2> normal_bottom, normal_top;

  const BoundaryTrace<2>& normal(Face f) const { return f == Face::top ? normal_top : normal_bottom; }
  const BoundaryTrace<1>& g_metric(Face f) const {
    return f == Face::top ? g_metric_top : g_metric_bottom;
  }
};

namespace geometry {

inline constexpr double kDefaultJFloor = 1e-6;
inline constexpr double kTangentFloor = 1e-8;

MatrixField deformation_gradient(const VectorField& eta);

/// Pointwise determinant. Throws DegenerateMapError when J <= j_floor.
ScalarField jacobian(const MatrixField& grad_eta, double j_floor = kDefaultJFloor);

MatrixField cofactor(const MatrixField& grad_eta);

/// A = a / J.
MatrixField inverse_transpose(const MatrixField& a, const ScalarField& J);

/// Unit outward normal s * (-d1 eta_2, d1 eta_1) / |d1 eta| on a face.
BoundaryTrace<2> outward_normal(const VectorField& eta, Face face);

/// |d1 eta|^2 along a face.
BoundaryTrace<1> metric(const VectorField& eta, Face face);

/// Full cache; throws DegenerateMapError on J <= j_floor or a degenerate tangent.
GeometryCache build_cache(const VectorField& eta, double j_floor = kDefaultJFloor);

/// max over k and interior nodes of |d1 a_k1 + d2 a_k2|.
double piola_residual(const MatrixField& a);

/// Same quantity restricted to the two boundary rows.
double piola_residual_boundary(const MatrixField& a);

/// max over face nodes and (i, j) of |a_i2 a_j2 + d1eta_i d1eta_j - |d1eta|^2 delta_ij|,
/// relative to |d1eta|^2.
double metric_decomp_residual(const MatrixField& a, const MatrixField& grad_eta);

/// max over nodes of |a grad_eta^T - J I| relative to max(1, |J|).
double cofactor_identity_residual(const MatrixField& a, const MatrixField& grad_eta,
                                  const ScalarField& J);

/// max over d in {d1, d2} and interior nodes of |d J - a_ij d_j (d eta_i)|.
double geo_diff_residual(const VectorField& eta);

}  // namespace geometry
}  // namespace fbve
