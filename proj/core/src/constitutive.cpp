#include "fbve/constitutive.hpp"

#include <algorithm>
#include <sstream>

#include "fbve/errors.hpp"

namespace fbve {

void MaterialParams::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  if (!(gamma > 1.0)) fail("gamma must exceed 1");
  if (!(A_pressure > 0.0)) fail("A_pressure must be positive");
  if (!(mu > 0.0)) fail("mu must be positive");
  if (!(mu + lambda > 0.0)) fail("mu + lambda must be positive (coercivity of the viscous stress)");
  if (!(epsilon >= 0.0)) fail("epsilon must be non-negative");
  if (!(sigma >= 0.0)) fail("sigma must be non-negative");
  if (!(p_e > 0.0)) fail("p_e must be positive");
  if (!(c0 > 0.0 && c0 <= 1.0 && C0 >= 1.0)) fail("density bounds need 0 < c0 <= 1 <= C0");
  for (double r : rho0.values())
    if (!(r >= c0 && r <= C0)) {
      std::ostringstream os;
      os << "rho0 = " << r << " outside [c0, C0] = [" << c0 << ", " << C0 << "]";
      fail(os.str());
    }
}

MaterialParams MaterialParams::unit(const Grid& g) {
  MaterialParams p;
  p.rho0 = ScalarField(g, 1.0);
  return p;
}

namespace constitutive {

double pressure(double rho0, double J, const MaterialParams& p) {
  if (!(J > 0.0)) throw DegenerateMapError("pressure: J must be positive");
  return p.A_pressure * std::pow(rho0 / J, p.gamma) + 1.0 - p.p_e;
}

ScalarField pressure(const ScalarField& rho0, const ScalarField& J, const MaterialParams& p) {
  ScalarField q(J.grid());
  for (std::size_t k = 0; k < q.values().size(); ++k)
    q.values()[k] = pressure(rho0.values()[k], J.values()[k], p);
  return q;
}

double potential_Q(double f, const MaterialParams& p) {
  return p.A_pressure * (std::pow(f, p.gamma - 1.0) - 1.0) / (p.gamma - 1.0) +
         (1.0 - p.p_e) * (1.0 - 1.0 / f);
}

ScalarField potential_Q(const ScalarField& f, const MaterialParams& p) {
  ScalarField out(f.grid());
  for (std::size_t k = 0; k < out.values().size(); ++k) out.values()[k] = potential_Q(f.values()[k], p);
  return out;
}

namespace {

/// Nodal velocity gradient L_rc = d_c v_r.
MatrixField velocity_gradient(const VectorField& v) {
  const VectorField v1 = ops::d1(v);
  const VectorField v2 = ops::d2(v);
  const Grid& g = v.grid();
  MatrixField L(g);
  for (int r = 0; r < 2; ++r)
    for (int i = 0; i < g.n1; ++i)
      for (int j = 0; j < g.n2; ++j) {
        L(mi(r, 0), i, j) = v1(r, i, j);
        L(mi(r, 1), i, j) = v2(r, i, j);
      }
  return L;
}

/// M = L A^T at one node.
std::array<double, 4> lat(const MatrixField& L, const MatrixField& A, int i, int j) {
  std::array<double, 4> M{};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c)
      M[2 * r + c] = L(mi(r, 0), i, j) * A(mi(c, 0), i, j) + L(mi(r, 1), i, j) * A(mi(c, 1), i, j);
  return M;
}

}  // namespace

MatrixField symmetric_gradient(const VectorField& v, const MatrixField& A) {
  const MatrixField L = velocity_gradient(v);
  const Grid& g = v.grid();
  MatrixField S(g);
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) {
      const auto M = lat(L, A, i, j);
      S(0, i, j) = M[0];
      S(1, i, j) = S(2, i, j) = 0.5 * (M[1] + M[2]);
      S(3, i, j) = M[3];
    }
  return S;
}

ScalarField div_A(const VectorField& v, const MatrixField& A) {
  const MatrixField L = velocity_gradient(v);
  const Grid& g = v.grid();
  ScalarField d(g);
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) {
      const auto M = lat(L, A, i, j);
      d(i, j) = M[0] + M[3];
    }
  return d;
}

MatrixField piola_stress(const FlowState& state, const GeometryCache& cache, const MaterialParams& p) {
  const Grid& g = state.grid();
  const MatrixField L = p.viscous() ? velocity_gradient(state.v) : MatrixField(g);
  MatrixField sigma(g);
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) {
      std::array<double, 4> F, Lp;
      for (int k = 0; k < 4; ++k) {
        F[k] = cache.grad_eta(k, i, j);
        Lp[k] = L(k, i, j);
      }
      const auto s = stress_kernel(F, Lp, p.rho0(i, j), p);
      for (int k = 0; k < 4; ++k) sigma(k, i, j) = s[k];
    }
  ops::require_finite(sigma, "Piola stress");
  return sigma;
}

BoundaryTrace<2> traction(const VectorField& eta, Face face, const MaterialParams& p) {
  const Grid& g = eta.grid();
  const auto t = ops::d1(ops::trace(eta, face));
  BoundaryTrace<2> tau(g, face);
  for (int i = 0; i < g.n1; ++i) {
    const double len = std::hypot(t(0, i), t(1, i));
    if (!(len >= geometry::kTangentFloor))
      throw DegenerateMapError("traction: degenerate boundary tangent");
    tau(0, i) = t(0, i) / len;
    tau(1, i) = t(1, i) / len;
  }
  auto out = ops::d1(tau);
  for (double& x : out.values) x *= p.sigma;
  return out;
}

double boundary_B_residual(const FlowState& state, const GeometryCache& cache,
                           const MaterialParams& p, Face face) {
  const Grid& g = state.grid();
  const VectorField eta = state.eta();
  const auto t1 = ops::d1(ops::trace(eta, face));
  const auto t11 = ops::d1(t1);
  const int j = face_row(g, face);
  const double s = face_sign(face);
  const MatrixField L = velocity_gradient(state.v);
  double m = 0.0;
  for (int i = 0; i < g.n1; ++i) {
    const double a12 = cache.a(mi(0, 1), i, j);
    const double a22 = cache.a(mi(1, 1), i, j);
    const double gm = t1(0, i) * t1(0, i) + t1(1, i) * t1(1, i);
    const double len = std::sqrt(gm);
    const double J = cache.J(i, j);
    const double q = pressure(p.rho0(i, j), J, p);
    const double lhs = s * p.sigma * (t11(0, i) * a12 + t11(1, i) * a22) / (gm * len) + q;
    double rhs = p.elastic ? p.rho0(i, j) * J / gm : 0.0;
    if (p.viscous()) {
      const auto M = lat(L, cache.A, i, j);
      const double c2[2] = {a12, a22};
      // a_k2 A_il d_l v_k a_i2 = a_k2 M_ki a_i2
      double visc = 0.0;
      for (int k = 0; k < 2; ++k)
        for (int r = 0; r < 2; ++r) visc += c2[k] * M[2 * k + r] * c2[r];
      rhs += p.epsilon * (2.0 * p.mu * visc / gm + p.lambda * (M[0] + M[3]));
    }
    m = std::max(m, std::abs(lhs - rhs));
  }
  return m;
}

}  // namespace constitutive
}  // namespace fbve
