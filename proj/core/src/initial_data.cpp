#include "fbve/initial_data.hpp"

#include <cmath>
#include <numbers>

#include "fbve/errors.hpp"

namespace fbve::initial_data {

FlowState equilibrium(const Grid& g) { return FlowState(g); }

namespace {

/// Solves k b - |c| q(|c| b) - rhs = 0 for b, with q evaluated at density
/// rho; k is rho with the elastic flux on and 0 without. Monotone in b.
double solve_normal(double k, double rho, double clen, double rhs, const MaterialParams& p) {
  double b = 1.0 / clen;
  for (int it = 0; it < 100; ++it) {
    const double J = clen * b;
    const double f = rho / J;
    const double q = p.A_pressure * std::pow(f, p.gamma) + 1.0 - p.p_e;
    const double dq = -p.gamma * p.A_pressure * std::pow(f, p.gamma) / J;
    const double r = k * b - clen * q - rhs;
    const double dr = k - clen * clen * dq;
    double step = r / dr;
    while (!(clen * (b - step) > 0.0)) step *= 0.5;
    b -= step;
    if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(b))) return b;
  }
  throw DegenerateMapError("initial data: normal-slope Newton did not converge");
}

}  // namespace

FlowState well_prepared(const Grid& g, const MaterialParams& p, const PerturbationSpec& spec) {
  using std::numbers::pi;
  std::mt19937_64 rng(spec.seed);
  const double phi_top = 2.0 * pi * uniform01(rng);
  const double phi_bot = 2.0 * pi * uniform01(rng);
  const double phi_in = 2.0 * pi * uniform01(rng);
  const double k = 2.0 * pi * spec.mode;
  const double a = spec.amplitude;

  FlowState s(g);
  const int top = g.n2 - 1;
  for (int i = 0; i < g.n1; ++i) {
    s.u(1, i, top) = a * std::sin(k * g.x1(i) + phi_top);
    s.u(1, i, 0) = 0.5 * a * std::sin(k * g.x1(i) + phi_bot);
  }

  // Face derivative d2 eta that makes s Sigma_{.2} equal the traction.
  VectorField eta = s.eta();
  std::array<std::vector<std::array<double, 2>>, 2> w;
  for (Face face : kFaces) {
    const auto c = ops::d1(ops::trace(eta, face));
    const auto t = constitutive::traction(eta, face, p);
    const double sgn = face_sign(face);
    const int j = face_row(g, face);
    auto& wf = w[face == Face::top ? 1 : 0];
    wf.resize(g.n1);
    for (int i = 0; i < g.n1; ++i) {
      const double clen = std::hypot(c(0, i), c(1, i));
      const double tau[2] = {c(0, i) / clen, c(1, i) / clen};
      const double nrm[2] = {-tau[1], tau[0]};
      const double rho = p.rho0(i, j);
      const double alpha = p.elastic ? sgn * (t(0, i) * tau[0] + t(1, i) * tau[1]) / rho : 0.0;
      const double rhs = sgn * (t(0, i) * nrm[0] + t(1, i) * nrm[1]);
      // Without the elastic flux only the normal balance -q |c| = s t.n can be met.
      const double beta = solve_normal(p.elastic ? rho : 0.0, rho, clen, rhs, p);
      wf[i] = {alpha * tau[0] + beta * nrm[0], alpha * tau[1] + beta * nrm[1]};
    }
  }

  // Cubic Hermite blend in x2 of face values and face slopes of u, plus an
  // interior bump with zero value and slope on both faces.
  for (int i = 0; i < g.n1; ++i) {
    const double ub[2] = {s.u(0, i, 0), s.u(1, i, 0)};
    const double ut[2] = {s.u(0, i, top), s.u(1, i, top)};
    const double db[2] = {w[0][i][0], w[0][i][1] - 1.0};
    const double dt[2] = {w[1][i][0], w[1][i][1] - 1.0};
    const double bump = spec.interior * a * std::sin(k * g.x1(i) + phi_in);
    for (int j = 0; j < g.n2; ++j) {
      const double x = g.x2(j);
      const double h00 = 2 * x * x * x - 3 * x * x + 1;
      const double h01 = -2 * x * x * x + 3 * x * x;
      const double h10 = x * x * x - 2 * x * x + x;
      const double h11 = x * x * x - x * x;
      const double sb = std::sin(pi * x);
      for (int r = 0; r < 2; ++r)
        s.u(r, i, j) = h00 * ub[r] + h01 * ut[r] + h10 * db[r] + h11 * dt[r];
      s.u(0, i, j) += bump * sb * sb;
    }
    // Match the one-sided stencil exactly on both faces.
    const double h2 = g.h2;
    for (int r = 0; r < 2; ++r) {
      s.u(r, i, 1) = (2.0 * h2 * db[r] + 3.0 * s.u(r, i, 0) + s.u(r, i, 2)) / 4.0;
      s.u(r, i, top - 1) = (3.0 * s.u(r, i, top) + s.u(r, i, top - 2) - 2.0 * h2 * dt[r]) / 4.0;
    }
  }
  return s;
}

}  // namespace fbve::initial_data
