#include "fbve/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fbve/errors.hpp"

namespace fbve {

void RunConfig::validate() const {
  if (!(t_end > 0.0)) throw ConfigError("t_end must be positive");
  if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("cfl must lie in (0, 1]");
  if (!(dt >= 0.0)) throw ConfigError("dt must be non-negative");
  if (output_every < 0) throw ConfigError("output_every must be non-negative");
  if (history_depth < 1) throw ConfigError("history_depth must be at least 1");
}

namespace dynamics {

namespace {

double det(const std::array<double, 4>& F) { return F[0] * F[3] - F[1] * F[2]; }

/// Largest singular value of a 2x2 matrix.
double spectral_norm(const std::array<double, 4>& F) {
  const double fro = F[0] * F[0] + F[1] * F[1] + F[2] * F[2] + F[3] * F[3];
  const double J = det(F);
  const double disc = std::max(0.0, fro * fro - 4.0 * J * J);
  return std::sqrt(0.5 * (fro + std::sqrt(disc)));
}

}  // namespace

HalfRowFields half_row_fields(const FlowState& state, const MaterialParams& p, const FaultInjection&) {
  const Grid& g = state.grid();
  HalfRowFields hf;
  hf.grid = g;
  hf.rows = g.n2 - 1;
  const std::size_t n = static_cast<std::size_t>(g.n1) * hf.rows;
  hf.F.resize(n);
  hf.L.resize(n);
  hf.rho.resize(n);
  const VectorField du = ops::d1(state.u);
  const bool need_l = p.viscous();
  VectorField dv;
  if (need_l) dv = ops::d1(state.v);
  const double inv2 = 1.0 / g.h2;
  for (int i = 0; i < g.n1; ++i)
    for (int f = 0; f < hf.rows; ++f) {
      const std::size_t k = hf.index(i, f);
      auto& F = hf.F[k];
      for (int r = 0; r < 2; ++r) {
        F[2 * r] = 0.5 * (du(r, i, f) + du(r, i, f + 1));
        F[2 * r + 1] = (state.u(r, i, f + 1) - state.u(r, i, f)) * inv2;
      }
      F[0] += 1.0;
      F[3] += 1.0;
      auto& L = hf.L[k];
      if (need_l) {
        for (int r = 0; r < 2; ++r) {
          L[2 * r] = 0.5 * (dv(r, i, f) + dv(r, i, f + 1));
          L[2 * r + 1] = (state.v(r, i, f + 1) - state.v(r, i, f)) * inv2;
        }
      } else {
        L = {0.0, 0.0, 0.0, 0.0};
      }
      hf.rho[k] = 0.5 * (p.rho0(i, f) + p.rho0(i, f + 1));
    }
  return hf;
}

double nodal_mass(const Grid& g, const ScalarField& rho0, int i, int j) {
  return ops::row_weight(g, j) * rho0(i, j);
}

std::vector<double> half_row_jacobian(const FlowState& state) {
  MaterialParams inviscid;
  inviscid.epsilon = 0.0;
  inviscid.rho0 = ScalarField(state.grid(), 1.0);
  const HalfRowFields hf = half_row_fields(state, inviscid);
  std::vector<double> J(hf.F.size());
  for (std::size_t k = 0; k < J.size(); ++k) J[k] = det(hf.F[k]);
  return J;
}

VectorField momentum_rhs(const FlowState& state, const MaterialParams& p, const FaultInjection& fault,
                         const BoundaryTrace<2>* extra_bottom, const BoundaryTrace<2>* extra_top) {
  const Grid& g = state.grid();
  const HalfRowFields hf = half_row_fields(state, p, fault);
  std::vector<std::array<double, 4>> P(hf.F.size());
  for (std::size_t k = 0; k < P.size(); ++k) {
    if (!(det(hf.F[k]) > 0.0)) throw DegenerateMapError("momentum_rhs: non-positive Jacobian");
    P[k] = constitutive::stress_kernel(hf.F[k], hf.L[k], hf.rho[k], p);
  }

  const VectorField eta = state.eta();
  BoundaryTrace<2> tb = constitutive::traction(eta, Face::bottom, p);
  BoundaryTrace<2> tt = constitutive::traction(eta, Face::top, p);
  if (fault.flip_bottom_traction)
    for (double& x : tb.values) x = -x;
  if (fault.bottom_traction_offset != 0.0)
    for (int i = 0; i < g.n1; ++i) tb(1, i) += fault.bottom_traction_offset;
  if (extra_bottom)
    for (std::size_t k = 0; k < tb.values.size(); ++k) tb.values[k] += extra_bottom->values[k];
  if (extra_top)
    for (std::size_t k = 0; k < tt.values.size(); ++k) tt.values[k] += extra_top->values[k];

  const int rows = hf.rows;
  const int top = g.n2 - 1;
  // D1 of the x1 flux at each half row.
  std::vector<std::array<double, 2>> div1(P.size());
  for (int i = 0; i < g.n1; ++i) {
    const int ip = (i + 1) % g.n1;
    const int im = (i + g.n1 - 1) % g.n1;
    for (int f = 0; f < rows; ++f)
      for (int r = 0; r < 2; ++r) {
        const double pp = P[hf.index(ip, f)][2 * r];
        div1[hf.index(i, f)][r] = fault.lopsided_x1
                                      ? (pp - P[hf.index(i, f)][2 * r]) / g.h1
                                      : (pp - P[hf.index(im, f)][2 * r]) / (2.0 * g.h1);
      }
  }

  VectorField dv(g);
  const double half = 0.5 * g.h2;
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j)
      for (int r = 0; r < 2; ++r) {
        double R = 0.0;
        if (j > 0) R += half * div1[hf.index(i, j - 1)][r] - P[hf.index(i, j - 1)][2 * r + 1];
        else R += tb(r, i);
        if (j < top) R += half * div1[hf.index(i, j)][r] + P[hf.index(i, j)][2 * r + 1];
        else R += tt(r, i);
        dv(r, i, j) = R / nodal_mass(g, p.rho0, i, j);
      }
  ops::require_finite(dv, "momentum right-hand side");
  return dv;
}

Rhs rhs(const FlowState& state, const MaterialParams& p, const Forcing* forcing,
        const FaultInjection& fault) {
  Rhs out;
  out.deta = state.v;
  if (forcing && forcing->boundary) {
    BoundaryTrace<2> gb(state.grid(), Face::bottom), gt(state.grid(), Face::top);
    forcing->boundary(state.t, gb, gt);
    out.dv = momentum_rhs(state, p, fault, &gb, &gt);
  } else {
    out.dv = momentum_rhs(state, p, fault);
  }
  if (forcing && forcing->body) out.dv += forcing->body(state.t);
  return out;
}

StableDt stable_dt(const FlowState& state, const MaterialParams& p, double cfl) {
  const Grid& g = state.grid();
  MaterialParams geo = p;
  geo.epsilon = 0.0;
  const HalfRowFields hf = half_row_fields(state, geo);
  double rho_min = std::numeric_limits<double>::infinity(), rho_max = 0.0;
  for (double r : p.rho0.values()) {
    rho_min = std::min(rho_min, r);
    rho_max = std::max(rho_max, r);
  }
  double j_min = std::numeric_limits<double>::infinity();
  double a_max = 0.0, fg_max = 0.0, kappa = 0.0;
  for (std::size_t k = 0; k < hf.F.size(); ++k) {
    const double J = det(hf.F[k]);
    if (!(J > 0.0)) throw DegenerateMapError("stable_dt: non-positive Jacobian");
    const double an = spectral_norm(hf.F[k]);
    j_min = std::min(j_min, J);
    a_max = std::max(a_max, an);
    fg_max = std::max(fg_max, std::pow(hf.rho[k] / J, p.gamma));
    kappa = std::max(kappa, an * an / J);
  }
  StableDt out;
  const double h = std::min(g.h1, g.h2);
  const double stiff = p.gamma * p.A_pressure * fg_max + (p.elastic ? rho_max * a_max * a_max : 0.0);
  out.wave_speed = std::sqrt(stiff / rho_min) * a_max / j_min;
  out.wave = h / out.wave_speed;
  out.viscous = std::numeric_limits<double>::infinity();
  if (p.epsilon > 0.0)
    out.viscous = rho_min * h * h / (4.0 * p.epsilon * (2.0 * p.mu + std::max(p.lambda, 0.0)) * kappa);
  out.capillary = std::numeric_limits<double>::infinity();
  if (p.sigma > 0.0) {
    double g_min = std::numeric_limits<double>::infinity();
    const VectorField eta = state.eta();
    for (Face face : kFaces) {
      const auto m = geometry::metric(eta, face);
      for (double x : m.values) g_min = std::min(g_min, x);
    }
    out.capillary = g.h1 * std::sqrt(rho_min * g.h2 * std::sqrt(g_min) / (8.0 * p.sigma));
  }
  out.dt = cfl * std::min({out.wave, out.viscous, out.capillary});
  return out;
}

namespace {

FlowState advance(const FlowState& s, double dt, const Rhs& k) {
  FlowState out = s;
  out.u.axpy(dt, k.deta);
  out.v.axpy(dt, k.dv);
  out.t = s.t + dt;
  return out;
}

}  // namespace

FlowState step_euler(const FlowState& s, double dt, const MaterialParams& p, const Forcing* forcing,
                     const FaultInjection& fault) {
  return advance(s, dt, rhs(s, p, forcing, fault));
}

FlowState step_rk4(const FlowState& s, double dt, const MaterialParams& p, const Forcing* forcing,
                   const FaultInjection& fault) {
  const Rhs k1 = rhs(s, p, forcing, fault);
  const Rhs k2 = rhs(advance(s, 0.5 * dt, k1), p, forcing, fault);
  const Rhs k3 = rhs(advance(s, 0.5 * dt, k2), p, forcing, fault);
  const Rhs k4 = rhs(advance(s, dt, k3), p, forcing, fault);
  FlowState out = s;
  const double w = dt / 6.0;
  out.u.axpy(w, k1.deta).axpy(2.0 * w, k2.deta).axpy(2.0 * w, k3.deta).axpy(w, k4.deta);
  out.v.axpy(w, k1.dv).axpy(2.0 * w, k2.dv).axpy(2.0 * w, k3.dv).axpy(w, k4.dv);
  out.t = s.t + dt;
  return out;
}

double dissipation(const FlowState& state, const MaterialParams& p) {
  if (!p.viscous()) return 0.0;
  const Grid& g = state.grid();
  const HalfRowFields hf = half_row_fields(state, p);
  double d = 0.0;
  for (std::size_t k = 0; k < hf.F.size(); ++k) {
    const auto& F = hf.F[k];
    const auto& L = hf.L[k];
    const double J = det(F);
    const std::array<double, 4> a{F[3], -F[2], -F[1], F[0]};
    double M[4];
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) M[2 * r + c] = (L[2 * r] * a[2 * c] + L[2 * r + 1] * a[2 * c + 1]) / J;
    const double off = 0.5 * (M[1] + M[2]);
    const double s2 = M[0] * M[0] + M[3] * M[3] + 2.0 * off * off;
    const double div = M[0] + M[3];
    d += J * (2.0 * p.mu * s2 + p.lambda * div * div);
  }
  return p.epsilon * d * g.h1 * g.h2;
}

double compatibility_residual(const FlowState& initial, const MaterialParams& p) {
  const Grid& g = initial.grid();
  const VectorField eta = initial.eta();
  const GeometryCache cache = geometry::build_cache(eta);
  const MatrixField sigma = constitutive::piola_stress(initial, cache, p);
  double m = 0.0;
  for (Face face : kFaces) {
    const auto t = constitutive::traction(eta, face, p);
    const int j = face_row(g, face);
    const double s = face_sign(face);
    for (int i = 0; i < g.n1; ++i)
      for (int r = 0; r < 2; ++r) m = std::max(m, std::abs(s * sigma(mi(r, 1), i, j) - t(r, i)));
  }
  return m;
}

double choose_dt(const RunConfig& cfg, const FlowState& initial, const MaterialParams& p) {
  const double target = cfg.dt > 0.0 ? cfg.dt : stable_dt(initial, p, cfg.cfl).dt;
  const double n = std::ceil(cfg.t_end / target * (1.0 - 1e-12));
  return cfg.t_end / std::max(1.0, n);
}

namespace {

double interior_piola(const VectorField& u) {
  MatrixField F = geometry::deformation_gradient(u);
  for (double& x : F.component(0)) x += 1.0;
  for (double& x : F.component(3)) x += 1.0;
  return geometry::piola_residual(geometry::cofactor(F));
}

}  // namespace

Trajectory simulate(const RunConfig& cfg, const MaterialParams& p, const FlowState& initial,
                    const Forcing* forcing, const Observer& observer, const FaultInjection& fault) {
  cfg.validate();
  p.validate();
  if (!(initial.grid() == p.rho0.grid())) throw ConfigError("rho0 grid does not match the state");
  if (!initial.u.all_finite() || !initial.v.all_finite())
    throw DegenerateMapError("initial data is not finite");

  Trajectory traj;
  traj.dt_report = stable_dt(initial, p, cfg.cfl);
  traj.dt = choose_dt(cfg, initial, p);
  const long nsteps = std::lround(cfg.t_end / traj.dt);
  const long every = cfg.output_every > 0 ? cfg.output_every : std::max<long>(1, nsteps / 50);
  const double drift_bound = p.c0 / 8.0;

  const std::vector<double> J0 = half_row_jacobian(initial);
  for (double J : J0)
    if (!(J > cfg.j_floor)) throw DegenerateMapError("initial Jacobian below J_floor");

  FlowState state = initial;
  traj.history.push_back(state);
  double d_prev = dissipation(state, p);
  double d_int = 0.0;
  traj.snapshots.push_back(state);
  traj.dissipation_integral.push_back(0.0);
  traj.max_piola_residual = interior_piola(state.u);
  if (observer) observer(StepView{0, traj.dt, state, traj.history, d_prev, 0.0, nsteps == 0});

  for (long n = 1; n <= nsteps; ++n) {
    FlowState next;
    double d_next = 0.0;
    try {
      next = cfg.integrator == Integrator::rk4 ? step_rk4(state, traj.dt, p, forcing, fault)
                                               : step_euler(state, traj.dt, p, forcing, fault);
      next.t = initial.t + n * traj.dt;
      ops::require_finite(next.u, "displacement");
      ops::require_finite(next.v, "velocity");
      const std::vector<double> J = half_row_jacobian(next);
      double drift = 0.0;
      for (std::size_t k = 0; k < J.size(); ++k) {
        if (!(J[k] > cfg.j_floor)) {
          std::ostringstream os;
          os << "J = " << J[k] << " fell below J_floor";
          throw DegenerateMapError(os.str());
        }
        drift = std::max(drift, std::abs(J[k] - J0[k]));
      }
      traj.max_j_drift = std::max(traj.max_j_drift, drift);
      if (drift > drift_bound) {
        std::ostringstream os;
        os << "max |J - J0| = " << drift << " exceeds c0/8 = " << drift_bound;
        throw DegenerateMapError(os.str());
      }
      const double pr = interior_piola(next.u);
      traj.max_piola_residual = std::max(traj.max_piola_residual, pr);
      if (pr > cfg.piola_tolerance) {
        std::ostringstream os;
        os << "interior Piola residual " << pr << " exceeds " << cfg.piola_tolerance;
        throw DegenerateMapError(os.str());
      }
      d_next = dissipation(next, p);
    } catch (const Error& e) {
      traj.status = RunStatus::aborted;
      traj.failure = RunFailure{e.what(), state.t + traj.dt, state};
      if (traj.snapshots.back().t != state.t) {
        traj.snapshots.push_back(state);
        traj.dissipation_integral.push_back(d_int);
      }
      return traj;
    }
    d_int += 0.5 * traj.dt * (d_prev + d_next);
    d_prev = d_next;
    state = std::move(next);
    traj.history.push_back(state);
    while (static_cast<int>(traj.history.size()) > cfg.history_depth) traj.history.pop_front();
    traj.steps = n;
    if (observer) observer(StepView{n, traj.dt, state, traj.history, d_next, d_int, n == nsteps});
    if (n % every == 0 || n == nsteps) {
      traj.snapshots.push_back(state);
      traj.dissipation_integral.push_back(d_int);
    }
  }
  return traj;
}

}  // namespace dynamics
}  // namespace fbve
