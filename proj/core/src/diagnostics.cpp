#include "fbve/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "fbve/errors.hpp"

namespace fbve::diagnostics {

EnergyTerms basic_energy(const FlowState& state, const MaterialParams& p) {
  const Grid& g = state.grid();
  EnergyTerms e;
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) {
      const double v2 = state.v(0, i, j) * state.v(0, i, j) + state.v(1, i, j) * state.v(1, i, j);
      e.kinetic += 0.5 * dynamics::nodal_mass(g, p.rho0, i, j) * v2;
    }
  e.kinetic *= g.h1;

  MaterialParams geo = p;
  geo.epsilon = 0.0;
  const HalfRowFields hf = dynamics::half_row_fields(state, geo);
  const double w = g.h1 * g.h2;
  for (std::size_t k = 0; k < hf.F.size(); ++k) {
    const auto& F = hf.F[k];
    const double J = F[0] * F[3] - F[1] * F[2];
    if (p.elastic) e.elastic += 0.5 * hf.rho[k] * (F[0] * F[0] + F[1] * F[1] + F[2] * F[2] + F[3] * F[3]);
    e.pressure_potential += hf.rho[k] * constitutive::potential_Q(hf.rho[k] / J, p);
    e.volume += J;
  }
  e.elastic *= w;
  e.pressure_potential *= w;
  e.volume *= w;

  if (p.sigma > 0.0) {
    const VectorField eta = state.eta();
    double len = 0.0;
    for (Face face : kFaces) {
      const auto m = geometry::metric(eta, face);
      for (double x : m.values) len += std::sqrt(x);
    }
    e.surface = p.sigma * len * g.h1;
  }
  return e;
}

double dissipation_rate(const FlowState& state, const MaterialParams& p) {
  return dynamics::dissipation(state, p);
}

EnergyBalance energy_balance_residual(const dynamics::Trajectory& traj, const MaterialParams& p) {
  EnergyBalance b;
  if (traj.snapshots.empty()) return b;
  const double e0 = basic_energy(traj.snapshots.front(), p).conserved();
  b.min_dissipation = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    const FlowState& s = traj.snapshots[k];
    const double e = basic_energy(s, p).conserved();
    const double dint = traj.dissipation_integral[k];
    const double r = std::abs(e + dint - e0);
    b.t.push_back(s.t);
    b.energy.push_back(e);
    b.dissipation_integral.push_back(dint);
    b.residual.push_back(r);
    b.max_residual = std::max(b.max_residual, r);
    b.min_dissipation = std::min(b.min_dissipation, dissipation_rate(s, p));
  }
  return b;
}

VectorField time_derivative_v(const std::deque<FlowState>& history, int order, double dt) {
  if (history.empty() || static_cast<int>(history.size()) < order + 1) {
    std::ostringstream os;
    os << "time derivative of order " << order << " needs " << order + 1 << " states, have "
       << history.size();
    throw InsufficientHistoryError(os.str());
  }
  const int n = static_cast<int>(history.size()) - 1;
  VectorField out = history[n].v;
  if (order == 0) return out;
  out *= 0.0;
  double binom = 1.0;
  for (int k = 0; k <= order; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    out.axpy(sign * binom, history[n - k].v);
    binom = binom * (order - k) / (k + 1);
  }
  out *= 1.0 / std::pow(dt, order);
  return out;
}

double EnergyFunctionalTerms::total() const {
  double s = 0.0;
  for (double x : point) s += x;
  for (double x : integral) s += x;
  return s;
}

namespace {

double sq(double x) { return x * x; }

/// d_t^l eta: eta itself for l = 0, otherwise d_t^(l-1) v.
VectorField time_derivative_eta(const std::deque<FlowState>& h, int l, double dt) {
  if (l == 0) return h.back().eta();
  return time_derivative_v(h, l - 1, dt);
}

template <int N>
Field<N> d1_pow(Field<N> f, int k) {
  for (int i = 0; i < k; ++i) f = ops::d1(f);
  return f;
}

template <int N>
double norm0_sq(const Field<N>& f) {
  Field<N> g = f;
  g.jump() = {};
  return ops::l2_norm_squared(g);
}

/// ||grad^2 w||^2_{H^k} summed over the four second-derivative slots.
double hessian_norm_sq(const VectorField& w, int k) {
  const MatrixField G = geometry::deformation_gradient(w);
  return sq(ops::sobolev_norm(ops::d1(G), k)) + sq(ops::sobolev_norm(ops::d2(G), k));
}

/// sum over faces of |d1^k (d1^2 w) . n|_0^2.
double boundary_curvature_sq(const VectorField& w, int k, const GeometryCache& cache) {
  double s = 0.0;
  for (Face face : kFaces) {
    auto t = ops::d1(ops::d1(ops::trace(w, face)));
    for (int i = 0; i < k; ++i) t = ops::d1(t);
    const auto& n = cache.normal(face);
    BoundaryTrace<1> dot(w.grid(), face);
    for (int i = 0; i < w.grid().n1; ++i) dot(0, i) = t(0, i) * n(0, i) + t(1, i) * n(1, i);
    s += sq(ops::trace_l2_norm(dot));
  }
  return s;
}

}  // namespace

EnergyFunctionalTerms energy_functional_point(const std::deque<FlowState>& h, double dt, int m,
                                              const MaterialParams& p) {
  if (m < 1 || m > 3) throw std::invalid_argument("m_diag must lie in [1, 3]");
  if (static_cast<int>(h.size()) < m + 1)
    throw InsufficientHistoryError("energy functional needs m_diag + 1 states");
  EnergyFunctionalTerms e;
  e.m = m;
  const VectorField eta = h.back().eta();
  const GeometryCache cache = geometry::build_cache(eta);
  for (int l = 0; l <= m; ++l) e.point[0] += sq(ops::sobolev_norm(time_derivative_eta(h, l, dt), m - l));
  for (int l = 0; l <= m - 1; ++l) {
    const VectorField w = time_derivative_eta(h, l, dt);
    e.point[1] += norm0_sq(d1_pow(geometry::deformation_gradient(w), m - l));
    e.point[2] += boundary_curvature_sq(w, m - 1 - l, cache);
    if (p.epsilon > 0.0) e.point[3] += p.epsilon * hessian_norm_sq(w, m - 1 - l);
  }
  return e;
}

std::array<double, 7> energy_functional_integrands(const std::deque<FlowState>& h, double dt, int m,
                                                   const MaterialParams& p) {
  if (static_cast<int>(h.size()) < m + 1)
    throw InsufficientHistoryError("energy functional needs m_diag + 1 states");
  std::array<double, 7> f{};
  const VectorField eta = h.back().eta();
  const GeometryCache cache = geometry::build_cache(eta);
  for (int l = 0; l <= m; ++l) {
    const VectorField w = time_derivative_eta(h, l, dt);
    f[0] += sq(ops::sobolev_norm(geometry::deformation_gradient(w), m - l));
    if (p.epsilon > 0.0) {
      const VectorField vl = time_derivative_v(h, l, dt);
      f[4] += p.epsilon * p.epsilon * sq(ops::sobolev_norm(geometry::deformation_gradient(vl), m - l));
      if (l <= m - 1)
        f[5] += p.epsilon * norm0_sq(d1_pow(geometry::deformation_gradient(vl), m - l));
    }
  }
  const VectorField vm = time_derivative_v(h, m, dt);
  f[1] = sq(norm0_sq(vm));
  const VectorField em = time_derivative_eta(h, m, dt);
  f[2] = sq(norm0_sq(geometry::deformation_gradient(em)));
  double b = 0.0;
  for (Face face : kFaces) {
    const auto t = ops::d1(ops::trace(em, face));
    const auto& n = cache.normal(face);
    BoundaryTrace<1> dot(eta.grid(), face);
    for (int i = 0; i < eta.grid().n1; ++i) dot(0, i) = t(0, i) * n(0, i) + t(1, i) * n(1, i);
    b += sq(ops::trace_l2_norm(dot));
  }
  f[3] = b * b;
  if (p.epsilon > 0.0) f[6] = norm0_sq(geometry::deformation_gradient(vm));
  return f;
}

NormalSystemMatrix normal_system_matrix(const FlowState& state, const GeometryCache& cache,
                                        const MaterialParams& p) {
  const Grid& g = state.grid();
  NormalSystemMatrix n{MatrixField(g), ScalarField(g), ScalarField(g)};
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) {
      const double J = cache.J(i, j);
      const double rho = p.rho0(i, j);
      const double c = p.gamma * p.A_pressure * std::pow(rho / J, p.gamma);
      const double a2[2] = {cache.a(mi(0, 1), i, j), cache.a(mi(1, 1), i, j)};
      const double off = c * a2[0] * a2[1];
      n.calA(mi(0, 0), i, j) = rho * J + c * a2[0] * a2[0];
      n.calA(mi(1, 1), i, j) = rho * J + c * a2[1] * a2[1];
      n.calA(mi(0, 1), i, j) = off;
      n.calA(mi(1, 0), i, j) = off;
      n.min_eig(i, j) = rho * J;
      n.max_eig(i, j) = rho * J + c * (a2[0] * a2[0] + a2[1] * a2[1]);
    }
  return n;
}

double boundary_layer_indicator(const VectorField& v, double delta) {
  if (!(delta > 0.0 && delta < 0.25)) throw std::invalid_argument("delta must lie in (0, 1/4)");
  const Grid& g = v.grid();
  const VectorField dv = ops::d2(v);
  ScalarField e(g);
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) e(i, j) = sq(dv(0, i, j)) + sq(dv(1, i, j));
  const double strips = ops::integrate_band(e, 0.0, delta) + ops::integrate_band(e, 1.0 - delta, 1.0);
  const double interior = ops::integrate_band(e, delta, 1.0 - delta);
  return std::sqrt(strips) / std::max(std::sqrt(interior), 1e-14);
}

double trace_ratio(const ScalarField& g) {
  double boundary = 0.0;
  for (Face face : kFaces) boundary += sq(ops::trace_l2_norm(ops::trace(g, face)));
  const double n0 = norm0_sq(g);
  if (n0 == 0.0 && boundary == 0.0) return 0.0;
  const double grad = std::sqrt(norm0_sq(ops::d1(g)) + norm0_sq(ops::d2(g)));
  return boundary / (n0 + std::sqrt(n0) * grad);
}

double korn_ratio(const VectorField& f, const MatrixField& A) {
  const double grad = norm0_sq(geometry::deformation_gradient(f));
  const double s = norm0_sq(constitutive::symmetric_gradient(f, A));
  const double n0 = norm0_sq(f);
  if (grad == 0.0) return 0.0;
  return grad / (s + n0);
}

InequalityRatios inequality_monitors(const FlowState& state, const GeometryCache& cache) {
  ScalarField g(state.grid());
  for (int i = 0; i < state.grid().n1; ++i)
    for (int j = 0; j < state.grid().n2; ++j) g(i, j) = state.v(1, i, j);
  return {trace_ratio(g), korn_ratio(state.v, cache.A)};
}

namespace {

MatrixField full_gradient(const FlowState& s) {
  MatrixField F = geometry::deformation_gradient(s.u);
  for (double& x : F.component(0)) x += 1.0;
  for (double& x : F.component(3)) x += 1.0;
  return F;
}

ScalarField det_field(const MatrixField& F) {
  ScalarField J(F.grid());
  for (int i = 0; i < F.grid().n1; ++i)
    for (int j = 0; j < F.grid().n2; ++j) J(i, j) = F(0, i, j) * F(3, i, j) - F(1, i, j) * F(2, i, j);
  return J;
}

}  // namespace

double jacobi_residual(const FlowState& prev, const FlowState& cur, double dt) {
  const MatrixField Fc = full_gradient(cur);
  const ScalarField Jp = det_field(full_gradient(prev));
  const ScalarField Jc = det_field(Fc);
  const MatrixField a = geometry::cofactor(Fc);
  const MatrixField L = geometry::deformation_gradient(cur.v);
  const Grid& g = cur.grid();
  double m = 0.0;
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) {
      double s = 0.0;
      for (int k = 0; k < 4; ++k) s += a(k, i, j) * L(k, i, j);
      m = std::max(m, std::abs((Jc(i, j) - Jp(i, j)) / dt - s));
    }
  return m;
}

double pressure_jacobian_residual(const FlowState& prev, const FlowState& cur, double dt,
                                  const MaterialParams& p) {
  const ScalarField Jp = det_field(full_gradient(prev));
  const ScalarField Jc = det_field(full_gradient(cur));
  const Grid& g = cur.grid();
  double m = 0.0;
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) {
      const double rho = p.rho0(i, j);
      const double qp = constitutive::pressure(rho, Jp(i, j), p);
      const double qc = constitutive::pressure(rho, Jc(i, j), p);
      const double coef = std::pow(Jc(i, j), p.gamma + 1.0) / (p.gamma * p.A_pressure * std::pow(rho, p.gamma));
      m = std::max(m, std::abs((Jc(i, j) - Jp(i, j)) / dt + coef * (qc - qp) / dt));
    }
  return m;
}

std::string csv_header() {
  return "t,basic_energy,conserved_energy,dissipation_rate,dissipation_integral,energy_residual,"
         "E_eps,piola_res,piola_boundary_res,decomp_res,cofactor_res,jacobi_res,q_res,B_res,"
         "compat_res,normal_matrix_min_eig,layer_0.05,layer_0.1,layer_0.2,norm_v_h1,"
         "norm_grad_eta_h1,boundary_curvature_half,trace_ratio,korn_ratio";
}

std::string csv_row(const DiagnosticsReport& r) {
  const double vals[] = {r.t,
                         r.basic_energy,
                         r.conserved_energy,
                         r.dissipation_rate,
                         r.dissipation_integral,
                         r.energy_residual,
                         r.E_eps,
                         r.piola_res,
                         r.piola_boundary_res,
                         r.decomp_res,
                         r.cofactor_res,
                         r.jacobi_res,
                         r.q_res,
                         r.B_res,
                         r.compat_res,
                         r.normal_matrix_min_eig,
                         r.layer_indicator[0],
                         r.layer_indicator[1],
                         r.layer_indicator[2],
                         r.norm_v_h1,
                         r.norm_grad_eta_h1,
                         r.boundary_curvature_half,
                         r.trace_ratio,
                         r.korn_ratio};
  std::string out;
  char buf[40];
  for (std::size_t k = 0; k < std::size(vals); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", vals[k]);
    if (k) out += ',';
    out += buf;
  }
  return out;
}

Recorder::Recorder(const MaterialParams& p, RecorderOptions opt) : p_(p), opt_(opt) {
  if (opt_.m_diag < 1 || opt_.m_diag > 3) throw ConfigError("m_diag must lie in [1, 3]");
  if (opt_.every < 0) throw ConfigError("diagnostics cadence must be non-negative");
  ef_.m = opt_.m_diag;
}

dynamics::Observer Recorder::observer() {
  return [this](const dynamics::StepView& v) { on_step(v); };
}

void Recorder::on_step(const dynamics::StepView& view) {
  const auto& h = view.history;
  if (view.step == 0) e0_ = basic_energy(view.state, p_).conserved();
  if (h.size() >= 2) {
    const FlowState& prev = h[h.size() - 2];
    max_jacobi_ = std::max(max_jacobi_, jacobi_residual(prev, view.state, view.dt));
    max_q_ = std::max(max_q_, pressure_jacobian_residual(prev, view.state, view.dt, p_));
  }
  if (static_cast<int>(h.size()) >= opt_.m_diag + 1) {
    const auto f = energy_functional_integrands(h, view.dt, opt_.m_diag, p_);
    if (have_prev_integrand_) {
      for (int k = 0; k < 6; ++k) ef_.integral[k] += 0.5 * view.dt * (prev_integrand_[k] + f[k]);
      t7_inner_ += 0.5 * view.dt * (prev_integrand_[6] + f[6]);
      ef_.integral[6] = p_.epsilon * p_.epsilon * t7_inner_ * t7_inner_;
    }
    prev_integrand_ = f;
    have_prev_integrand_ = true;
    ef_.point = energy_functional_point(h, view.dt, opt_.m_diag, p_).point;
    sup_ef_ = std::max(sup_ef_, ef_.total());
  }
  const bool cadence = opt_.every > 0 && view.step % opt_.every == 0;
  if (view.step == 0 || view.final_step || cadence) rows_.push_back(make_row(view));
}

DiagnosticsReport Recorder::make_row(const dynamics::StepView& view) {
  const FlowState& s = view.state;
  DiagnosticsReport r;
  r.t = s.t;
  const EnergyTerms e = basic_energy(s, p_);
  r.basic_energy = e.total();
  r.conserved_energy = e.conserved();
  r.dissipation_rate = view.dissipation_rate;
  r.dissipation_integral = view.dissipation_integral;
  r.energy_residual = std::abs(e.conserved() + view.dissipation_integral - e0_);
  r.E_eps = ef_.total();
  const VectorField eta = s.eta();
  const GeometryCache cache = geometry::build_cache(eta);
  const MatrixField F = full_gradient(s);
  const MatrixField a = geometry::cofactor(F);
  r.piola_res = geometry::piola_residual(a);
  r.piola_boundary_res = geometry::piola_residual_boundary(a);
  r.decomp_res = geometry::metric_decomp_residual(cache.a, cache.grad_eta);
  r.cofactor_res = geometry::cofactor_identity_residual(cache.a, cache.grad_eta, cache.J);
  if (view.history.size() >= 2) {
    const FlowState& prev = view.history[view.history.size() - 2];
    r.jacobi_res = jacobi_residual(prev, s, view.dt);
    r.q_res = pressure_jacobian_residual(prev, s, view.dt, p_);
  }
  for (Face face : kFaces)
    r.B_res = std::max(r.B_res, constitutive::boundary_B_residual(s, cache, p_, face));
  r.compat_res = dynamics::compatibility_residual(s, p_);
  const NormalSystemMatrix nm = normal_system_matrix(s, cache, p_);
  r.normal_matrix_min_eig = *std::min_element(nm.min_eig.values().begin(), nm.min_eig.values().end());
  for (std::size_t k = 0; k < kLayerDeltas.size(); ++k)
    r.layer_indicator[k] = boundary_layer_indicator(s.v, kLayerDeltas[k]);
  r.norm_v_h1 = ops::sobolev_norm(s.v, 1);
  r.norm_grad_eta_h1 = ops::sobolev_norm(cache.grad_eta, 1);
  double bc = 0.0;
  for (Face face : kFaces) {
    const auto t = ops::d1(ops::d1(ops::trace(eta, face)));
    const auto& n = cache.normal(face);
    BoundaryTrace<1> dot(s.grid(), face);
    for (int i = 0; i < s.grid().n1; ++i) dot(0, i) = t(0, i) * n(0, i) + t(1, i) * n(1, i);
    bc += sq(ops::boundary_norm(dot, 0.5));
  }
  r.boundary_curvature_half = std::sqrt(bc);
  const InequalityRatios ir = inequality_monitors(s, cache);
  r.trace_ratio = ir.trace;
  r.korn_ratio = ir.korn;
  max_trace_ = std::max(max_trace_, ir.trace);
  max_korn_ = std::max(max_korn_, ir.korn);
  return r;
}

}  // namespace fbve::diagnostics
