#include "fbve/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>

#include "fbve/errors.hpp"

namespace fbve::experiments {

const char* to_string(FitStatus s) {
  switch (s) {
    case FitStatus::ok: return "ok";
    case FitStatus::floor: return "converged to floor";
    case FitStatus::insufficient: return "insufficient";
  }
  return "?";
}

namespace {

struct LineFit {
  double slope = 0.0;
  double r2 = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

/// Runs jobs 0..n-1 on up to `threads` workers; results are indexed, so the
/// outcome does not depend on scheduling.
template <class Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int k = 0; k < n; ++k) fn(k);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int k = next++; k < n; k = next++) fn(k);
    });
  for (auto& th : pool) th.join();
}

}  // namespace

RateFit convergence_rate(const std::vector<double>& errors, const std::vector<double>& epsilons,
                         double noise_floor) {
  if (errors.size() != epsilons.size()) throw std::invalid_argument("errors and epsilons differ in length");
  std::vector<double> x, y;
  bool all_floor = true;
  for (std::size_t k = 0; k < errors.size(); ++k) {
    if (!(epsilons[k] > 0.0)) continue;
    if (errors[k] > 10.0 * noise_floor) all_floor = false;
    if (errors[k] > 0.0) {
      x.push_back(std::log(epsilons[k]));
      y.push_back(std::log(errors[k]));
    }
  }
  RateFit r;
  if (all_floor) {
    r.status = FitStatus::floor;
    return r;
  }
  if (x.size() < 3) return r;
  const LineFit f = fit_line(x, y);
  r.status = FitStatus::ok;
  r.slope = f.slope;
  r.r2 = f.r2;
  return r;
}

SweepConfig ablation(const SweepConfig& cfg) {
  SweepConfig out = cfg;
  out.params.elastic = false;
  out.params.p_e += 1.0;
  return out;
}

SweepResult viscosity_sweep(const SweepConfig& cfg) {
  const auto& eps = cfg.epsilons;
  if (eps.empty() || eps.back() != 0.0) throw ConfigError("epsilon list must end with 0");
  for (std::size_t k = 1; k < eps.size(); ++k)
    if (!(eps[k] < eps[k - 1])) throw ConfigError("epsilon list must be strictly decreasing");
  cfg.run.validate();

  const Grid& g = cfg.run.grid;
  MaterialParams base = cfg.params;
  if (!(base.rho0.grid() == g)) base.rho0 = ScalarField(g, 1.0);
  const FlowState initial = cfg.equilibrium_initial
                                ? initial_data::equilibrium(g)
                                : initial_data::well_prepared(g, base, cfg.perturbation);

  // dt from the largest epsilon, frozen across the sweep.
  MaterialParams first = base;
  first.epsilon = eps.front();
  RunConfig run = cfg.run;
  run.dt = dynamics::choose_dt(cfg.run, initial, first);

  SweepResult res;
  res.dt = run.dt;
  res.runs.resize(eps.size());
  std::vector<FlowState> finals(eps.size());

  parallel_for(static_cast<int>(eps.size()), cfg.threads, [&](int k) {
    MaterialParams p = base;
    p.epsilon = eps[k];
    diagnostics::Recorder rec(p, {cfg.m_diag, cfg.diag_every});
    RunSummary& s = res.runs[k];
    s.epsilon = eps[k];
    try {
      const auto traj = dynamics::simulate(run, p, initial, nullptr, rec.observer());
      s.ok = traj.ok();
      if (!s.ok) s.failure = traj.failure->reason;
      s.steps = traj.steps;
      s.max_piola = traj.max_piola_residual;
      s.sup_E = rec.sup_energy_functional();
      s.energy_residual = diagnostics::energy_balance_residual(traj, p).max_residual;
      finals[k] = traj.final_state();
    } catch (const Error& e) {
      s.ok = false;
      s.failure = e.what();
    }
  });

  for (std::size_t k = 0; k < eps.size(); ++k)
    if (!res.runs[k].ok) {
      res.ok = false;
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", eps[k]);
      res.failed_epsilon = buf;
      return res;
    }

  const FlowState& ref = finals.back();
  std::vector<double> errs, es;
  for (std::size_t k = 0; k < eps.size(); ++k) {
    RunSummary& s = res.runs[k];
    s.error_h1 = ops::sobolev_norm(finals[k].u - ref.u, 1);
    s.error_v_l2 = std::sqrt(ops::l2_norm_squared(finals[k].v - ref.v));
    for (std::size_t d = 0; d < diagnostics::kLayerDeltas.size(); ++d)
      s.layer[d] = diagnostics::boundary_layer_indicator(finals[k].v, diagnostics::kLayerDeltas[d]);
    s.layer_at_delta = diagnostics::boundary_layer_indicator(finals[k].v, cfg.layer_delta);
    errs.push_back(s.error_h1);
    es.push_back(s.epsilon);
  }
  for (std::size_t k = 1; k + 1 < eps.size(); ++k)
    if (!(res.runs[k].error_h1 < res.runs[k - 1].error_h1)) res.monotone = false;
  res.fit = convergence_rate(errs, es, cfg.noise_floor);
  const double e_max = res.runs.front().sup_E;
  for (const auto& s : res.runs)
    res.sup_E_ratio = std::max(res.sup_E_ratio, e_max > 0.0 ? s.sup_E / e_max : 0.0);
  return res;
}

std::string sweep_csv(const SweepResult& r) {
  std::string out =
      "epsilon,ok,error_h1,error_v_l2,sup_E,layer_0.05,layer_0.1,layer_0.2,layer_delta,"
      "energy_residual,max_piola,steps\n";
  char buf[64];
  auto num = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out += buf;
  };
  for (const auto& s : r.runs) {
    num(s.epsilon);
    out += s.ok ? ",1," : ",0,";
    num(s.error_h1);
    out += ',';
    num(s.error_v_l2);
    out += ',';
    num(s.sup_E);
    for (double x : s.layer) {
      out += ',';
      num(x);
    }
    out += ',';
    num(s.layer_at_delta);
    out += ',';
    num(s.energy_residual);
    out += ',';
    num(s.max_piola);
    out += ',';
    out += std::to_string(s.steps);
    out += '\n';
  }
  return out;
}

LayerVerdict layer_study(const SweepResult& sweep, double r_bound) {
  LayerVerdict v;
  if (sweep.runs.empty()) return v;
  const double r0 = sweep.runs.front().layer_at_delta;
  std::vector<double> x, y;
  for (const auto& s : sweep.runs) {
    const double ratio = r0 > 0.0 ? s.layer_at_delta / r0 : (s.layer_at_delta > 0.0 ? INFINITY : 0.0);
    v.growth = std::max(v.growth, ratio);
    if (s.epsilon > 0.0 && s.layer_at_delta > 0.0) {
      x.push_back(std::log(s.epsilon));
      y.push_back(std::log(s.layer_at_delta));
    }
  }
  v.no_layer = v.growth <= r_bound;
  if (x.size() >= 2) v.exponent = fit_line(x, y).slope;
  return v;
}

OrderStudy mms_order_study(const MmsConfig& cfg) {
  if (cfg.n1.size() < 3) throw ConfigError("order study needs at least 3 grids");
  for (std::size_t k = 1; k < cfg.n1.size(); ++k)
    if (cfg.n1[k] != 2 * cfg.n1[k - 1]) throw ConfigError("order study grids must refine by 2");
  const Manufactured m = Manufactured::oscillatory(cfg.amplitude, cfg.omega);
  OrderStudy st;
  st.n1 = cfg.n1;
  st.h.resize(cfg.n1.size());
  st.errors.resize(cfg.n1.size());
  std::vector<std::string> failures(cfg.n1.size());

  parallel_for(static_cast<int>(cfg.n1.size()), cfg.threads, [&](int k) {
    const Grid g(cfg.n1[k], cfg.n1[k] / 2 + 1);
    MaterialParams p = cfg.params;
    const double rho = p.rho0.values().empty() ? 1.0 : p.rho0.values().front();
    p.rho0 = ScalarField(g, rho);
    const Forcing f = cfg.discrete ? m.discrete_forcing(p, cfg.fault) : m.continuous_forcing(p);
    RunConfig run;
    run.grid = g;
    run.t_end = cfg.t_end;
    run.cfl = cfg.cfl;
    run.output_every = 1 << 30;
    st.h[k] = g.h1;
    try {
      const auto traj = dynamics::simulate(run, p, m.state(g, 0.0), &f, {}, cfg.fault);
      if (!traj.ok()) {
        failures[k] = traj.failure->reason;
        return;
      }
      const FlowState exact = m.state(g, cfg.t_end);
      st.errors[k] = ops::sobolev_norm(traj.final_state().u - exact.u, 1);
    } catch (const Error& e) {
      failures[k] = e.what();
    }
  });

  for (const auto& f : failures)
    if (!f.empty()) {
      st.status = "aborted: " + f;
      return st;
    }
  if (std::all_of(st.errors.begin(), st.errors.end(), [](double e) { return e < 1e-12; })) {
    st.status = "floor";
    return st;
  }
  for (std::size_t k = 1; k < st.errors.size(); ++k)
    if (!(st.errors[k] < st.errors[k - 1])) {
      st.status = "inconclusive";
      break;
    }
  std::vector<double> x, y;
  for (std::size_t k = 0; k < st.errors.size(); ++k) {
    x.push_back(std::log(st.h[k]));
    y.push_back(std::log(std::max(st.errors[k], 1e-300)));
  }
  st.order = fit_line(x, y).slope;
  if (st.status.empty()) st.status = "ok";
  return st;
}

}  // namespace fbve::experiments
