#include <doctest.h>

#include "fbve/errors.hpp"
#include "support.hpp"

using namespace fbve;
using namespace fbve::testing;

namespace {

FlowState shifted(const FlowState& s, double a, double b) {
  FlowState out = s;
  const Grid& g = s.grid();
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) {
      out.u(0, i, j) += a;
      out.u(1, i, j) += b;
    }
  return out;
}

/// Rolls nodal data by k whole cells in x1 (the Lagrangian label shift).
VectorField roll(const VectorField& f, int k) {
  const Grid& g = f.grid();
  VectorField out(g);
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < g.n1; ++i)
      for (int j = 0; j < g.n2; ++j) out(c, (i + k) % g.n1, j) = f(c, i, j);
  return out;
}

FlowState perturbed(const Grid& g, const MaterialParams& p, std::uint64_t seed = 3) {
  PerturbationSpec spec;
  spec.amplitude = 0.01;
  spec.seed = seed;
  FlowState s = initial_data::well_prepared(g, p, spec);
  s.v = RandomSmoothMap(seed + 50, 0.05).displacement(g);
  return s;
}

}  // namespace

TEST_CASE("right-hand side vanishes at rest and under translation") {
  const Grid g(16, 9);
  const MaterialParams p = unit_params(g);
  const FlowState eq = initial_data::equilibrium(g);
  const auto r = dynamics::rhs(eq, p);
  CHECK(ops::max_abs(r.dv) == 0.0);
  CHECK(ops::max_abs(r.deta) == 0.0);

  FlowState moving = shifted(eq, 0.3, -0.7);
  for (auto& x : moving.v.component(0)) x = 0.25;
  const auto m = dynamics::rhs(moving, p);
  CHECK(ops::max_abs(m.dv) <= 1e-14);
  for (double x : m.deta.component(0)) CHECK(x == 0.25);
}

TEST_CASE("uniform pressure excess pushes the faces outward") {
  const Grid g(16, 9);
  MaterialParams p = unit_params(g, 0.0, 0.0);
  p.p_e = 0.5;
  const auto dv = dynamics::rhs(initial_data::equilibrium(g), p).dv;
  for (int i = 0; i < g.n1; ++i) {
    CHECK(dv(1, i, g.n2 - 1) > 0.0);
    CHECK(dv(1, i, 0) < 0.0);
    CHECK(dv(1, i, g.n2 - 1) == doctest::Approx(0.5 / (g.h2 / 2)));
    for (int j = 1; j + 1 < g.n2; ++j) CHECK(std::abs(dv(1, i, j)) < 1e-12);
  }
}

TEST_CASE("stable timestep at equilibrium") {
  const Grid g(32, 17);
  MaterialParams p = unit_params(g, 0.0, 0.0);
  const FlowState eq = initial_data::equilibrium(g);
  const auto d = dynamics::stable_dt(eq, p, 0.5);
  CHECK(d.wave_speed == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
  CHECK(d.dt == doctest::Approx(0.5 * g.h1 / std::sqrt(3.0)).epsilon(1e-14));

  p.epsilon = 1.0;
  p.sigma = 0.0;
  std::vector<double> h, visc;
  p.sigma = 1.0;
  std::vector<double> cap;
  for (int n : {32, 64, 128}) {
    const Grid gg(n, 17);
    MaterialParams q = p;
    q.rho0 = ScalarField(gg, 1.0);
    const auto s = dynamics::stable_dt(initial_data::equilibrium(gg), q, 0.5);
    h.push_back(gg.h1);
    visc.push_back(s.viscous);
    cap.push_back(s.capillary);
  }
  CHECK(log_slope(h, visc) == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(log_slope(h, cap) == doctest::Approx(1.0).epsilon(1e-3));

  std::vector<double> h2, cap2;
  for (int n : {17, 33, 65}) {
    const Grid gg(n - 1, n);
    MaterialParams q = p;
    q.rho0 = ScalarField(gg, 1.0);
    h2.push_back(gg.h1);
    cap2.push_back(dynamics::stable_dt(initial_data::equilibrium(gg), q, 0.5).capillary);
  }
  CHECK(log_slope(h2, cap2) == doctest::Approx(1.5).epsilon(1e-2));
}

TEST_CASE("chosen step divides t_end") {
  const Grid g(16, 9);
  const MaterialParams p = unit_params(g);
  RunConfig run;
  run.grid = g;
  run.t_end = 0.37;
  const double dt = dynamics::choose_dt(run, initial_data::equilibrium(g), p);
  const double n = run.t_end / dt;
  CHECK(std::abs(n - std::round(n)) < 1e-9);
  CHECK(dt <= dynamics::stable_dt(initial_data::equilibrium(g), p, run.cfl).dt);
}

TEST_CASE("RK4 keeps rest fixed and moves translations exactly") {
  const Grid g(16, 9);
  const MaterialParams p = unit_params(g);
  const FlowState eq = initial_data::equilibrium(g);
  const FlowState next = dynamics::step_rk4(eq, 1e-3, p);
  CHECK(ops::max_abs(next.u) == 0.0);
  CHECK(ops::max_abs(next.v) == 0.0);

  FlowState moving = eq;
  for (auto& x : moving.v.component(1)) x = -0.5;
  const FlowState m = dynamics::step_rk4(moving, 0.01, p);
  for (double x : m.u.component(1)) CHECK(x == doctest::Approx(-0.005).epsilon(1e-13));
  CHECK(ops::max_abs(m.v - moving.v) <= 1e-14);
}

TEST_CASE("RK4 is fourth order under step doubling") {
  const Grid g(16, 9);
  const MaterialParams p = unit_params(g);
  const FlowState s0 = perturbed(g, p);
  auto advance = [&](double dt, int n) {
    FlowState s = s0;
    for (int k = 0; k < n; ++k) s = dynamics::step_rk4(s, dt, p);
    return s;
  };
  const double T = 0.02;
  const FlowState ref = advance(T / 64, 64);
  std::vector<double> h, e;
  for (int n : {4, 8, 16}) {
    const FlowState s = advance(T / n, n);
    h.push_back(T / n);
    e.push_back(ops::max_abs(s.u - ref.u) + ops::max_abs(s.v - ref.v));
  }
  const double order = log_slope(h, e);
  MESSAGE("RK4 observed order " << order);
  CHECK(order > 3.7);
  CHECK(order < 4.5);
}

TEST_CASE("equilibrium stays put over a full run") {
  const Grid g(16, 9);
  for (double sigma : {0.05, 1.0})
    for (double eps : {0.0, 1e-2}) {
      const MaterialParams p = unit_params(g, eps, sigma);
      RunConfig run;
      run.grid = g;
      run.t_end = 0.5;
      const auto traj = dynamics::simulate(run, p, initial_data::equilibrium(g));
      REQUIRE(traj.ok());
      CHECK(ops::max_abs(traj.final_state().u) <= 1e-12);
      CHECK(ops::max_abs(traj.final_state().v) <= 1e-12);
      CHECK(traj.final_state().t == doctest::Approx(0.5));
    }
}

TEST_CASE("compatibility residual") {
  const Grid g(16, 9);
  MaterialParams p = unit_params(g);
  CHECK(dynamics::compatibility_residual(initial_data::equilibrium(g), p) == 0.0);
  p.p_e = 1.25;
  CHECK(dynamics::compatibility_residual(initial_data::equilibrium(g), p) == doctest::Approx(0.25));
}

TEST_CASE("relabelling by whole cells commutes with the step") {
  const Grid g(32, 9);
  const MaterialParams p = unit_params(g);
  const FlowState s = perturbed(g, p, 8);
  const int k = 5;
  FlowState r = s;
  r.u = roll(s.u, k);
  r.v = roll(s.v, k);
  const FlowState a = dynamics::step_rk4(s, 1e-3, p);
  const FlowState b = dynamics::step_rk4(r, 1e-3, p);
  CHECK(ops::max_abs(roll(a.u, k) - b.u) <= 1e-13);
  CHECK(ops::max_abs(roll(a.v, k) - b.v) <= 1e-12);

  const FlowState c = dynamics::step_rk4(shifted(s, 0.4, 0.1), 1e-3, p);
  CHECK(ops::max_abs(shifted(a, 0.4, 0.1).u - c.u) <= 1e-13);
  CHECK(ops::max_abs(a.v - c.v) <= 1e-12);
}

TEST_CASE("runs are deterministic") {
  const Grid g(16, 9);
  const MaterialParams p = unit_params(g);
  RunConfig run;
  run.grid = g;
  run.t_end = 0.05;
  const auto a = dynamics::simulate(run, p, perturbed(g, p));
  const auto b = dynamics::simulate(run, p, perturbed(g, p));
  REQUIRE(a.ok());
  CHECK(a.final_state().u.values() == b.final_state().u.values());
  CHECK(a.final_state().v.values() == b.final_state().v.values());
}

TEST_CASE("a collapsing run aborts and keeps the last good state") {
  const Grid g(16, 9);
  const MaterialParams p = unit_params(g);
  FlowState s = initial_data::equilibrium(g);
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) s.v(1, i, j) = -20.0 * g.x2(j);
  RunConfig run;
  run.grid = g;
  run.t_end = 0.2;
  run.dt = 1e-3;
  const auto traj = dynamics::simulate(run, p, s);
  REQUIRE_FALSE(traj.ok());
  REQUIRE(traj.failure.has_value());
  MESSAGE(traj.failure->reason);
  CHECK(traj.failure->t > 0.0);
  CHECK(traj.failure->t < run.t_end);
  CHECK(traj.failure->last_good.t == doctest::Approx(traj.failure->t - traj.dt));
  CHECK(traj.final_state().t == traj.failure->last_good.t);
}

TEST_CASE("invalid run settings are rejected") {
  const Grid g(16, 9);
  const MaterialParams p = unit_params(g);
  RunConfig run;
  run.grid = g;
  run.t_end = -1.0;
  CHECK_THROWS_AS(dynamics::simulate(run, p, initial_data::equilibrium(g)), ConfigError);
  run.t_end = 0.1;
  run.cfl = 0.0;
  CHECK_THROWS_AS(dynamics::simulate(run, p, initial_data::equilibrium(g)), ConfigError);
}

TEST_CASE("fault injection perturbs the force") {
  const Grid g(16, 9);
  const MaterialParams p = unit_params(g);
  const FlowState s = perturbed(g, p);
  const auto clean = dynamics::rhs(s, p).dv;
  FaultInjection flip;
  flip.flip_bottom_traction = true;
  CHECK(ops::max_abs(dynamics::rhs(s, p, nullptr, flip).dv - clean) > 1e-3);
  FaultInjection lop;
  lop.lopsided_x1 = true;
  CHECK(ops::max_abs(dynamics::rhs(s, p, nullptr, lop).dv - clean) > 1e-3);
}
