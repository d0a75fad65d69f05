#include <doctest.h>

#include <Eigen/Dense>

#include "fbve/errors.hpp"
#include "support.hpp"

using namespace fbve;
using namespace fbve::testing;

namespace {

FlowState perturbed(const Grid& g, const MaterialParams& p) {
  PerturbationSpec spec;
  spec.amplitude = 0.01;
  return initial_data::well_prepared(g, p, spec);
}

RunConfig short_run(const Grid& g, double t_end) {
  RunConfig run;
  run.grid = g;
  run.t_end = t_end;
  run.output_every = 1;
  return run;
}

}  // namespace

TEST_CASE("basic energy reference values") {
  const Grid g(16, 9);
  const MaterialParams p = unit_params(g, 0.01, 0.05);
  FlowState eq = initial_data::equilibrium(g);
  const auto e = diagnostics::basic_energy(eq, p);
  CHECK(e.kinetic == 0.0);
  CHECK(e.pressure_potential == 0.0);
  CHECK(e.surface == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(e.total() == doctest::Approx(2 * p.sigma).epsilon(1e-13));

  for (auto& x : eq.v.component(0)) x = 1.0;
  CHECK(diagnostics::basic_energy(eq, p).kinetic == doctest::Approx(0.5).epsilon(1e-14));
  eq.v *= 2.0;
  CHECK(diagnostics::basic_energy(eq, p).kinetic == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("dissipation reference values") {
  const Grid g(16, 9);
  const MaterialParams p = unit_params(g, 1.0, 0.0);
  FlowState s = initial_data::equilibrium(g);
  s.v = sample<2>(g, [](int c, double, double x2) { return c == 0 ? x2 : 0.0; });
  CHECK(diagnostics::dissipation_rate(s, p) == doctest::Approx(1.0).epsilon(1e-13));
  for (auto& x : s.v.values()) x = 0.7;
  CHECK(diagnostics::dissipation_rate(s, p) == 0.0);
  s.v = RandomSmoothMap(5, 1.0).displacement(g);
  CHECK(diagnostics::dissipation_rate(s, unit_params(g, 0.0, 0.0)) == 0.0);
  CHECK(diagnostics::dissipation_rate(s, p) > 0.0);
}

TEST_CASE("energy balance at rest and under a traction fault") {
  const Grid g(16, 9);
  const MaterialParams p = unit_params(g);
  const auto rest = dynamics::simulate(short_run(g, 0.1), p, initial_data::equilibrium(g));
  CHECK(diagnostics::energy_balance_residual(rest, p).max_residual <= 1e-13);

  const FlowState s0 = perturbed(g, p);
  const auto clean = dynamics::simulate(short_run(g, 0.1), p, s0);
  FaultInjection fault;
  fault.bottom_traction_offset = 0.05;
  const auto bad = dynamics::simulate(short_run(g, 0.1), p, s0, nullptr, {}, fault);
  const auto rc = diagnostics::energy_balance_residual(clean, p);
  const auto rb = diagnostics::energy_balance_residual(bad, p);
  MESSAGE("clean " << rc.max_residual << " faulted " << rb.max_residual);
  CHECK(rc.min_dissipation >= 0.0);
  CHECK(rb.max_residual > 100.0 * rc.max_residual);
}

TEST_CASE("normal-system matrix") {
  const Grid g(16, 9);
  const MaterialParams p = unit_params(g);
  const FlowState eq = initial_data::equilibrium(g);
  const auto n = diagnostics::normal_system_matrix(eq, geometry::build_cache(eq.eta()), p);
  CHECK(n.min_eig(3, 3) == doctest::Approx(1.0));
  CHECK(n.max_eig(3, 3) == doctest::Approx(3.0));

  const FlowState s = perturbed(g, p);
  const auto m = diagnostics::normal_system_matrix(s, geometry::build_cache(s.eta()), p);
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) {
      Eigen::Matrix2d M;
      M << m.calA(0, i, j), m.calA(1, i, j), m.calA(2, i, j), m.calA(3, i, j);
      CHECK(m.calA(1, i, j) == m.calA(2, i, j));
      const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(M).eigenvalues();
      CHECK(ev(0) == doctest::Approx(m.min_eig(i, j)).epsilon(1e-12));
      CHECK(ev(1) == doctest::Approx(m.max_eig(i, j)).epsilon(1e-12));
    }
}

TEST_CASE("boundary-layer indicator") {
  const Grid g(32, 129);
  const auto smooth = sample<2>(g, [](int c, double x1, double x2) {
    return c == 0 ? std::sin(2 * kPi * x1) * x2 : 0.0;
  });
  const double base = diagnostics::boundary_layer_indicator(smooth, 0.1);
  CHECK(base == doctest::Approx(std::sqrt(0.2 / 0.8)).epsilon(1e-6));

  const auto layer = sample<2>(g, [](int c, double x1, double x2) {
    return c == 0 ? std::sin(2 * kPi * x1) * (x2 + std::exp(-x2 / 0.02)) : 0.0;
  });
  CHECK(diagnostics::boundary_layer_indicator(layer, 0.1) >= 5.0 * base);
  CHECK(diagnostics::boundary_layer_indicator(VectorField(g), 0.1) == 0.0);
  CHECK_THROWS(diagnostics::boundary_layer_indicator(smooth, 0.3));
}

TEST_CASE("monitored inequality ratios") {
  const Grid g(32, 65);
  CHECK(diagnostics::trace_ratio(ScalarField(g, 1.0)) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(diagnostics::trace_ratio(ScalarField(g)) == 0.0);

  const auto A = geometry::build_cache(identity_map(g)).A;
  const auto shear = sample<2>(g, [](int c, double, double x2) { return c == 0 ? x2 : 0.0; });
  CHECK(diagnostics::korn_ratio(shear, A) == doctest::Approx(1.2).epsilon(1e-3));
  CHECK(diagnostics::korn_ratio(VectorField(g, 0.4), A) <= 1e-20);
  CHECK(diagnostics::korn_ratio(VectorField(g), A) == 0.0);
}

TEST_CASE("history requirements") {
  const Grid g(16, 9);
  std::deque<FlowState> h{initial_data::equilibrium(g)};
  CHECK_NOTHROW(diagnostics::time_derivative_v(h, 0, 0.1));
  CHECK_THROWS_AS(diagnostics::time_derivative_v(h, 1, 0.1), InsufficientHistoryError);
  CHECK_THROWS_AS(diagnostics::energy_functional_point(h, 0.1, 2, unit_params(g)), InsufficientHistoryError);

  FlowState b = h.front();
  for (auto& x : b.v.component(1)) x = 0.3;
  h.push_back(b);
  const auto dv = diagnostics::time_derivative_v(h, 1, 0.1);
  for (double x : dv.component(1)) CHECK(x == doctest::Approx(3.0));
}

TEST_CASE("energy functional terms are non-negative and quadratic in the amplitude") {
  const Grid g(16, 9);
  const MaterialParams p = unit_params(g);
  auto functional = [&](double scale) {
    FlowState s = initial_data::equilibrium(g);
    s.u = scale * RandomSmoothMap(9).displacement(g);
    s.v = scale * RandomSmoothMap(10).displacement(g);
    std::deque<FlowState> h{s, s, s};
    h[0].v *= 0.9;
    h[1].v *= 0.95;
    return diagnostics::energy_functional_point(h, 0.01, 2, p);
  };
  const auto a = functional(0.5);
  const auto b = functional(1.0);
  for (double x : a.point) CHECK(x >= 0.0);
  CHECK(b.point[3] == doctest::Approx(4.0 * a.point[3]).epsilon(1e-10));
  CHECK(b.total() > a.total());
}

TEST_CASE("recorder rows and monitors") {
  const Grid g(16, 9);
  const MaterialParams p = unit_params(g);
  diagnostics::Recorder rec(p, {2, 5});
  RunConfig run = short_run(g, 0.05);
  const auto traj = dynamics::simulate(run, p, perturbed(g, p), nullptr, rec.observer());
  REQUIRE(traj.ok());
  REQUIRE(rec.rows().size() >= 2);
  CHECK(rec.rows().front().t == 0.0);
  CHECK(rec.rows().back().t == doctest::Approx(0.05));
  CHECK(rec.max_jacobi_residual() >= 0.0);
  CHECK(rec.sup_energy_functional() > 0.0);
  const std::string header = diagnostics::csv_header();
  const std::string row = diagnostics::csv_row(rec.rows().back());
  CHECK(std::count(header.begin(), header.end(), ',') == std::count(row.begin(), row.end(), ','));
}
