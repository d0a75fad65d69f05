#include <doctest.h>

#include "fbve/errors.hpp"
#include "fbve/experiments.hpp"
#include "support.hpp"

using namespace fbve;
using namespace fbve::testing;
using namespace fbve::experiments;

namespace {

SweepConfig small_sweep(bool equilibrium) {
  SweepConfig cfg;
  cfg.run.grid = Grid(16, 9);
  cfg.run.t_end = 0.05;
  cfg.params = unit_params(cfg.run.grid);
  cfg.perturbation.amplitude = 0.01;
  cfg.epsilons = {1e-2, 1e-3, 1e-4, 0.0};
  cfg.equilibrium_initial = equilibrium;
  cfg.diag_every = 5;
  return cfg;
}

MmsConfig small_mms() {
  MmsConfig cfg;
  cfg.params.c0 = 0.9;
  cfg.params.sigma = 0.05;
  cfg.params.epsilon = 0.01;
  cfg.n1 = {16, 32, 64};
  cfg.t_end = 0.1;
  return cfg;
}

}  // namespace

TEST_CASE("rate fit recovers exact power laws") {
  const std::vector<double> eps{1e-2, 1e-3, 1e-4, 0.0};
  for (double a : {0.5, 1.0, 2.0}) {
    std::vector<double> e;
    for (double x : eps) e.push_back(3.0 * std::pow(x, a));
    const auto fit = convergence_rate(e, eps);
    CHECK(fit.status == FitStatus::ok);
    CHECK(std::abs(fit.slope - a) <= 1e-10);
    CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("rate fit tolerates mild noise") {
  std::mt19937_64 rng(17);
  const std::vector<double> eps{1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 0.0};
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> e;
    for (double x : eps) e.push_back(x * (1.0 + 0.05 * (2.0 * uniform01(rng) - 1.0)));
    const auto fit = convergence_rate(e, eps);
    CHECK(std::abs(fit.slope - 1.0) <= 0.1);
  }
}

TEST_CASE("rate fit statuses") {
  CHECK(convergence_rate({1e-14, 1e-15, 1e-16, 0.0}, {1e-2, 1e-3, 1e-4, 0.0}).status == FitStatus::floor);
  CHECK(convergence_rate({1e-3, 0.0}, {1e-2, 0.0}).status == FitStatus::insufficient);
  CHECK(std::string(to_string(FitStatus::ok)) == "ok");
}

TEST_CASE("equilibrium sweep is identically zero") {
  const auto r = viscosity_sweep(small_sweep(true));
  REQUIRE(r.ok);
  for (const auto& run : r.runs) {
    CHECK(run.error_h1 == 0.0);
    CHECK(run.error_v_l2 == 0.0);
    CHECK(run.layer_at_delta == 0.0);
  }
  CHECK(r.fit.status == FitStatus::floor);
  CHECK(layer_study(r).no_layer);
  CHECK(std::string(layer_study(r).label()) == "NO_LAYER");
}

TEST_CASE("sweeps are byte-identical across repeats and thread counts") {
  SweepConfig cfg = small_sweep(false);
  const auto a = viscosity_sweep(cfg);
  const auto b = viscosity_sweep(cfg);
  cfg.threads = 3;
  const auto c = viscosity_sweep(cfg);
  REQUIRE(a.ok);
  CHECK(sweep_csv(a) == sweep_csv(b));
  CHECK(sweep_csv(a) == sweep_csv(c));
  CHECK(a.runs.front().error_h1 > 0.0);
  for (const auto& run : a.runs) CHECK(run.steps == a.runs.front().steps);
}

TEST_CASE("ablation only removes the elastic flux") {
  const SweepConfig cfg = small_sweep(false);
  const SweepConfig abl = ablation(cfg);
  CHECK(cfg.params.elastic);
  CHECK_FALSE(abl.params.elastic);
  CHECK(abl.params.p_e == cfg.params.p_e + 1.0);
  CHECK(abl.params.gamma == cfg.params.gamma);
  CHECK(abl.params.mu == cfg.params.mu);
  CHECK(abl.params.sigma == cfg.params.sigma);
  CHECK(abl.params.rho0.values() == cfg.params.rho0.values());
  CHECK(abl.epsilons == cfg.epsilons);
  CHECK(abl.run.t_end == cfg.run.t_end);
  CHECK(abl.perturbation.seed == cfg.perturbation.seed);

  const auto rest = dynamics::rhs(initial_data::equilibrium(abl.run.grid), abl.params).dv;
  CHECK(ops::max_abs(rest) <= 1e-14);
}

TEST_CASE("order study with zero amplitude sits on the floor") {
  MmsConfig cfg = small_mms();
  cfg.amplitude = 0.0;
  const auto s = mms_order_study(cfg);
  CHECK(s.status == "floor");
}

TEST_CASE("a lopsided x1 difference drops the order to one") {
  MmsConfig cfg = small_mms();
  cfg.fault.lopsided_x1 = true;
  const auto s = mms_order_study(cfg);
  MESSAGE("lopsided order " << s.order);
  CHECK(s.order == doctest::Approx(1.0).epsilon(0.25));
  CHECK(s.order < 1.5);
}

TEST_CASE("discrete forcing leaves only the time error") {
  MmsConfig cfg = small_mms();
  cfg.discrete = true;
  cfg.n1 = {8, 16, 32};
  const auto s = mms_order_study(cfg);
  MESSAGE("discrete errors " << s.errors[0] << " " << s.errors[2]);
  for (double e : s.errors) CHECK(e <= 1e-6);
}
