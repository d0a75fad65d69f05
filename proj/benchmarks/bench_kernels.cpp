#include <benchmark/benchmark.h>

#include "fbve/diagnostics.hpp"
#include "fbve/initial_data.hpp"

namespace {

fbve::FlowState perturbed(const fbve::Grid& g, const fbve::MaterialParams& p) {
  return fbve::initial_data::well_prepared(g, p, {});
}

void BM_MomentumRhs(benchmark::State& st) {
  const fbve::Grid g(static_cast<int>(st.range(0)), static_cast<int>(st.range(0)) / 2 + 1);
  const auto p = fbve::MaterialParams::unit(g);
  const auto s = perturbed(g, p);
  for (auto _ : st) benchmark::DoNotOptimize(fbve::dynamics::momentum_rhs(s, p));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(g.nodes()));
}
BENCHMARK(BM_MomentumRhs)->Arg(64)->Arg(128);

void BM_Rk4Step(benchmark::State& st) {
  const fbve::Grid g(static_cast<int>(st.range(0)), static_cast<int>(st.range(0)) / 2 + 1);
  const auto p = fbve::MaterialParams::unit(g);
  const auto s = perturbed(g, p);
  const double dt = fbve::dynamics::stable_dt(s, p, 0.5).dt;
  for (auto _ : st) benchmark::DoNotOptimize(fbve::dynamics::step_rk4(s, dt, p));
}
BENCHMARK(BM_Rk4Step)->Arg(64)->Arg(128);

void BM_Stencils(benchmark::State& st) {
  const fbve::Grid g(128, 65);
  const auto eta = fbve::identity_map(g);
  for (auto _ : st) {
    benchmark::DoNotOptimize(fbve::ops::d1(eta));
    benchmark::DoNotOptimize(fbve::ops::d2(eta));
  }
}
BENCHMARK(BM_Stencils);

void BM_Cofactor(benchmark::State& st) {
  const fbve::Grid g(128, 65);
  const auto p = fbve::MaterialParams::unit(g);
  const auto F = fbve::geometry::deformation_gradient(perturbed(g, p).eta());
  for (auto _ : st) benchmark::DoNotOptimize(fbve::geometry::cofactor(F));
}
BENCHMARK(BM_Cofactor);

void BM_BoundaryNorm(benchmark::State& st) {
  const fbve::Grid g(static_cast<int>(st.range(0)), 5);
  const auto p = fbve::MaterialParams::unit(g);
  const auto tr = fbve::ops::trace(perturbed(g, p).u, fbve::Face::top);
  for (auto _ : st) benchmark::DoNotOptimize(fbve::ops::boundary_norm(tr, 0.5));
}
BENCHMARK(BM_BoundaryNorm)->Arg(128)->Arg(1024);

void BM_SobolevNorm(benchmark::State& st) {
  const fbve::Grid g(128, 65);
  const auto p = fbve::MaterialParams::unit(g);
  const auto s = perturbed(g, p);
  for (auto _ : st) benchmark::DoNotOptimize(fbve::ops::sobolev_norm(s.u, 2));
}
BENCHMARK(BM_SobolevNorm);

}  // namespace

BENCHMARK_MAIN();
