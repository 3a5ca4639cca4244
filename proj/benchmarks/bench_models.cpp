#include <benchmark/benchmark.h>

#include "dce/box3d.hpp"
#include "dce/ring1d.hpp"

using namespace dce;

static void CasimirCutoffExtrapolation(benchmark::State& state) {
  const double scale = 1.0 / (2.0 * 3.14159265358979);
  const std::vector<double> lambdas = {0.5 * scale, 0.25 * scale,
                                       0.125 * scale, 0.0625 * scale};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        ring1d::casimir_density_numeric({1.0, 0.0, 0.0}, 1.0, lambdas));
  }
}
BENCHMARK(CasimirCutoffExtrapolation);

static void Rho2Quadrature(benchmark::State& state) {
  const ring1d::RingKinematics kin{1.0, 1.0, 0.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(ring1d::rho2_quadrature(kin, 1.0));
  }
}
BENCHMARK(Rho2Quadrature);

static void RingCollapse(benchmark::State& state) {
  ring1d::RingParams params;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        ring1d::simulate_ring(params, {1.0, 0.0}, 1.0, true));
  }
}
BENCHMARK(RingCollapse);

static void RhoCreationClosed(benchmark::State& state) {
  const auto kin = box3d::BoxKinematics::from_conformal(1.2, 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(box3d::rho_creation_closed(kin, 2.0));
  }
}
BENCHMARK(RhoCreationClosed);

static void RhoCreationQuadrature(benchmark::State& state) {
  const auto kin = box3d::BoxKinematics::from_conformal(1.2, 0.1);
  const box3d::CreationEnergyModel model;
  for (auto _ : state) {
    benchmark::DoNotOptimize(box3d::rho_creation_quadrature(kin, 2.0, model));
  }
}
BENCHMARK(RhoCreationQuadrature);

static void BoxAccelAssembly(benchmark::State& state) {
  const box3d::BoxParams params;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        box3d::box_accel({1.0, 50.0, 0.5}, 1.0, params));
  }
}
BENCHMARK(BoxAccelAssembly);

static void BoxLenzRun(benchmark::State& state) {
  const box3d::BoxParams params;
  for (auto _ : state) {
    benchmark::DoNotOptimize(box3d::simulate_box(params, {0.0, 0.5}, 3.0));
  }
}
BENCHMARK(BoxLenzRun);
