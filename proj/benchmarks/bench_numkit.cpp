#include <benchmark/benchmark.h>

#include <cmath>

#include "dce/numkit.hpp"

using namespace dce::numkit;

static void QuadFiniteSmooth(benchmark::State& state) {
  QuadSpec spec;
  spec.domain = QuadDomain::finite(0.0, 3.0);
  spec.integrand = [](double x) { return std::exp(-x) * std::sin(4.0 * x); };
  for (auto _ : state) {
    benchmark::DoNotOptimize(quad_adaptive(spec));
  }
}
BENCHMARK(QuadFiniteSmooth);

static void QuadFullLineAlgebraicTail(benchmark::State& state) {
  QuadSpec spec;
  spec.domain = QuadDomain::full_line();
  spec.integrand = [](double u) { return std::pow(1.0 + u * u, -2.5); };
  for (auto _ : state) {
    benchmark::DoNotOptimize(quad_adaptive(spec));
  }
}
BENCHMARK(QuadFullLineAlgebraicTail);

static void OdeOscillator(benchmark::State& state) {
  OdeProblem p;
  p.dimension = 2;
  p.t0 = 0.0;
  p.t1 = static_cast<double>(state.range(0));
  p.y0 = {1.0, 0.0};
  p.rhs = [](double, std::span<const double> y, std::span<double> d) {
    d[0] = y[1];
    d[1] = -y[0];
  };
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate_ode(p, 1e-10, 0.0));
  }
}
BENCHMARK(OdeOscillator)->Arg(10)->Arg(100);

static void FdPartialRichardson(benchmark::State& state) {
  const ScalarField f = [](std::span<const double> x) {
    return std::exp(x[0]) * std::sin(2.0 * x[1]);
  };
  const double x0[2] = {0.3, 1.1};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        fd_partial(f, std::span<const double>(x0, 2), 1, 1));
  }
}
BENCHMARK(FdPartialRichardson);
