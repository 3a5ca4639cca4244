#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dce/numkit.hpp"

using namespace dce;
using namespace dce::numkit;

namespace {

constexpr double kPi = std::numbers::pi;

OdeProblem exp_decay(double t1 = 1.0) {
  OdeProblem p;
  p.dimension = 1;
  p.t0 = 0.0;
  p.t1 = t1;
  p.y0 = {1.0};
  p.rhs = [](double, std::span<const double> y, std::span<double> d) {
    d[0] = -y[0];
  };
  return p;
}

OdeProblem oscillator(double omega, double t1) {
  OdeProblem p;
  p.dimension = 2;
  p.t0 = 0.0;
  p.t1 = t1;
  p.y0 = {1.0, 0.0};
  p.rhs = [omega](double, std::span<const double> y, std::span<double> d) {
    d[0] = y[1];
    d[1] = -omega * omega * y[0];
  };
  return p;
}

}  // namespace

TEST_CASE("integrate_ode: exponential decay hits e^-1") {
  const double tol = 1e-10;
  auto sol = integrate_ode(exp_decay(), tol, 0.25);
  CHECK(sol.halt == OdeHalt::completed);
  CHECK(sol.t_end == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(sol.y_end[0] - std::exp(-1.0)) <= tol);
}

TEST_CASE("integrate_ode: harmonic oscillator returns after one period") {
  const double tol = 1e-10;
  auto sol = integrate_ode(oscillator(1.0, 2.0 * kPi), tol, 1.0);
  CHECK(std::abs(sol.y_end[0] - 1.0) <= 10.0 * tol);
  CHECK(std::abs(sol.y_end[1] - 0.0) <= 10.0 * tol);
}

TEST_CASE("integrate_ode: oscillator energy conserved over 100/omega") {
  const double tol = 1e-10;
  const double omega = 2.3;
  auto sol = integrate_ode(oscillator(omega, 100.0 / omega), tol, 0.5);
  const double e0 = omega * omega;  // v^2 + w^2 y^2 at (1, 0)
  for (const auto& pt : sol.points) {
    const double e = pt.y[1] * pt.y[1] + omega * omega * pt.y[0] * pt.y[0];
    CHECK(std::abs(e - e0) / e0 <= 10.0 * tol);
  }
}

TEST_CASE("integrate_ode: halving tol never increases final error") {
  for (double tol : {1e-4, 1e-6, 1e-8}) {
    auto coarse = integrate_ode(exp_decay(), tol, 1.0);
    auto fine = integrate_ode(exp_decay(), tol / 2.0, 1.0);
    const double ec = std::abs(coarse.y_end[0] - std::exp(-1.0));
    const double ef = std::abs(fine.y_end[0] - std::exp(-1.0));
    CHECK(ef <= ec + 1e-15);

    auto coarse_o = integrate_ode(oscillator(1.0, 2.0 * kPi), tol, 0.0);
    auto fine_o = integrate_ode(oscillator(1.0, 2.0 * kPi), tol / 2.0, 0.0);
    const double eco = std::hypot(coarse_o.y_end[0] - 1.0, coarse_o.y_end[1]);
    const double efo = std::hypot(fine_o.y_end[0] - 1.0, fine_o.y_end[1]);
    CHECK(efo <= eco + 1e-15);
  }
}

TEST_CASE("integrate_ode: dense output lands on multiples of dense_dt") {
  OdeProblem p;
  p.dimension = 1;
  p.t0 = 0.0;
  p.t1 = 1.0;
  p.y0 = {0.0};
  p.rhs = [](double t, std::span<const double>, std::span<double> d) {
    d[0] = std::cos(t);
  };
  auto sol = integrate_ode(p, 1e-10, 0.1);
  REQUIRE(sol.points.size() == 11);  // t = 0.0, 0.1, ..., 1.0
  for (std::size_t i = 0; i < sol.points.size(); ++i) {
    CHECK(sol.points[i].t == doctest::Approx(0.1 * i).epsilon(1e-12));
    CHECK(std::abs(sol.points[i].y[0] - std::sin(sol.points[i].t)) < 1e-9);
  }
}

TEST_CASE("integrate_ode: backward integration") {
  OdeProblem p;
  p.dimension = 1;
  p.t0 = 1.0;
  p.t1 = 0.0;
  p.y0 = {std::exp(-1.0)};
  p.rhs = [](double, std::span<const double> y, std::span<double> d) {
    d[0] = -y[0];
  };
  auto sol = integrate_ode(p, 1e-10, 0.25);
  CHECK(sol.t_end == 0.0);
  CHECK(std::abs(sol.y_end[0] - 1.0) <= 1e-10);
  CHECK(sol.points.front().t == 1.0);
  CHECK(sol.points.back().t == 0.0);
}

TEST_CASE("integrate_ode: degenerate interval returns the initial state") {
  auto p = exp_decay(0.0);
  auto sol = integrate_ode(p, 1e-10, 0.1);
  REQUIRE(sol.points.size() == 1);
  CHECK(sol.points[0].y[0] == 1.0);
  CHECK(sol.t_end == 0.0);
}

TEST_CASE("integrate_ode: stop event localized on the dense interpolant") {
  OdeProblem p;
  p.dimension = 1;
  p.t0 = 0.0;
  p.t1 = 5.0;
  p.y0 = {1.0};
  p.rhs = [](double, std::span<const double>, std::span<double> d) {
    d[0] = -1.0;
  };
  OdeOptions opt;
  opt.tol = 1e-10;
  opt.dense_dt = 0.05;
  opt.stop_event = [](double, std::span<const double> y) {
    return y[0] - 0.35;
  };
  auto sol = integrate_ode(p, opt);
  CHECK(sol.halt == OdeHalt::event);
  CHECK(sol.t_end == doctest::Approx(0.65).epsilon(1e-9));
  CHECK(sol.y_end[0] == doctest::Approx(0.35).epsilon(1e-9));
  // no dense sample beyond the event
  CHECK(sol.points.back().t <= sol.t_end + 1e-12);
}

TEST_CASE("integrate_ode: finite-time blowup triggers StepUnderflow") {
  OdeProblem p;
  p.dimension = 1;
  p.t0 = 0.0;
  p.t1 = 2.0;
  p.y0 = {1.0};
  p.rhs = [](double, std::span<const double> y, std::span<double> d) {
    d[0] = y[0] * y[0];  // diverges at t = 1
  };
  CHECK_THROWS_AS((void)integrate_ode(p, 1e-10, 0.1), StepUnderflow);

  OdeOptions opt;
  opt.tol = 1e-10;
  opt.dense_dt = 0.1;
  opt.throw_on_underflow = false;
  auto sol = integrate_ode(p, opt);
  CHECK(sol.halt == OdeHalt::step_underflow);
  CHECK(sol.t_end < 2.0);
  CHECK(sol.t_end == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("quad_adaptive: polynomial on a finite interval") {
  QuadSpec spec;
  spec.domain = QuadDomain::finite(0.0, 1.0);
  spec.integrand = [](double x) { return x * x; };
  CHECK(quad_adaptive(spec) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  spec.domain = QuadDomain::finite(-1.0, 2.0);
  spec.integrand = [](double x) {
    return 5.0 * std::pow(x, 8) - 3.0 * std::pow(x, 5) + x;
  };
  // exact: 5/9 x^9 - 1/2 x^6 + 1/2 x^2 evaluated on [-1, 2]
  const double exact = (5.0 / 9.0 * 512.0 - 0.5 * 64.0 + 2.0) -
                       (-5.0 / 9.0 - 0.5 + 0.5);
  CHECK(quad_adaptive(spec) == doctest::Approx(exact).epsilon(1e-13));
}

TEST_CASE("quad_adaptive: full-line integral against its antiderivative") {
  QuadSpec spec;
  spec.domain = QuadDomain::full_line();
  spec.integrand = [](double u) {
    return 0.25 * std::pow(1.0 + u * u, -2.5);
  };
  // antiderivative of (1+u^2)^{-5/2} is u (3 + 2u^2) / (3 (1+u^2)^{3/2})
  auto F = [](double u) {
    return u * (3.0 + 2.0 * u * u) / (3.0 * std::pow(1.0 + u * u, 1.5));
  };
  const double expected = 0.25 * (F(1e8) - F(-1e8));
  const double got = quad_adaptive(spec);
  CHECK(got == doctest::Approx(expected).epsilon(1e-9));
  CHECK(got == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("quad_adaptive: half-line exponential") {
  QuadSpec spec;
  spec.domain = QuadDomain::half_line(0.0);
  spec.integrand = [](double x) { return std::exp(-x); };
  CHECK(quad_adaptive(spec) == doctest::Approx(1.0).epsilon(1e-9));

  spec.domain = QuadDomain::half_line(2.0);
  CHECK(quad_adaptive(spec) == doctest::Approx(std::exp(-2.0)).epsilon(1e-9));
}

TEST_CASE("quad_adaptive: symmetric integrand doubles its half-domain value") {
  auto f = [](double x) { return std::exp(-x * x) * std::cos(x); };
  QuadSpec full;
  full.domain = QuadDomain::full_line();
  full.integrand = f;
  QuadSpec half;
  half.domain = QuadDomain::half_line(0.0);
  half.integrand = f;
  const double vf = quad_adaptive(full);
  const double vh = quad_adaptive(half);
  CHECK(std::abs(vf - 2.0 * vh) <= 2e-9 * std::abs(vf));

  QuadSpec fin;
  fin.domain = QuadDomain::finite(-3.0, 3.0);
  fin.integrand = f;
  QuadSpec finh;
  finh.domain = QuadDomain::finite(0.0, 3.0);
  finh.integrand = f;
  CHECK(std::abs(quad_adaptive(fin) - 2.0 * quad_adaptive(finh)) <=
        2e-9 * std::abs(quad_adaptive(fin)));
}

TEST_CASE("quad_adaptive: divergent integrand reports NonConvergence") {
  QuadSpec spec;
  spec.domain = QuadDomain::finite(0.0, 1.0);
  spec.integrand = [](double x) { return 1.0 / x; };
  spec.max_intervals = 100;
  bool threw = false;
  try {
    (void)quad_adaptive(spec);
  } catch (const NonConvergence& e) {
    threw = true;
    CHECK(e.achieved > 0.0);
  }
  CHECK(threw);
}

TEST_CASE("fd_partial: known derivatives") {
  const ScalarField square = [](std::span<const double> x) {
    return x[0] * x[0];
  };
  const double x0[1] = {3.0};
  CHECK(std::abs(fd_partial(square, std::span<const double>(x0, 1), 0, 1) -
                 6.0) <= 1e-8);

  const ScalarField sine = [](std::span<const double> x) {
    return std::sin(x[0]);
  };
  const double origin[1] = {0.0};
  CHECK(std::abs(fd_partial(sine, std::span<const double>(origin, 1), 0, 2)) <=
        1e-6);

  // kinetic term of the ring field energy: d/dV of -V^2/(24 pi L) at (1, 2)
  const ScalarField kin = [](std::span<const double> x) {
    return -x[1] * x[1] / (24.0 * kPi * x[0]);
  };
  const double lv[2] = {1.0, 2.0};
  const double got = fd_partial(kin, std::span<const double>(lv, 2), 1, 1);
  CHECK(std::abs(got - (-1.0 / (6.0 * kPi))) <= 1e-8);
}

TEST_CASE("fd_partial: halving the base step gains >= 8x (order 4)") {
  const ScalarField f = [](std::span<const double> x) {
    return std::exp(x[0]) * std::sin(2.0 * x[0]);
  };
  const double x0[1] = {1.0};
  const std::span<const double> xs(x0, 1);
  const double exact = std::exp(1.0) * (std::sin(2.0) + 2.0 * std::cos(2.0));
  for (double h : {0.4, 0.2}) {
    const double e1 = std::abs(fd_partial(f, xs, 0, 1, h) - exact);
    const double e2 = std::abs(fd_partial(f, xs, 0, 1, h / 2.0) - exact);
    CHECK(e1 / e2 >= 8.0);
  }
}

TEST_CASE("extrapolate_to_zero: polynomial sequence") {
  const double xs[4] = {0.4, 0.2, 0.1, 0.05};
  double ys[4];
  for (int i = 0; i < 4; ++i) ys[i] = 3.0 + 2.0 * xs[i] + xs[i] * xs[i];
  auto ex = extrapolate_to_zero(std::span<const double>(xs, 4),
                                std::span<const double>(ys, 4));
  CHECK(ex.value == doctest::Approx(3.0).epsilon(1e-12));
}
