#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "dce/errors.hpp"
#include "dce/types.hpp"

namespace dce::numkit {

namespace defaults {
inline constexpr double ode_tol = 1e-10;
inline constexpr double quad_rel_tol = 1e-9;
inline constexpr double quad_abs_tol = 1e-14;
}  // namespace defaults

// ---------------------------------------------------------------------------
// ODE integration: embedded Dormand-Prince 5(4) with PI step control and
// 4th-order dense output.
// ---------------------------------------------------------------------------

using Rhs = std::function<void(double t, std::span<const double> y,
                               std::span<double> dydt)>;

/// Scalar event guard: integration halts at the first sign change of
/// event(t, y) from positive to <= 0, localized on the dense interpolant.
using EventFn = std::function<double(double t, std::span<const double> y)>;

struct OdeProblem {
  std::size_t dimension = 0;
  Rhs rhs;
  double t0 = 0.0;
  double t1 = 0.0;
  std::vector<double> y0;
};

struct OdeOptions {
  double tol = defaults::ode_tol;  ///< used for both absolute and relative scale
  double dense_dt = 0.0;           ///< 0: emit accepted steps only
  double max_step = std::numeric_limits<double>::infinity();
  double initial_step = 0.0;  ///< 0: automatic
  std::size_t max_steps = 50'000'000;
  EventFn stop_event;
  /// When false, a step underflow truncates the solution instead of throwing.
  bool throw_on_underflow = true;
};

struct OdePoint {
  double t = 0.0;
  std::vector<double> y;
};

enum class OdeHalt { completed, event, step_underflow, max_steps };

struct OdeSolution {
  std::vector<OdePoint> points;  ///< t0, dense grid, final point
  double t_end = 0.0;
  std::vector<double> y_end;
  OdeHalt halt = OdeHalt::completed;
  std::size_t n_accepted = 0;
  std::size_t n_rejected = 0;
  std::size_t n_rhs = 0;
};

OdeSolution integrate_ode(const OdeProblem& problem, const OdeOptions& options);

/// Convenience form: adaptive integration with dense output at multiples of
/// dense_dt (plus the final point).
OdeSolution integrate_ode(const OdeProblem& problem, double tol,
                          double dense_dt);

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod (G7,K15) quadrature over finite and improper
// domains. Improper domains are mapped to finite ones:
//   full line:  x = tan(theta),   theta in (-pi/2, pi/2)
//   half line:  x = a + s/(1-s),  s in [0, 1)
// ---------------------------------------------------------------------------

struct QuadDomain {
  enum class Kind { finite, half_line, full_line };
  Kind kind = Kind::finite;
  double a = 0.0;
  double b = 0.0;

  static QuadDomain finite(double a, double b) {
    return {Kind::finite, a, b};
  }
  static QuadDomain half_line(double a = 0.0) {
    return {Kind::half_line, a, 0.0};
  }
  static QuadDomain full_line() { return {Kind::full_line, 0.0, 0.0}; }
};

struct QuadSpec {
  std::function<double(double)> integrand;
  QuadDomain domain = QuadDomain::full_line();
  double abs_tol = defaults::quad_abs_tol;
  double rel_tol = defaults::quad_rel_tol;
  std::size_t max_intervals = 4000;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
  std::size_t intervals = 0;
};

QuadResult quad_adaptive_result(const QuadSpec& spec);

/// Throws NonConvergence (carrying the achieved error estimate) if the
/// subdivision budget is exhausted before the tolerance is met.
double quad_adaptive(const QuadSpec& spec);

// ---------------------------------------------------------------------------
// Finite-difference partial derivatives, central differences with one level
// of Richardson extrapolation (leading error O(h^4)).
// ---------------------------------------------------------------------------

using ScalarField = std::function<double(std::span<const double>)>;

/// d^order f / dx_index^order at x; order is 1 or 2. base_step 0 selects
/// eps^(1/4) * max(1, |x_index|).
double fd_partial(const ScalarField& f, std::span<const double> x,
                  std::size_t index, int order, double base_step = 0.0);

// ---------------------------------------------------------------------------
// Polynomial extrapolation of a sequence (x_i, y_i) to x = 0 (Neville).
// ---------------------------------------------------------------------------

struct Extrapolation {
  double value = 0.0;
  /// |change| of the diagonal over the final Neville step; a stability proxy
  double uncertainty = 0.0;
};

Extrapolation extrapolate_to_zero(std::span<const double> x,
                                  std::span<const double> y);

}  // namespace dce::numkit
