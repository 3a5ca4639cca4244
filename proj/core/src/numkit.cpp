#include "dce/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace dce::numkit {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Dormand-Prince 5(4) tableau (FSAL).
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0,
                 c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                 a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                 a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
// b_i - bhat_i (5th-order solution minus embedded 4th-order one)
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// dense-output coefficients (Hairer & Wanner)
constexpr double d1 = -12715105075.0 / 11282082432.0,
                 d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0,
                 d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0,
                 d7 = 69997945.0 / 29380423.0;

struct DenseCoeffs {
  double t = 0.0, h = 0.0;
  std::vector<double> r1, r2, r3, r4, r5;

  void eval(double ti, std::span<double> out) const {
    const double theta = (ti - t) / h;
    const double theta1 = 1.0 - theta;
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = r1[i] + theta * (r2[i] + theta1 * (r3[i] +
               theta * (r4[i] + theta1 * r5[i])));
    }
  }
};

double hinit(const OdeProblem& p, const OdeOptions& opt,
             std::span<const double> f0, double dir,
             std::vector<double>& scratch_y, std::vector<double>& scratch_f) {
  const std::size_t n = p.dimension;
  double dnf = 0.0, dny = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sk = opt.tol + opt.tol * std::abs(p.y0[i]);
    dnf += (f0[i] / sk) * (f0[i] / sk);
    dny += (p.y0[i] / sk) * (p.y0[i] / sk);
  }
  double h0;
  if (dnf <= 1e-10 || dny <= 1e-10) {
    h0 = 1e-6;
  } else {
    h0 = 0.01 * std::sqrt(dny / dnf);
  }
  h0 = std::min(h0, std::abs(p.t1 - p.t0));

  // one explicit Euler step to estimate the second derivative
  for (std::size_t i = 0; i < n; ++i) scratch_y[i] = p.y0[i] + dir * h0 * f0[i];
  p.rhs(p.t0 + dir * h0, scratch_y, scratch_f);
  double der2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sk = opt.tol + opt.tol * std::abs(p.y0[i]);
    const double d = (scratch_f[i] - f0[i]) / sk;
    der2 += d * d;
  }
  der2 = std::sqrt(der2) / h0;

  const double der12 = std::max(der2, std::sqrt(dnf));
  double h1;
  if (der12 <= 1e-15) {
    h1 = std::max(1e-6, h0 * 1e-3);
  } else {
    h1 = std::pow(0.01 / der12, 0.2);
  }
  return std::min({100.0 * h0, h1, std::abs(p.t1 - p.t0), opt.max_step});
}

}  // namespace

OdeSolution integrate_ode(const OdeProblem& p, const OdeOptions& opt) {
  if (p.dimension == 0 || p.y0.size() != p.dimension || !p.rhs) {
    throw Error("integrate_ode: malformed problem");
  }
  if (opt.tol <= 0.0) throw Error("integrate_ode: tol must be positive");

  OdeSolution sol;
  sol.points.push_back({p.t0, p.y0});
  if (p.t1 == p.t0) {
    // degenerate interval: return the initial state unchanged
    sol.t_end = p.t0;
    sol.y_end = p.y0;
    return sol;
  }

  const std::size_t n = p.dimension;
  const double dir = (p.t1 > p.t0) ? 1.0 : -1.0;
  // run the controller an octave tighter than requested so that error
  // accumulated over long windows stays near the requested tolerance
  const double tol_eff = 0.125 * opt.tol;

  std::vector<double> y = p.y0, ynew(n), ystage(n), err_vec(n);
  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
  DenseCoeffs dense;
  dense.r1.resize(n);
  dense.r2.resize(n);
  dense.r3.resize(n);
  dense.r4.resize(n);
  dense.r5.resize(n);
  std::vector<double> ydense(n);

  double t = p.t0;
  p.rhs(t, y, k1);
  sol.n_rhs = 1;

  double h;
  if (opt.initial_step > 0.0) {
    h = std::min(opt.initial_step, std::abs(p.t1 - p.t0));
  } else {
    h = hinit(p, opt, k1, dir, ynew, k2);
    ++sol.n_rhs;
  }

  double event_prev = 0.0;
  if (opt.stop_event) event_prev = opt.stop_event(t, y);

  // dense-output bookkeeping: next multiple of dense_dt (from t0) to emit
  long long dense_index = 1;
  auto next_dense_t = [&]() { return p.t0 + dir * opt.dense_dt * dense_index; };

  constexpr double safe = 0.9, beta = 0.04;
  constexpr double expo1 = 0.2 - beta * 0.75;
  double facold = 1e-4;
  bool last_rejected = false;
  bool finished = false;

  auto finish = [&](double tf, std::span<const double> yf, OdeHalt halt) {
    if (sol.points.empty() ||
        std::abs(sol.points.back().t - tf) > 1e-14 * (1.0 + std::abs(tf))) {
      sol.points.push_back({tf, {yf.begin(), yf.end()}});
    }
    sol.t_end = tf;
    sol.y_end.assign(yf.begin(), yf.end());
    sol.halt = halt;
    finished = true;
  };

  while (!finished) {
    if (sol.n_accepted + sol.n_rejected >= opt.max_steps) {
      finish(t, y, OdeHalt::max_steps);
      break;
    }
    h = std::min(h, opt.max_step);
    bool last_step = false;
    if (dir * (t + dir * h - p.t1) >= 0.0) {
      h = std::abs(p.t1 - t);
      last_step = true;
    }
    const double min_step = std::max(32.0 * kEps * std::abs(t), 1e-300);
    if (h < min_step) {
      if (last_step) {
        // within roundoff of the end time; do not fabricate an underflow
        finish(p.t1, y, OdeHalt::completed);
        break;
      }
      if (opt.throw_on_underflow) {
        throw StepUnderflow("integrate_ode: step size underflow at t=" +
                                std::to_string(t),
                            t, h);
      }
      finish(t, y, OdeHalt::step_underflow);
      break;
    }
    const double hs = dir * h;  // signed step

    // stages
    for (std::size_t i = 0; i < n; ++i)
      ystage[i] = y[i] + hs * a21 * k1[i];
    p.rhs(t + c2 * hs, ystage, k2);
    for (std::size_t i = 0; i < n; ++i)
      ystage[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
    p.rhs(t + c3 * hs, ystage, k3);
    for (std::size_t i = 0; i < n; ++i)
      ystage[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    p.rhs(t + c4 * hs, ystage, k4);
    for (std::size_t i = 0; i < n; ++i)
      ystage[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] +
                               a54 * k4[i]);
    p.rhs(t + c5 * hs, ystage, k5);
    for (std::size_t i = 0; i < n; ++i)
      ystage[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                               a64 * k4[i] + a65 * k5[i]);
    p.rhs(t + hs, ystage, k6);
    for (std::size_t i = 0; i < n; ++i)
      ynew[i] = y[i] + hs * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] +
                             a75 * k5[i] + a76 * k6[i]);
    p.rhs(t + hs, ynew, k7);
    sol.n_rhs += 6;

    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      err_vec[i] = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                         e6 * k6[i] + e7 * k7[i]);
      const double sk =
          tol_eff + tol_eff * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err += (err_vec[i] / sk) * (err_vec[i] / sk);
    }
    err = std::sqrt(err / static_cast<double>(n));
    if (!std::isfinite(err)) err = 2.0;  // force rejection on NaN/Inf

    if (err > 1.0) {
      ++sol.n_rejected;
      h *= std::max(0.2, std::min(1.0, safe * std::pow(err, -0.2)));
      last_rejected = true;
      continue;
    }

    ++sol.n_accepted;

    // dense coefficients for this step
    dense.t = t;
    dense.h = hs;
    for (std::size_t i = 0; i < n; ++i) {
      const double ydiff = ynew[i] - y[i];
      const double bspl = hs * k1[i] - ydiff;
      dense.r1[i] = y[i];
      dense.r2[i] = ydiff;
      dense.r3[i] = bspl;
      dense.r4[i] = ydiff - hs * k7[i] - bspl;
      dense.r5[i] = hs * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                          d6 * k6[i] + d7 * k7[i]);
    }

    const double t_new = last_step ? p.t1 : t + hs;

    // event localization on the dense interpolant
    double t_emit_limit = t_new;
    bool event_hit = false;
    std::vector<double> y_event;
    if (opt.stop_event) {
      const double ev_new = opt.stop_event(t_new, ynew);
      if (event_prev > 0.0 && ev_new <= 0.0) {
        double lo = t, hi = t_new;
        for (int it = 0; it < 128 && (hi - lo) * dir >
                                          1e-15 * (1.0 + std::abs(t_new));
             ++it) {
          const double mid = 0.5 * (lo + hi);
          dense.eval(mid, ydense);
          if (opt.stop_event(mid, ydense) > 0.0) {
            lo = mid;
          } else {
            hi = mid;
          }
        }
        dense.eval(hi, ydense);
        y_event = ydense;
        t_emit_limit = hi;
        event_hit = true;
      }
      event_prev = ev_new;
    }

    // emit dense points in (t, t_emit_limit]
    if (opt.dense_dt > 0.0) {
      while (dir * (next_dense_t() - t_emit_limit) <=
             1e-9 * opt.dense_dt) {
        const double td = next_dense_t();
        dense.eval(td, ydense);
        sol.points.push_back({td, ydense});
        ++dense_index;
      }
    } else if (!event_hit && !last_step) {
      sol.points.push_back({t_new, ynew});
    }

    if (event_hit) {
      finish(t_emit_limit, y_event, OdeHalt::event);
      break;
    }
    if (last_step) {
      finish(p.t1, ynew, OdeHalt::completed);
      break;
    }

    t = t_new;
    std::swap(y, ynew);
    std::swap(k1, k7);

    double fac = safe * std::pow(err, -expo1) * std::pow(facold, beta);
    facold = std::max(err, 1e-4);
    if (last_rejected) fac = std::min(fac, 1.0);
    h *= std::max(0.2, std::min(10.0, fac));
    last_rejected = false;
  }

  return sol;
}

OdeSolution integrate_ode(const OdeProblem& problem, double tol,
                          double dense_dt) {
  OdeOptions opt;
  opt.tol = tol;
  opt.dense_dt = dense_dt;
  return integrate_ode(problem, opt);
}

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

namespace {

// Gauss(7)-Kronrod(15) nodes and weights on [-1, 1].
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  double value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk15(const F& f, double a, double b, std::size_t& evals) {
  const double center = 0.5 * (a + b);
  const double halfwidth = 0.5 * (b - a);

  const double fc = f(center);
  double resk = kWgk[7] * fc;
  double resg = kWg[3] * fc;
  double resabs = kWgk[7] * std::abs(fc);
  double fv[15];
  fv[14] = fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = halfwidth * kXgk[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    fv[2 * j] = f1;
    fv[2 * j + 1] = f2;
    resk += kWgk[j] * (f1 + f2);
    resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
  }
  evals += 15;

  const double mean = 0.5 * resk;
  double resasc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) {
    resasc += kWgk[j] *
              (std::abs(fv[2 * j] - mean) + std::abs(fv[2 * j + 1] - mean));
  }
  resk *= halfwidth;
  resg *= halfwidth;
  resabs *= halfwidth;
  resasc *= halfwidth;

  double err = std::abs(resk - resg);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps)) {
    err = std::max(err, 50.0 * kEps * resabs);
  }
  if (!std::isfinite(resk)) {
    throw Error("quad_adaptive: integrand not finite on panel");
  }
  return {a, b, resk, err};
}

}  // namespace

QuadResult quad_adaptive_result(const QuadSpec& spec) {
  if (!spec.integrand) throw Error("quad_adaptive: missing integrand");
  if (spec.abs_tol <= 0.0 || spec.rel_tol <= 0.0) {
    throw Error("quad_adaptive: tolerances must be strictly positive");
  }

  // map the requested domain onto a finite interval
  const auto& f = spec.integrand;
  std::function<double(double)> g;
  double lo = 0.0, hi = 0.0;
  switch (spec.domain.kind) {
    case QuadDomain::Kind::finite:
      g = f;
      lo = spec.domain.a;
      hi = spec.domain.b;
      break;
    case QuadDomain::Kind::half_line: {
      const double a = spec.domain.a;
      g = [&f, a](double s) {
        const double om = 1.0 - s;
        return f(a + s / om) / (om * om);
      };
      lo = 0.0;
      hi = 1.0;
      break;
    }
    case QuadDomain::Kind::full_line:
      g = [&f](double theta) {
        const double c = std::cos(theta);
        return f(std::tan(theta)) / (c * c);
      };
      lo = -1.5707963267948966;
      hi = 1.5707963267948966;
      break;
  }

  QuadResult res;
  std::priority_queue<Panel> heap;
  Panel first = gk15(g, lo, hi, res.evaluations);
  double total = first.value;
  double total_err = first.error;
  heap.push(first);

  while (total_err > std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) {
    if (heap.size() >= spec.max_intervals) {
      res.value = total;
      res.error = total_err;
      res.intervals = heap.size();
      throw NonConvergence(
          "quad_adaptive: subdivision budget exhausted (err=" +
              std::to_string(total_err) + ")",
          total_err);
    }
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // interval no longer splittable; restore and stop refining
      heap.push(worst);
      break;
    }
    Panel left = gk15(g, worst.a, mid, res.evaluations);
    Panel right = gk15(g, mid, worst.b, res.evaluations);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }

  res.value = total;
  res.error = total_err;
  res.intervals = heap.size();
  return res;
}

double quad_adaptive(const QuadSpec& spec) {
  return quad_adaptive_result(spec).value;
}

// ---------------------------------------------------------------------------
// Finite differences
// ---------------------------------------------------------------------------

double fd_partial(const ScalarField& f, std::span<const double> x,
                  std::size_t index, int order, double base_step) {
  if (!f) throw Error("fd_partial: missing function");
  if (index >= x.size()) throw Error("fd_partial: index out of range");
  if (order != 1 && order != 2) throw Error("fd_partial: order must be 1 or 2");

  const double h = base_step > 0.0
                       ? base_step
                       : std::pow(kEps, 0.25) * std::max(1.0, std::abs(x[index]));

  std::vector<double> xs(x.begin(), x.end());
  auto eval = [&](double dx) {
    xs[index] = x[index] + dx;
    const double v = f(xs);
    xs[index] = x[index];
    return v;
  };

  auto diff = [&](double hh) {
    if (order == 1) return (eval(hh) - eval(-hh)) / (2.0 * hh);
    const double f0 = eval(0.0);
    return (eval(hh) - 2.0 * f0 + eval(-hh)) / (hh * hh);
  };

  const double d1 = diff(h);
  const double d2 = diff(0.5 * h);
  return (4.0 * d2 - d1) / 3.0;
}

// ---------------------------------------------------------------------------
// Extrapolation
// ---------------------------------------------------------------------------

Extrapolation extrapolate_to_zero(std::span<const double> x,
                                  std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error("extrapolate_to_zero: need >= 2 samples");
  }
  const std::size_t n = x.size();
  std::vector<double> t(y.begin(), y.end());
  double prev_diag = t[0];
  double diag = t[0];
  for (std::size_t level = 1; level < n; ++level) {
    for (std::size_t i = 0; i + level < n; ++i) {
      const double xi = x[i];
      const double xj = x[i + level];
      t[i] = (xi * t[i + 1] - xj * t[i]) / (xi - xj);
    }
    prev_diag = diag;
    diag = t[0];
  }
  return {diag, std::abs(diag - prev_diag)};
}

}  // namespace dce::numkit
