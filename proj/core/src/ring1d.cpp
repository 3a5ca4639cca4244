#include "dce/ring1d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dce::ring1d {

namespace {
constexpr double kPi = std::numbers::pi;
}

double RingParams::critical_length() const { return 1.0 / (12.0 * kPi * M); }

RingKinematics RingKinematics::from_length(double L, double L_dot,
                                           double L_ddot, double l) {
  return {L / l, L_dot / l, L_ddot / l};
}

double sigma_term(const RingKinematics& kin) {
  if (kin.a <= 0.0) throw Error("sigma_term: scale factor must be positive");
  const double hub = kin.a_dot / kin.a;
  return -0.5 * (kin.a_ddot / kin.a - 0.5 * hub * hub);
}

AdiabaticFrequency mode_frequency(double k, const RingKinematics& kin,
                                  double m, double timescale) {
  if (kin.a <= 0.0)
    throw Error("mode_frequency: scale factor must be positive");
  if (k == 0.0 && m == 0.0) {
    throw ZeroFrequency("mode_frequency: null mode of a massless field");
  }
  AdiabaticFrequency out;
  out.k = k;
  const double ka = k / kin.a;
  out.omega = std::sqrt(ka * ka + m * m);
  out.omega_dot = -(k * k * kin.a_dot) / (kin.a * kin.a * kin.a * out.omega);
  out.sigma = sigma_term(kin);
  out.epsilon = timescale > 0.0 ? 1.0 / (out.omega * timescale) : 0.0;
  return out;
}

double wkb_frequency(double k, const RingKinematics& kin, double m) {
  const AdiabaticFrequency fr = mode_frequency(k, kin, m);
  const double w = fr.omega;
  const double a = kin.a, ad = kin.a_dot, add = kin.a_ddot;
  const double a3 = a * a * a;
  // omegaddot from omega^2 = k^2/a^2 + m^2:
  //   d/dt omegadot = -k^2 addot/(a^3 w) + 3 k^2 adot^2/(a^4 w)
  //                   - k^4 adot^2/(a^6 w^3)
  const double k2 = k * k;
  const double omega_ddot = -k2 * add / (a3 * w) +
                            3.0 * k2 * ad * ad / (a3 * a * w) -
                            k2 * k2 * ad * ad / (a3 * a3 * w * w * w);
  const double bracket = omega_ddot / w -
                         1.5 * fr.omega_dot * fr.omega_dot / (w * w) -
                         2.0 * fr.sigma;
  return w - bracket / (4.0 * w);
}

double rho2_integrand(double k, const RingKinematics& kin, double m) {
  const AdiabaticFrequency fr = mode_frequency(k, kin, m);
  const double w = fr.omega;
  const double half_hub = 0.5 * kin.a_dot / kin.a;
  const double term1 = half_hub * half_hub / w;
  const double term2 = half_hub * fr.omega_dot / (w * w);
  const double term3 = 0.25 * fr.omega_dot * fr.omega_dot / (w * w * w);
  return (term1 + term2 + term3) / (8.0 * kPi * kin.a);
}

double rho2_quadrature(const RingKinematics& kin, double m, double rel_tol) {
  if (m <= 0.0) {
    throw Error("rho2_quadrature: field mass must be positive; the massless "
                "limit is taken through the integral");
  }
  numkit::QuadSpec spec;
  spec.domain = numkit::QuadDomain::full_line();
  spec.rel_tol = rel_tol;
  spec.abs_tol = 1e-300;  // drive on the relative tolerance
  spec.integrand = [&kin, m](double k) { return rho2_integrand(k, kin, m); };
  if (kin.a_dot == 0.0) return 0.0;
  return numkit::quad_adaptive(spec);
}

double rho2_closed(const RingKinematics& kin) {
  const double hub = kin.a_dot / kin.a;
  return hub * hub / (24.0 * kPi);
}

double casimir_density_numeric(const RingKinematics& kin, double l,
                               std::span<const double> lambda_seq,
                               double extrap_rel_tol) {
  if (kin.a <= 0.0 || l <= 0.0) {
    throw Error("casimir_density_numeric: a and l must be positive");
  }
  if (lambda_seq.size() < 3) {
    throw Error("casimir_density_numeric: need >= 3 cutoff values");
  }
  for (std::size_t i = 0; i + 1 < lambda_seq.size(); ++i) {
    if (!(lambda_seq[i] > lambda_seq[i + 1]) || lambda_seq[i + 1] <= 0.0) {
      throw Error("casimir_density_numeric: cutoffs must decrease toward 0");
    }
  }

  const double a = kin.a;
  const double L = a * l;
  const double omega1 = 2.0 * kPi / L;  // lowest massless mode frequency

  std::vector<double> xs(lambda_seq.size()), ys(lambda_seq.size());
  for (std::size_t j = 0; j < lambda_seq.size(); ++j) {
    const double lambda = lambda_seq[j];

    // mode sum over n >= 1 (the n = 0 term vanishes in the massless limit),
    // truncated when terms stop changing the partial sum
    double sum = 0.0;
    for (long long n = 1;; ++n) {
      const double wn = omega1 * static_cast<double>(n);
      const double term = wn * std::exp(-lambda * wn);
      sum += term;
      if (n > 8 && term < std::numeric_limits<double>::epsilon() * sum) break;
      if (n > 100'000'000) {
        throw Error("casimir_density_numeric: mode sum failed to truncate");
      }
    }

    // continuum counterpart of the same sum: (l/2pi) Int_0^inf dk (k/a) e^{-lambda k/a}
    numkit::QuadSpec spec;
    spec.domain = numkit::QuadDomain::half_line(0.0);
    spec.rel_tol = 1e-12;
    spec.abs_tol = 1e-300;
    spec.integrand = [a, lambda](double k) {
      const double w = k / a;
      return w * std::exp(-lambda * w);
    };
    const double integral = l / (2.0 * kPi) * numkit::quad_adaptive(spec);

    ys[j] = (sum - integral) / (a * l);
    xs[j] = lambda * lambda;  // even-power error structure
  }

  // Neville extrapolation lambda^2 -> 0 with a stability check on the last
  // two diagonal entries
  const auto ex = numkit::extrapolate_to_zero(xs, ys);
  if (ex.uncertainty > extrap_rel_tol * std::max(std::abs(ex.value), 1e-300)) {
    throw ExtrapolationUnstable(
        "casimir_density_numeric: extrapolants disagree", ex.uncertainty);
  }
  return ex.value;
}

double casimir_density_closed(const RingKinematics& kin, double l) {
  if (kin.a <= 0.0 || l <= 0.0) {
    throw Error("casimir_density_closed: a and l must be positive");
  }
  return -kPi / (6.0 * kin.a * kin.a * l * l);
}

double field_energy(double L, double L_dot) {
  if (L <= 0.0) throw Error("field_energy: length must be positive");
  return -L_dot * L_dot / (24.0 * kPi * L) - kPi / (6.0 * L);
}

double ring_accel(const MirrorState& state, const RingParams& params,
                  bool with_backreaction) {
  const double L = state.L;
  if (L <= 0.0) throw Error("ring_accel: length must be positive");
  if (!with_backreaction) {
    return -kPi / (6.0 * params.M * L * L);
  }
  const double L_star = params.critical_length();
  if (L <= L_star) {
    throw CriticalLength("ring_accel: length at or below the effective-mass "
                         "zero",
                         L, L_star);
  }
  const double numerator =
      -kPi / (6.0 * L * L) - state.L_dot * state.L_dot / (24.0 * kPi * L * L);
  return numerator / (params.M - 1.0 / (12.0 * kPi * L));
}

double ring_energy(double L, double L_dot, const RingParams& params,
                   bool with_backreaction) {
  // E = 1/2 Ldot^2 (M - [1/(12 pi L)]) - pi/(6L); the factored form avoids
  // the cancellation of two large kinetic terms near the critical length
  const double eff_mass =
      with_backreaction ? params.M - 1.0 / (12.0 * kPi * L) : params.M;
  return 0.5 * L_dot * L_dot * eff_mass - kPi / (6.0 * L);
}

SimulationRecord simulate_ring(const RingParams& params, const RingIc& ic,
                               double t_end, bool with_backreaction,
                               const RingRunOptions& options) {
  if (params.M <= 0.0 || params.l <= 0.0) {
    throw Error("simulate_ring: M and l must be positive");
  }
  if (t_end <= 0.0) throw Error("simulate_ring: t_end must be positive");
  const double L_star = params.critical_length();
  const double halt_length = with_backreaction
                                 ? (1.0 + options.halt_margin) * L_star
                                 : options.length_floor;
  if (ic.L0 <= halt_length) {
    throw CriticalLength("simulate_ring: initial length below the halt "
                         "threshold",
                         ic.L0, halt_length);
  }

  numkit::OdeProblem prob;
  prob.dimension = 2;
  prob.t0 = 0.0;
  prob.t1 = t_end;
  prob.y0 = {ic.L0, ic.V0};
  prob.rhs = [&params, with_backreaction](double, std::span<const double> y,
                                          std::span<double> dydt) {
    dydt[0] = y[1];
    dydt[1] = ring_accel({0.0, y[0], y[1]}, params, with_backreaction);
  };

  numkit::OdeOptions opt;
  opt.tol = options.tol;
  opt.dense_dt = options.dense_dt;
  opt.max_step = options.max_step;
  opt.throw_on_underflow = false;
  opt.stop_event = [halt_length](double, std::span<const double> y) {
    return y[0] - halt_length;
  };

  const auto sol = numkit::integrate_ode(prob, opt);

  SimulationRecord rec;
  rec.dense_dt = options.dense_dt;
  rec.t_end_requested = t_end;
  switch (sol.halt) {
    case numkit::OdeHalt::completed:
      rec.halt = HaltReason::completed;
      break;
    case numkit::OdeHalt::event:
      rec.halt = with_backreaction ? HaltReason::critical_length
                                   : HaltReason::length_floor;
      rec.halt_detail = with_backreaction
                            ? "length reached (1 + margin) * critical length"
                            : "length reached the configured floor";
      break;
    case numkit::OdeHalt::step_underflow:
      // an underflow on the doorstep of the halt length is the halt; the
      // time-to-threshold collapses faster than the representable step
      if (sol.y_end[0] - halt_length <= 1e-3 * halt_length) {
        rec.halt = with_backreaction ? HaltReason::critical_length
                                     : HaltReason::length_floor;
        rec.halt_detail = "step underflow within 1e-3 of the halt length";
      } else {
        rec.halt = HaltReason::step_underflow;
        rec.halt_detail = "integrator step underflow";
      }
      break;
    case numkit::OdeHalt::max_steps:
      rec.halt = HaltReason::max_steps;
      rec.halt_detail = "step budget exhausted";
      break;
  }

  rec.samples.reserve(sol.points.size());
  const double e0 = ring_energy(ic.L0, ic.V0, params, with_backreaction);
  double drift = 0.0;
  for (const auto& pt : sol.points) {
    SimulationSample s;
    s.t = pt.t;
    s.L = pt.y[0];
    s.L_dot = pt.y[1];
    s.L_ddot = ring_accel({s.t, s.L, s.L_dot}, params, with_backreaction);
    s.energy.casimir = -kPi / (6.0 * s.L);
    s.energy.kinetic_anomaly = -s.L_dot * s.L_dot / (24.0 * kPi * s.L);
    s.energy.kinetic = 0.5 * params.M * s.L_dot * s.L_dot;
    s.energy.total = s.energy.kinetic + s.energy.casimir +
                     (with_backreaction ? s.energy.kinetic_anomaly : 0.0);
    rec.samples.push_back(s);
    const double e = ring_energy(s.L, s.L_dot, params, with_backreaction);
    drift = std::max(drift, std::abs(e - e0));
  }
  rec.energy_drift = drift / std::max(std::abs(e0), 1e-300);
  return rec;
}

double el_residual(const SimulationRecord& record, const RingParams& params) {
  // Lagrangian: 1/2 M Ldot^2 - Ldot^2/(24 pi L) + pi/(6L)
  //   p       = dLag/dLdot = Ldot (M - 1/(12 pi L))
  //   dLag/dL = Ldot^2/(24 pi L^2) - pi/(6 L^2)
  // Residual uses only the recorded uniform grid; a trailing event sample at
  // a non-uniform spacing is ignored.
  const auto& s = record.samples;
  if (s.size() < 3) throw Error("el_residual: need >= 3 samples");
  const double h = s[1].t - s[0].t;
  if (h <= 0.0) throw Error("el_residual: record not time-ordered");

  std::size_t n = s.size();
  // drop a final sample that does not sit on the uniform grid
  while (n >= 3 &&
         std::abs((s[n - 1].t - s[n - 2].t) - h) > 1e-9 * h) {
    --n;
  }
  if (n < 3) throw Error("el_residual: no uniform interior window");

  auto momentum = [&](const SimulationSample& q) {
    return q.L_dot * (params.M - 1.0 / (12.0 * kPi * q.L));
  };
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double dp_dt = (momentum(s[i + 1]) - momentum(s[i - 1])) / (2.0 * h);
    const double dlag_dl =
        s[i].L_dot * s[i].L_dot / (24.0 * kPi * s[i].L * s[i].L) -
        kPi / (6.0 * s[i].L * s[i].L);
    worst = std::max(worst, std::abs(dp_dt - dlag_dl));
  }
  return worst;
}

}  // namespace dce::ring1d
