#include "dce/box3d.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

namespace dce::box3d {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// fd base steps tuned for one Richardson level; the nested (mixed) partials
// get a wider outer step because their inner values carry fd noise
double step_first(double x) { return std::pow(kEps, 0.20) * std::max(1.0, std::abs(x)); }
double step_second(double x) { return std::pow(kEps, 1.0 / 6.0) * std::max(1.0, std::abs(x)); }
double step_outer(double x) { return std::pow(kEps, 0.15) * std::max(1.0, std::abs(x)); }
}  // namespace

KVector KVector::discrete(int n1, int n2, int n3, double l) {
  const double f = 2.0 * kPi / l;
  return {f * n1, f * n2, f * n3};
}

double conformal_time_map(const std::function<double(double)>& a_of_t,
                          double t0, double t, double rel_tol) {
  if (!a_of_t) throw Error("conformal_time_map: missing trajectory");
  if (t == t0) return 0.0;
  numkit::QuadSpec spec;
  spec.domain = numkit::QuadDomain::finite(t0, t);
  spec.rel_tol = rel_tol;
  spec.integrand = [&a_of_t](double s) {
    const double a = a_of_t(s);
    if (a <= 0.0) throw Error("conformal_time_map: nonpositive scale factor");
    return 1.0 / std::cbrt(a);
  };
  return numkit::quad_adaptive(spec);
}

ConformalOmega omega_conformal(const KVector& k, double a, double m_field) {
  if (a <= 0.0) throw Error("omega_conformal: scale factor must be positive");
  const double kyz2 = k.ky * k.ky + k.kz * k.kz;
  const double base = k.kx * k.kx + kyz2 + m_field * m_field;
  if (base == 0.0) {
    throw ZeroFrequency("omega_conformal: null mode of a massless field");
  }
  ConformalOmega out;
  out.Omega0 = std::sqrt(base);
  out.Omega =
      std::cbrt(a) * std::sqrt(k.kx * k.kx / (a * a) + kyz2 + m_field * m_field);
  return out;
}

double q_anisotropy(const BoxKinematics& kin) {
  if (kin.a <= 0.0) throw Error("q_anisotropy: scale factor must be positive");
  const double r = kin.a_prime() / kin.a;
  return r * r / 9.0;
}

bool in_region(const KVector& k, double a, double t) {
  if (t <= 0.0) throw Error("in_region: t must be positive");
  const double kyz2 = k.ky * k.ky + k.kz * k.kz;
  const double kxa = k.kx / a;
  return kyz2 + kxa * kxa <= 1.0 / (t * t);
}

double pee(double a, double taylor_halfwidth) {
  if (a <= 0.0) throw Error("pee: a must be positive");
  const double e = a - 1.0;
  if (std::abs(e) < taylor_halfwidth) {
    // both branches approach 1 + (2/3)e - (1/5)e^2 + O(e^3)
    return 1.0 + e * (2.0 / 3.0 - 0.2 * e);
  }
  if (a < 1.0) {
    const double root = std::sqrt(1.0 - a * a);
    return a * std::acos(a) / root;
  }
  const double root = std::sqrt(a * a - 1.0);
  return a * std::acosh(a) / root;
}

double rho_creation_quadrature(const BoxKinematics& kin, double t,
                               const CreationEnergyModel& model) {
  if (t <= 0.0) throw Error("rho_creation_quadrature: t must be positive");
  if (kin.a <= 0.0) {
    throw Error("rho_creation_quadrature: scale factor must be positive");
  }
  const double a = kin.a;
  const double a13 = std::cbrt(a);
  const double Q = q_anisotropy(kin);
  const double kx_max = a / t;

  // integrand of the kyz integral at fixed kx, including the Jacobian kyz
  auto inner_integrand = [&](double kx, double kyz) {
    const double kyz2 = kyz * kyz;
    const double kxa2 = (kx / a) * (kx / a);
    const double Omega2 = a13 * a13 * (kxa2 + kyz2);
    const double Omega0 = std::sqrt(kx * kx + kyz2);
    if (Omega0 == 0.0) return -Q;  // kyz * (-Q / kyz) limit at the origin
    const double Omega = std::sqrt(Omega2);
    return kyz * ((Omega2 - Q) / Omega0 + Omega0 - 2.0 * Omega);
  };

  auto outer_integrand = [&](double kx) {
    const double r2 = 1.0 / (t * t) - (kx / a) * (kx / a);
    if (r2 <= 0.0) return 0.0;
    const double kyz_max = std::sqrt(r2);
    numkit::QuadSpec inner;
    inner.domain = numkit::QuadDomain::finite(0.0, kyz_max);
    inner.rel_tol = model.quad_rel_tol;
    inner.abs_tol = model.quad_abs_tol;
    inner.integrand = [&](double kyz) { return inner_integrand(kx, kyz); };
    return numkit::quad_adaptive(inner);
  };

  numkit::QuadSpec outer;
  outer.domain = numkit::QuadDomain::finite(0.0, kx_max);
  outer.rel_tol = model.quad_rel_tol;
  outer.abs_tol = model.quad_abs_tol;
  outer.integrand = outer_integrand;
  const double plane_integral = numkit::quad_adaptive(outer);

  // axial symmetry (2 pi) and kx -> -kx symmetry (2)
  const double volume_integral = 4.0 * kPi * plane_integral;
  return volume_integral / (8.0 * kPi * kPi * kPi * a13 * a13 * a13 * a13);
}

double rho_creation_closed(const BoxKinematics& kin, double t,
                           double taylor_halfwidth) {
  if (t <= 0.0) throw Error("rho_creation_closed: t must be positive");
  const double a = kin.a;
  if (a <= 0.0) {
    throw Error("rho_creation_closed: scale factor must be positive");
  }
  const double P = pee(a, taylor_halfwidth);
  const double a13 = std::cbrt(a);
  const double a43 = a * a13;
  const double a83 = a43 * a43;     // a^{8/3}
  const double a103 = a * a * a43;  // a^{10/3}
  const double ap = kin.a_prime();
  const double bracket = 9.0 * a * a * a * a - 36.0 * a103 + 18.0 * a83 * P +
                         9.0 * a * a * P - 4.0 * ap * ap * P * t * t * t;
  return bracket / (576.0 * kPi * kPi * a103 * t * t * t * t);
}

double rho_creation_region_analytic(const BoxKinematics& kin, double t,
                                    double taylor_halfwidth) {
  if (t <= 0.0) throw Error("rho_creation_region_analytic: t must be positive");
  const double a = kin.a;
  if (a <= 0.0) {
    throw Error("rho_creation_region_analytic: scale factor must be positive");
  }
  const double P = pee(a, taylor_halfwidth);
  const double a13 = std::cbrt(a);
  const double a23 = a13 * a13;
  const double a43 = a * a13;
  const double a103 = a * a * a43;
  const double ap = kin.a_prime();
  const double bracket = 0.25 * a23 - 1.0 + 0.5 * P / a23 + 0.25 * P / a43 -
                         ap * ap * P * t * t / (9.0 * a103);
  return bracket / (4.0 * kPi * kPi * t * t * t * t);
}

double creation_energy(double L, double L_dot, double t,
                       const BoxParams& params) {
  if (L <= 0.0) throw Error("creation_energy: length must be positive");
  if (t <= 0.0) throw Error("creation_energy: t must be positive");
  const BoxKinematics kin{L / params.l, L_dot / params.l};
  return L * params.l * params.l * rho_creation_closed(kin, t);
}

ElResult el_acceleration(const Lagrangian& lag, double q, double v, double t,
                         double mass_floor) {
  if (!lag) throw Error("el_acceleration: missing Lagrangian");

  const double x[3] = {q, v, t};
  const numkit::ScalarField f = [&lag](std::span<const double> p) {
    return lag(p[0], p[1], p[2]);
  };
  const std::span<const double> xs(x, 3);

  const double lag_q = numkit::fd_partial(f, xs, 0, 1, step_first(q));
  const double lag_vv = numkit::fd_partial(f, xs, 1, 2, step_second(v));

  // mixed partials: differentiate dLag/dv with respect to q and t
  auto lag_v_at = [&](double qq, double tt) {
    const double p[3] = {qq, v, tt};
    const numkit::ScalarField g = [&lag](std::span<const double> s) {
      return lag(s[0], s[1], s[2]);
    };
    return numkit::fd_partial(g, std::span<const double>(p, 3), 1, 1,
                              step_first(v));
  };
  const numkit::ScalarField lag_v_field = [&](std::span<const double> p) {
    return lag_v_at(p[0], p[1]);
  };
  const double xqt[2] = {q, t};
  const std::span<const double> xqts(xqt, 2);
  const double lag_qv =
      numkit::fd_partial(lag_v_field, xqts, 0, 1, step_outer(q));
  const double lag_tv =
      numkit::fd_partial(lag_v_field, xqts, 1, 1, step_outer(t));

  const double floor = std::max(mass_floor, 1e-300);
  if (std::abs(lag_vv) < floor) {
    throw EffectiveMassSingular("el_acceleration: effective mass ~ 0");
  }
  return {(lag_q - v * lag_qv - lag_tv) / lag_vv, lag_vv};
}

double box_accel(const MirrorState& state, double t, const BoxParams& params) {
  const Lagrangian lag = [&params](double L, double V, double tt) {
    return 0.5 * params.m_mirror * V * V + creation_energy(L, V, tt, params);
  };
  return el_acceleration(lag, state.L, state.L_dot, t,
                         1e-12 * params.m_mirror)
      .accel;
}

SimulationRecord simulate_box(const BoxParams& params, const BoxIc& ic,
                              double t_end, const BoxRunOptions& options) {
  if (params.l <= 0.0 || params.m_mirror <= 0.0 || params.t0 <= 0.0) {
    throw Error("simulate_box: l, m and t0 must be positive");
  }
  if (t_end <= params.t0) throw Error("simulate_box: t_end must exceed t0");
  const double L0 = ic.L0 > 0.0 ? ic.L0 : params.a0 * params.l;

  bool mass_singular = false;
  const bool conformal_clock =
      options.time_convention == TimeConvention::conformal;
  numkit::OdeProblem prob;
  prob.dimension = 3;  // L, Ldot, eta
  prob.t0 = params.t0;
  prob.t1 = t_end;
  prob.y0 = {L0, ic.V0, 0.0};
  prob.rhs = [&params, &mass_singular, conformal_clock](
                 double t, std::span<const double> y, std::span<double> dydt) {
    const double inv_a13 = 1.0 / std::cbrt(y[0] / params.l);
    dydt[0] = y[1];
    dydt[2] = inv_a13;
    try {
      if (!conformal_clock) {
        dydt[1] = box_accel({t, y[0], y[1]}, t, params);
      } else {
        // clock tau = t0 + eta(t); its rate at this instant is a^{-1/3}
        const double tau = params.t0 + y[2];
        const Lagrangian lag = [&params, tau, t, inv_a13](double L, double V,
                                                          double tt) {
          return 0.5 * params.m_mirror * V * V +
                 creation_energy(L, V, tau + (tt - t) * inv_a13, params);
        };
        dydt[1] =
            el_acceleration(lag, y[0], y[1], t, 1e-12 * params.m_mirror).accel;
      }
    } catch (const EffectiveMassSingular&) {
      mass_singular = true;
      dydt[1] = std::numeric_limits<double>::quiet_NaN();
    }
  };

  numkit::OdeOptions opt;
  opt.tol = options.tol;
  opt.dense_dt = options.dense_dt;
  opt.throw_on_underflow = false;
  const double length_floor = options.a_floor * params.l;
  opt.stop_event = [length_floor](double, std::span<const double> y) {
    return y[0] - length_floor;
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
      rec.halt = HaltReason::length_floor;
      rec.halt_detail = "box shrank to the scale-factor floor";
      break;
    case numkit::OdeHalt::step_underflow:
      rec.halt = mass_singular ? HaltReason::effective_mass
                               : HaltReason::step_underflow;
      rec.halt_detail = mass_singular ? "effective mass singular"
                                      : "integrator step underflow";
      break;
    case numkit::OdeHalt::max_steps:
      rec.halt = HaltReason::max_steps;
      rec.halt_detail = "step budget exhausted";
      break;
  }

  rec.samples.reserve(sol.points.size());
  for (const auto& pt : sol.points) {
    SimulationSample s;
    s.t = pt.t;
    s.L = pt.y[0];
    s.L_dot = pt.y[1];
    if (!conformal_clock) {
      s.L_ddot = box_accel({s.t, s.L, s.L_dot}, s.t, params);
      s.energy.creation = creation_energy(s.L, s.L_dot, s.t, params);
    } else {
      const double tau = params.t0 + pt.y[2];
      const double inv_a13 = 1.0 / std::cbrt(s.L / params.l);
      const double t_here = s.t;
      const Lagrangian lag = [&params, tau, t_here, inv_a13](
                                 double L, double V, double tt) {
        return 0.5 * params.m_mirror * V * V +
               creation_energy(L, V, tau + (tt - t_here) * inv_a13, params);
      };
      s.L_ddot = el_acceleration(lag, s.L, s.L_dot, s.t,
                                 1e-12 * params.m_mirror)
                     .accel;
      s.energy.creation = creation_energy(s.L, s.L_dot, tau, params);
    }
    s.energy.kinetic = 0.5 * params.m_mirror * s.L_dot * s.L_dot;
    s.energy.total = s.energy.kinetic + s.energy.creation;
    rec.samples.push_back(s);
  }

  // matter-bound ratio along the record plus the budget drift diagnostic
  if (rec.samples.size() >= 3) {
    const double h = rec.samples[1].t - rec.samples[0].t;
    const double g0 = rec.samples[0].energy.total;
    const double g1 = rec.samples[1].energy.total;
    const double g2 = rec.samples[2].energy.total;
    const double edot0 = (-3.0 * g0 + 4.0 * g1 - g2) / (2.0 * h);
    double max_abs_creation = 0.0;
    double drift = 0.0;
    for (auto& s : rec.samples) {
      max_abs_creation = std::max(max_abs_creation, std::abs(s.energy.creation));
      s.energy.matter_bound_ratio =
          max_abs_creation > 0.0
              ? std::abs(edot0) * (s.t - rec.samples[0].t) / max_abs_creation
              : 0.0;
      drift = std::max(drift, std::abs(s.energy.total - g0));
    }
    rec.energy_drift = drift / std::max(std::abs(g0), 1e-300);
  }
  return rec;
}

double matter_energy_bound(const SimulationRecord& record,
                           const BoxParams& params) {
  const auto& s = record.samples;
  if (s.size() < 3) throw Error("matter_energy_bound: need >= 3 samples");
  const double h = s[1].t - s[0].t;
  if (h <= 0.0 || std::abs((s[2].t - s[1].t) - h) > 1e-9 * h) {
    throw Error("matter_energy_bound: record must start on a uniform grid");
  }
  auto g = [&](const SimulationSample& q) {
    return 0.5 * params.m_mirror * q.L_dot * q.L_dot + q.energy.creation;
  };
  const double edot0 = (-3.0 * g(s[0]) + 4.0 * g(s[1]) - g(s[2])) / (2.0 * h);
  return std::abs(edot0) * (s.back().t - s.front().t);
}

double t00_mode_sum(std::span<const ModeState> modes, const BoxKinematics& kin,
                    double l) {
  if (l <= 0.0) throw Error("t00_mode_sum: l must be positive");
  const double Q = q_anisotropy(kin);
  double sum = 0.0;
  for (const auto& mode : modes) {
    const auto om = omega_conformal(mode.k, kin.a);
    sum += std::norm(mode.chi_prime) +
           (om.Omega * om.Omega - Q) * std::norm(mode.chi);
  }
  const double a43 = std::pow(kin.a, 4.0 / 3.0);
  return sum / (2.0 * l * l * l * a43);
}

// ---------------------------------------------------------------------------
// Record-driven mode background.
// ---------------------------------------------------------------------------

namespace {

// monotone-in-t cubic Hermite table for (value, derivative) samples
struct HermiteTable {
  std::vector<double> t, y, dy;

  double eval(double ti, double* deriv = nullptr) const {
    const auto it = std::upper_bound(t.begin(), t.end(), ti);
    std::size_t i = it == t.begin() ? 0 : static_cast<std::size_t>(it - t.begin()) - 1;
    i = std::min(i, t.size() - 2);
    const double h = t[i + 1] - t[i];
    const double s = std::clamp((ti - t[i]) / h, 0.0, 1.0);
    const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    const double h10 = s * (1.0 - s) * (1.0 - s);
    const double h01 = s * s * (3.0 - 2.0 * s);
    const double h11 = s * s * (s - 1.0);
    if (deriv) {
      const double d00 = 6.0 * s * (s - 1.0) / h;
      const double d10 = (1.0 - s) * (1.0 - 3.0 * s);
      const double d01 = -6.0 * s * (s - 1.0) / h;
      const double d11 = s * (3.0 * s - 2.0);
      *deriv = d00 * y[i] + d10 * dy[i] + d01 * y[i + 1] + d11 * dy[i + 1];
    }
    return h00 * y[i] + h10 * h * dy[i] + h01 * y[i + 1] + h11 * h * dy[i + 1];
  }
};

struct RecordBackgroundData {
  HermiteTable a_of_t;    // a(t) with adot as slope
  HermiteTable t_of_eta;  // t(eta) with dt/deta = a^{1/3}
  double kx = 0.0, kyz2 = 0.0;

  BoxKinematics kinematics_at_eta(double eta) const {
    const double t = t_of_eta.eval(eta);
    double adot = 0.0;
    const double a = a_of_t.eval(t, &adot);
    return {a, adot};
  }
};

}  // namespace

modes::ModeBackground background_from_record(const SimulationRecord& record,
                                             const BoxParams& params,
                                             const KVector& k) {
  const auto& s = record.samples;
  if (s.size() < 3) throw Error("background_from_record: need >= 3 samples");
  if (k.kx == 0.0 && k.ky == 0.0 && k.kz == 0.0) {
    throw ZeroFrequency("background_from_record: null mode");
  }

  auto data = std::make_shared<RecordBackgroundData>();
  data->kx = k.kx;
  data->kyz2 = k.ky * k.ky + k.kz * k.kz;

  const std::size_t n = s.size();
  data->a_of_t.t.resize(n);
  data->a_of_t.y.resize(n);
  data->a_of_t.dy.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    data->a_of_t.t[i] = s[i].t;
    data->a_of_t.y[i] = s[i].L / params.l;
    data->a_of_t.dy[i] = s[i].L_dot / params.l;
  }

  // eta_i by Hermite-corrected trapezoid of g = a^{-1/3}
  data->t_of_eta.t.resize(n);
  data->t_of_eta.y.resize(n);
  data->t_of_eta.dy.resize(n);
  double eta = 0.0;
  double g_prev = 0.0, gdot_prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = data->a_of_t.y[i];
    const double adot = data->a_of_t.dy[i];
    const double g = 1.0 / std::cbrt(a);
    const double gdot = -adot / (3.0 * a * std::cbrt(a));
    if (i > 0) {
      const double h = s[i].t - s[i - 1].t;
      eta += 0.5 * h * (g_prev + g) + h * h / 12.0 * (gdot_prev - gdot);
    }
    data->t_of_eta.t[i] = eta;
    data->t_of_eta.y[i] = s[i].t;
    data->t_of_eta.dy[i] = std::cbrt(a);  // dt/deta
    g_prev = g;
    gdot_prev = gdot;
  }

  modes::ModeBackground bg;
  bg.eta0 = 0.0;
  bg.Omega = [data](double eta_i) {
    const auto kin = data->kinematics_at_eta(eta_i);
    const double a = kin.a;
    return std::cbrt(a) *
           std::sqrt(data->kx * data->kx / (a * a) + data->kyz2);
  };
  bg.Omega_prime = [data](double eta_i) {
    const auto kin = data->kinematics_at_eta(eta_i);
    const double a = kin.a;
    const double a13 = std::cbrt(a);
    const double w = std::sqrt(data->kx * data->kx / (a * a) + data->kyz2);
    // dOmega/da = (1/3) a^{-2/3} w - a^{1/3} kx^2 / (a^3 w)
    const double dOmega_da = w / (3.0 * a13 * a13) -
                             a13 * data->kx * data->kx / (a * a * a * w);
    return dOmega_da * kin.a_prime();
  };
  bg.Q = [data](double eta_i) {
    return q_anisotropy(data->kinematics_at_eta(eta_i));
  };
  return bg;
}

}  // namespace dce::box3d
