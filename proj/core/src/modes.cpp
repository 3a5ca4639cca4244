#include "dce/modes.hpp"

#include <cmath>

namespace dce::modes {

namespace {

// one-sided interior derivative of the WKB frequency at the start of the
// window (the background may be undefined or kinked before t0)
double wkb_frequency_dot(double k, const RingBackground& bg, double m,
                         double t) {
  const double h = std::pow(std::numeric_limits<double>::epsilon(), 0.25) *
                   std::max(1.0, std::abs(t));
  auto one_sided = [&](double hh) {
    const double w0 = ring1d::wkb_frequency(k, bg(t), m);
    const double w1 = ring1d::wkb_frequency(k, bg(t + hh), m);
    const double w2 = ring1d::wkb_frequency(k, bg(t + 2.0 * hh), m);
    return (-3.0 * w0 + 4.0 * w1 - w2) / (2.0 * hh);
  };
  const double d1 = one_sided(h);
  const double d2 = one_sided(0.5 * h);
  return (4.0 * d2 - d1) / 3.0;
}

}  // namespace

ModeSeries evolve_mode_exact(double k, const RingBackground& bg, double m,
                             double t0, double t1, double dense_dt,
                             double tol) {
  const double W0 = ring1d::wkb_frequency(k, bg(t0), m);
  if (W0 <= 0.0) throw Error("evolve_mode_exact: nonpositive WKB frequency");
  const double Wdot0 = wkb_frequency_dot(k, bg, m, t0);

  const double f0 = 1.0 / std::sqrt(2.0 * W0);
  const Complex fdot0 = Complex(-Wdot0 / (2.0 * W0), -W0) * f0;

  numkit::OdeProblem prob;
  prob.dimension = 4;  // Re f, Im f, Re fdot, Im fdot
  prob.t0 = t0;
  prob.t1 = t1;
  prob.y0 = {f0, 0.0, fdot0.real(), fdot0.imag()};
  prob.rhs = [k, m, &bg](double t, std::span<const double> y,
                         std::span<double> dydt) {
    const ring1d::RingKinematics kin = bg(t);
    const auto fr = ring1d::mode_frequency(k, kin, m);
    const double w2 = fr.omega * fr.omega + fr.sigma;
    dydt[0] = y[2];
    dydt[1] = y[3];
    dydt[2] = -w2 * y[0];
    dydt[3] = -w2 * y[1];
  };

  const auto sol = numkit::integrate_ode(prob, tol, dense_dt);

  ModeSeries series;
  series.samples.reserve(sol.points.size());
  for (const auto& pt : sol.points) {
    ModeSample s;
    s.t = pt.t;
    s.f = Complex(pt.y[0], pt.y[1]);
    s.f_dot = Complex(pt.y[2], pt.y[3]);
    series.samples.push_back(s);
    series.wronskian_drift = std::max(
        series.wronskian_drift, std::abs(wronskian(s.f, s.f_dot) - 1.0));
  }
  return series;
}

Complex wkb_mode_solution(double k, const RingBackground& bg, double m,
                          double t0, double t) {
  const double W = ring1d::wkb_frequency(k, bg(t), m);
  if (W <= 0.0) throw Error("wkb_mode_solution: nonpositive WKB frequency");
  double phase = 0.0;
  if (t != t0) {
    numkit::QuadSpec spec;
    spec.domain = numkit::QuadDomain::finite(t0, t);
    spec.rel_tol = 1e-12;
    spec.abs_tol = 1e-14;
    spec.integrand = [k, m, &bg](double s) {
      return ring1d::wkb_frequency(k, bg(s), m);
    };
    phase = numkit::quad_adaptive(spec);
  }
  return std::polar(1.0 / std::sqrt(2.0 * W), -phase);
}

double adiabaticity(double omega, double omega_dot) {
  if (omega <= 0.0) throw Error("adiabaticity: frequency must be positive");
  return omega_dot / (omega * omega);
}

double adiabaticity(double k, const ring1d::RingKinematics& kin, double m) {
  const auto fr = ring1d::mode_frequency(k, kin, m);
  return adiabaticity(fr.omega, fr.omega_dot);
}

bool nonadiabatic(double parameter, double threshold) {
  return std::abs(parameter) >= threshold;
}

BogoliubovSeries evolve_bogoliubov(const ModeBackground& bg,
                                   const BogoliubovPair& ic, double eta1,
                                   double dense_dt, double tol) {
  if (!bg.Omega || !bg.Omega_prime || !bg.Q) {
    throw Error("evolve_bogoliubov: incomplete background");
  }

  numkit::OdeProblem prob;
  prob.dimension = 5;  // Re a, Im a, Re b, Im b, phase
  prob.t0 = bg.eta0;
  prob.t1 = eta1;
  prob.y0 = {ic.alpha.real(), ic.alpha.imag(), ic.beta.real(), ic.beta.imag(),
             ic.phase_integral};
  prob.rhs = [&bg](double eta, std::span<const double> y,
                   std::span<double> dydt) {
    const double Om = bg.Omega(eta);
    if (Om <= 0.0) {
      throw Error("evolve_bogoliubov: Omega must stay positive");
    }
    const double Omp = bg.Omega_prime(eta);
    const double Q = bg.Q(eta);
    const Complex alpha(y[0], y[1]);
    const Complex beta(y[2], y[3]);
    const Complex rot = std::polar(1.0, 2.0 * y[4]);
    const Complex mix(0.5 * Omp / Om, -0.5 * Q / Om);
    const Complex dalpha =
        mix * beta * rot - Complex(0.0, 0.5 * Q / Om) * alpha;
    const Complex dbeta =
        std::conj(mix) * alpha * std::conj(rot) +
        Complex(0.0, 0.5 * Q / Om) * beta;
    dydt[0] = dalpha.real();
    dydt[1] = dalpha.imag();
    dydt[2] = dbeta.real();
    dydt[3] = dbeta.imag();
    dydt[4] = Om;
  };

  const auto sol = numkit::integrate_ode(prob, tol, dense_dt);

  BogoliubovSeries series;
  series.samples.reserve(sol.points.size());
  for (const auto& pt : sol.points) {
    BogoliubovSample s;
    s.eta = pt.t;
    s.pair.alpha = Complex(pt.y[0], pt.y[1]);
    s.pair.beta = Complex(pt.y[2], pt.y[3]);
    s.pair.phase_integral = pt.y[4];
    series.samples.push_back(s);
    series.wronskian_drift = std::max(series.wronskian_drift,
                                      std::abs(wronskian(s.pair) - 1.0));
  }
  return series;
}

LowFreqCoeffs lowfreq_coeffs(double Omega0, const BogoliubovPair& ic) {
  if (Omega0 == 0.0) {
    throw SingularSystem("lowfreq_coeffs: Omega0 must be nonzero");
  }
  if (Omega0 < 0.0) {
    throw Error("lowfreq_coeffs: Omega0 must be positive");
  }
  // At eta0 the Q integral vanishes:
  //   alpha0 = c1 sqrt(Omega0) + c2 / sqrt(Omega0)
  //   beta0  = c1 sqrt(Omega0) - c2 / sqrt(Omega0)
  const double root = std::sqrt(Omega0);
  LowFreqCoeffs out;
  out.Omega0 = Omega0;
  out.c1 = 0.5 * (ic.alpha + ic.beta) / root;
  out.c2 = 0.5 * (ic.alpha - ic.beta) * root;
  return out;
}

BogoliubovPair lowfreq_alpha_beta(const LowFreqCoeffs& coeffs, double Omega,
                                  double Q_int) {
  if (Omega <= 0.0) {
    throw Error("lowfreq_alpha_beta: Omega must be positive");
  }
  const double root = std::sqrt(Omega);
  const Complex common = coeffs.c1 * root;
  const Complex qterm = coeffs.c1 * Complex(0.0, Q_int / root);
  const Complex inv = coeffs.c2 / root;
  BogoliubovPair out;
  out.alpha = common - qterm + inv;
  out.beta = common + qterm - inv;
  out.phase_integral = 0.0;  // the approximation sets Int Omega d(eta) to 0
  return out;
}

}  // namespace dce::modes
