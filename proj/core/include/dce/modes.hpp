#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "dce/ring1d.hpp"

namespace dce::modes {

using Complex = std::complex<double>;

/// Scale-factor history t -> (a, adot, addot).
using RingBackground = std::function<ring1d::RingKinematics(double)>;

// ---------------------------------------------------------------------------
// Exact mode evolution  fddot + w^2(t) f = 0  and its WKB comparison.
//
// Normalization convention: f = (2W)^{-1/2} exp(-i Int W dt'), which carries
// Wronskian f fdot* - f* fdot = i, i.e. 2 Im(f conj(fdot)) = 1.
// ---------------------------------------------------------------------------

struct ModeSample {
  double t = 0.0;
  Complex f;
  Complex f_dot;
};

struct ModeSeries {
  std::vector<ModeSample> samples;
  double wronskian_drift = 0.0;  ///< max |2 Im(f fdot*) - 1|
};

/// Evolve a single mode from second-order adiabatic initial data at t0:
/// f(t0) = (2W)^{-1/2}, fdot(t0) = (-iW - Wdot/(2W)) f(t0).
ModeSeries evolve_mode_exact(double k, const RingBackground& background,
                             double m, double t0, double t1, double dense_dt,
                             double tol = numkit::defaults::ode_tol);

/// Second-order adiabatic mode (2W(t))^{-1/2} exp(-i Int_{t0}^{t} W dt'),
/// with the phase evaluated by adaptive quadrature.
Complex wkb_mode_solution(double k, const RingBackground& background, double m,
                          double t0, double t);

/// Nonadiabaticity parameter omegadot / omega^2 (or Omega' / Omega^2 when the
/// caller supplies conformal-frame quantities).
double adiabaticity(double omega, double omega_dot);
double adiabaticity(double k, const ring1d::RingKinematics& kin, double m);

/// Flag for strongly amplified modes; the parameter is compared in magnitude.
bool nonadiabatic(double parameter, double threshold = 1.0);

// ---------------------------------------------------------------------------
// Bogoliubov (alpha, beta) evolution.
// ---------------------------------------------------------------------------

struct BogoliubovPair {
  Complex alpha{1.0, 0.0};
  Complex beta{0.0, 0.0};
  double phase_integral = 0.0;  ///< accumulated Int Omega d(eta)
};

/// Conformal-frame background for one mode.
struct ModeBackground {
  std::function<double(double)> Omega;        ///< eta -> Omega > 0
  std::function<double(double)> Omega_prime;  ///< eta -> dOmega/deta
  std::function<double(double)> Q;            ///< eta -> Q >= 0
  double eta0 = 0.0;
};

struct BogoliubovSample {
  double eta = 0.0;
  BogoliubovPair pair;
};

struct BogoliubovSeries {
  std::vector<BogoliubovSample> samples;
  double wronskian_drift = 0.0;  ///< max ||alpha|^2 - |beta|^2 - 1|
};

/// Integrate
///   alpha' = 1/2 (Omega'/Omega - i Q/Omega) beta e^{+2i phase} - i Q/(2 Omega) alpha
///   beta'  = 1/2 (Omega'/Omega + i Q/Omega) alpha e^{-2i phase} + i Q/(2 Omega) beta
/// carrying phase' = Omega alongside.
BogoliubovSeries evolve_bogoliubov(const ModeBackground& background,
                                   const BogoliubovPair& ic, double eta1,
                                   double dense_dt,
                                   double tol = numkit::defaults::ode_tol);

// ---------------------------------------------------------------------------
// Low-frequency analytic solution.
// ---------------------------------------------------------------------------

struct LowFreqCoeffs {
  Complex c1;
  Complex c2;
  double Omega0 = 0.0;
};

/// Solve the 2x2 system fixing (c1, c2) from the pair at eta0 (where the
/// accumulated Q integral vanishes). Vacuum data (1, 0) gives
/// c1 = 1/(2 sqrt(Omega0)), c2 = sqrt(Omega0)/2.
LowFreqCoeffs lowfreq_coeffs(double Omega0, const BogoliubovPair& ic);

/// alpha = c1 (sqrt(Omega) - i Q_int / sqrt(Omega)) + c2 / sqrt(Omega)
/// beta  = c1 (sqrt(Omega) + i Q_int / sqrt(Omega)) - c2 / sqrt(Omega)
BogoliubovPair lowfreq_alpha_beta(const LowFreqCoeffs& coeffs, double Omega,
                                  double Q_int);

// ---------------------------------------------------------------------------
// Scalar diagnostics.
// ---------------------------------------------------------------------------

inline double particle_number(const BogoliubovPair& p) {
  return std::norm(p.beta);
}
inline double wronskian(const BogoliubovPair& p) {
  return std::norm(p.alpha) - std::norm(p.beta);
}
/// 2 Im(f conj(fdot)); equals 1 for the normalization above.
inline double wronskian(Complex f, Complex f_dot) {
  return 2.0 * std::imag(f * std::conj(f_dot));
}

}  // namespace dce::modes
