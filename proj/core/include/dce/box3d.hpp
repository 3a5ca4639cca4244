#pragma once

#include <complex>
#include <functional>

#include "dce/modes.hpp"
#include "dce/numkit.hpp"
#include "dce/types.hpp"

namespace dce::box3d {

/// Mirror-box parameters: transverse coordinate side l, mirror mass m, and
/// the initial time t0 (> 0) at which the scale factor is 1.
struct BoxParams {
  double l = 50.0;
  double m_mirror = 10.0;
  double t0 = 1.0;
  double a0 = 1.0;
};

/// Longitudinal scale factor and its cosmic-time derivative. The
/// conformal-time derivative is derived, never stored, so the relation
/// a' = a^{1/3} adot cannot drift.
struct BoxKinematics {
  double a = 1.0;
  double a_dot = 0.0;

  double a_prime() const { return std::cbrt(a) * a_dot; }
  static BoxKinematics from_conformal(double a, double a_prime) {
    return {a, a_prime / std::cbrt(a)};
  }
};

struct KVector {
  double kx = 0.0;
  double ky = 0.0;
  double kz = 0.0;

  double kyz() const { return std::hypot(ky, kz); }
  double norm() const { return std::hypot(kx, ky, kz); }
  static KVector discrete(int n1, int n2, int n3, double l);
};

/// Tolerances and patch width used by the creation-energy evaluators.
struct CreationEnergyModel {
  BoxParams params;
  double quad_rel_tol = 1e-7;
  double quad_abs_tol = 1e-13;
  double pee_taylor_halfwidth = 1e-4;
};

/// eta(t) = Int_{t0}^{t} a(s)^{-1/3} ds.
double conformal_time_map(const std::function<double(double)>& a_of_t,
                          double t0, double t, double rel_tol = 1e-10);

struct ConformalOmega {
  double Omega = 0.0;   ///< a^{1/3} sqrt(kx^2/a^2 + kyz^2 + m^2)
  double Omega0 = 0.0;  ///< the same mode evaluated at a = 1
};

/// Throws ZeroFrequency for the null mode of a massless field.
ConformalOmega omega_conformal(const KVector& k, double a,
                               double m_field = 0.0);

/// Q = (1/9) (a'/a)^2.
double q_anisotropy(const BoxKinematics& kin);

/// Membership in the nonadiabatic ellipsoid kyz^2 + (kx/a)^2 <= 1/t^2
/// (boundary inclusive).
bool in_region(const KVector& k, double a, double t);

/// Piecewise kernel
///   P(a) = a arccos(a)/sqrt(1-a^2)   (a < 1)
///        = a arccosh(a)/sqrt(a^2-1)  (a > 1)
///        = 1                         (a = 1)
/// with a short Taylor patch across a = 1.
double pee(double a, double taylor_halfwidth = 1e-4);

/// Brute-force oracle: nested adaptive quadrature of
///   (1/(8 pi^3 a^{4/3})) Int_R(t) d^3k [ (Omega^2 - Q)/Omega0 + Omega0 - 2 Omega ]
/// in cylindrical coordinates over the nonadiabatic ellipsoid.
double rho_creation_quadrature(const BoxKinematics& kin, double t,
                               const CreationEnergyModel& model);

/// Closed-form creation density used by the mirror dynamics:
///   (576 pi^2 a^{10/3} t^4)^{-1} [9a^4 - 36a^{10/3} + 18a^{8/3} P
///                                 + 9a^2 P - 4 a'^2 P t^3].
double rho_creation_closed(const BoxKinematics& kin, double t,
                           double taylor_halfwidth = 1e-4);

/// Independent analytic evaluation of the same region integral computed by
/// rho_creation_quadrature (reduction in cylindrical coordinates):
///   (1/(4 pi^2 t^4)) [ a^{2/3}/4 - 1 + P/(2 a^{2/3}) + P/(4 a^{4/3})
///                      - a'^2 P t^2 / (9 a^{10/3}) ].
/// Kept alongside the closed form so verification can classify any
/// disagreement between the two instead of silently preferring one.
double rho_creation_region_analytic(const BoxKinematics& kin, double t,
                                    double taylor_halfwidth = 1e-4);

/// E_creation = L l^2 rho_closed(a = L/l, adot = Ldot/l, t).
double creation_energy(double L, double L_dot, double t,
                       const BoxParams& params);

// ---------------------------------------------------------------------------
// Euler-Lagrange assembly by finite-difference partials.
// ---------------------------------------------------------------------------

using Lagrangian = std::function<double(double q, double v, double t)>;

struct ElResult {
  double accel = 0.0;
  double effective_mass = 0.0;  ///< d^2 Lag / dv^2
};

/// qddot = (dL/dq - v d2L/dqdv - d2L/dtdv) / (d2L/dv2), all partials by
/// Richardson-extrapolated central differences. Throws EffectiveMassSingular
/// when |d2L/dv2| < mass_floor.
ElResult el_acceleration(const Lagrangian& lagrangian, double q, double v,
                         double t, double mass_floor = 0.0);

/// Mirror acceleration from Lag = 1/2 m Ldot^2 + E_creation(L, Ldot, t).
double box_accel(const MirrorState& state, double t, const BoxParams& params);

struct BoxIc {
  double L0 = 0.0;  ///< 0 selects a0 * l
  double V0 = 0.0;
};

/// Clock fed into the nonadiabatic region R(t) and the closed-form creation
/// density. cosmic (default) uses Minkowski time t; conformal uses
/// t0 + eta(t), which coincides with t at t0 and drifts with the conformal
/// map. The switch exists for sensitivity analysis of the convention.
enum class TimeConvention { cosmic, conformal };

struct BoxRunOptions {
  double dense_dt = 1e-2;
  double tol = 1e-10;
  double a_floor = 1e-2;  ///< halt if the box shrinks to a <= a_floor
  TimeConvention time_convention = TimeConvention::cosmic;
};

SimulationRecord simulate_box(const BoxParams& params, const BoxIc& ic,
                              double t_end, const BoxRunOptions& options = {});

/// |d/dt (1/2 m Ldot^2 + E_creation)| at t0, estimated from the record by a
/// one-sided second-order difference, times the record duration. The caller
/// normalizes by max |E_creation| to judge whether the matter component can
/// be neglected.
double matter_energy_bound(const SimulationRecord& record,
                           const BoxParams& params);

// ---------------------------------------------------------------------------
// Mode-sum diagnostic.
// ---------------------------------------------------------------------------

struct ModeState {
  KVector k;
  std::complex<double> chi;
  std::complex<double> chi_prime;
};

/// Bare truncated mode-sum energy density
///   (1/(2 l^3)) a^{-4/3} sum_k [ |chi'|^2 + (Omega^2 - Q) |chi|^2 ];
/// diverges with the truncation and is used only as a small-box diagnostic.
double t00_mode_sum(std::span<const ModeState> modes, const BoxKinematics& kin,
                    double l);

/// Conformal-frame background for one mode driven by a recorded simulation:
/// cubic-Hermite reconstruction of a(t) plus the eta(t) map.
modes::ModeBackground background_from_record(const SimulationRecord& record,
                                             const BoxParams& params,
                                             const KVector& k);

}  // namespace dce::box3d
