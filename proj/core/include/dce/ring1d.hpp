#pragma once

#include <span>

#include "dce/numkit.hpp"
#include "dce/types.hpp"

namespace dce::ring1d {

/// Ring model parameters (units hbar = c = 1).
struct RingParams {
  double M = 1.0;        ///< mirror (ring) mass, > 0
  double l = 1.0;        ///< coordinate circumference, > 0
  double m_field = 0.0;  ///< field mass, >= 0

  /// Zero of the effective mass M - 1/(12 pi L).
  double critical_length() const;
};

/// Instantaneous scale-factor data; physical length is L = a * l.
struct RingKinematics {
  double a = 1.0;
  double a_dot = 0.0;
  double a_ddot = 0.0;

  double length(double l) const { return a * l; }
  static RingKinematics from_length(double L, double L_dot, double L_ddot,
                                    double l);
};

/// Mode-frequency bundle at one instant.
struct AdiabaticFrequency {
  double k = 0.0;
  double omega = 0.0;      ///< sqrt(k^2/a^2 + m^2)
  double omega_dot = 0.0;  ///< -(k^2 adot) / (a^3 omega)
  double sigma = 0.0;
  double epsilon = 0.0;    ///< 1/(omega T) diagnostic; 0 when no T given
};

/// sigma(t) = -1/2 (addot/a - adot^2 / (2 a^2))
double sigma_term(const RingKinematics& kin);

/// Throws ZeroFrequency for the k = 0 mode of a massless field.
AdiabaticFrequency mode_frequency(double k, const RingKinematics& kin,
                                  double m, double timescale = 0.0);

/// Second-order adiabatic frequency
///   W = omega - 1/(4 omega) (omegaddot/omega - 3/2 omegadot^2/omega^2
///                            - 2 sigma),
/// with omegaddot evaluated analytically from (a, adot, addot).
double wkb_frequency(double k, const RingKinematics& kin, double m);

/// Second-adiabatic-order spectral energy density at wave number k.
double rho2_integrand(double k, const RingKinematics& kin, double m);

/// Full-line quadrature of rho2_integrand; requires m > 0 (the massless
/// integrand vanishes pointwise and the limit is taken through the integral).
double rho2_quadrature(const RingKinematics& kin, double m,
                       double rel_tol = numkit::defaults::quad_rel_tol);

/// (1/24pi) (adot/a)^2
double rho2_closed(const RingKinematics& kin);

/// Cutoff-regularized Casimir density: for each lambda evaluate the mode sum
/// minus its continuum counterpart, then extrapolate lambda -> 0.
/// lambda_seq must hold >= 3 decreasing positive entries. Throws
/// ExtrapolationUnstable when the extrapolants fail to settle within
/// extrap_rel_tol.
double casimir_density_numeric(const RingKinematics& kin, double l,
                               std::span<const double> lambda_seq,
                               double extrap_rel_tol = 1e-5);

/// -pi / (6 a^2 l^2)
double casimir_density_closed(const RingKinematics& kin, double l);

/// Regularized total field energy H = -(1/24pi) Ldot^2/L - pi/(6L).
double field_energy(double L, double L_dot);

/// Ring acceleration. Without backreaction: Lddot = -pi/(6 M L^2). With
/// backreaction: Lddot = [-pi/(6L^2) - Ldot^2/(24 pi L^2)] / (M - 1/(12 pi L)).
/// Throws CriticalLength when with_backreaction and L <= 1/(12 pi M).
double ring_accel(const MirrorState& state, const RingParams& params,
                  bool with_backreaction);

/// Conserved energy of the ring equations of motion, computed in a factored
/// form that stays well-conditioned near the critical length.
double ring_energy(double L, double L_dot, const RingParams& params,
                   bool with_backreaction);

struct RingIc {
  double L0 = 1.0;
  double V0 = 0.0;
};

struct RingRunOptions {
  double dense_dt = 1e-3;
  double tol = 2e-13;
  double max_step = std::numeric_limits<double>::infinity();
  /// halt thresholds: backreaction runs stop at (1 + halt_margin) * L*,
  /// no-backreaction runs at length_floor
  double halt_margin = 1e-6;
  double length_floor = 1e-6;
};

SimulationRecord simulate_ring(const RingParams& params, const RingIc& ic,
                               double t_end, bool with_backreaction,
                               const RingRunOptions& options = {});

/// Max over interior samples of |d/dt(dLag/dLdot) - dLag/dL| for the
/// backreaction Lagrangian, with the time derivative taken by central
/// differences on the recorded uniform grid. O(h^2) for a true solution.
double el_residual(const SimulationRecord& record, const RingParams& params);

}  // namespace dce::ring1d
