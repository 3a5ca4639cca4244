#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dce {

inline constexpr std::string_view library_version = "0.1.0";

/// Dynamical state of the moving boundary (ring circumference or the box's
/// moving face) at one instant.
struct MirrorState {
  double t = 0.0;
  double L = 0.0;
  double L_dot = 0.0;
};

enum class HaltReason {
  completed,        ///< reached the requested end time
  critical_length,  ///< ring reached the zero of its effective mass
  length_floor,     ///< length reached the configured lower floor
  step_underflow,   ///< integrator step shrank below the minimum
  effective_mass,   ///< box effective mass became numerically singular
  max_steps,        ///< step budget exhausted
};

inline std::string_view to_string(HaltReason r) {
  switch (r) {
    case HaltReason::completed: return "completed";
    case HaltReason::critical_length: return "critical_length";
    case HaltReason::length_floor: return "length_floor";
    case HaltReason::step_underflow: return "step_underflow";
    case HaltReason::effective_mass: return "effective_mass";
    case HaltReason::max_steps: return "max_steps";
  }
  return "unknown";
}

/// Per-instant energy decomposition. Fields not meaningful for a given model
/// are left at zero.
struct EnergyBreakdown {
  double casimir = 0.0;          ///< static Casimir potential term
  double kinetic_anomaly = 0.0;  ///< velocity-squared field term (ring)
  double creation = 0.0;         ///< particle-creation energy (box)
  double kinetic = 0.0;          ///< mirror kinetic energy
  double matter_bound_ratio = 0.0;
  double total = 0.0;
};

struct SimulationSample {
  double t = 0.0;
  double L = 0.0;
  double L_dot = 0.0;
  double L_ddot = 0.0;
  EnergyBreakdown energy;
};

/// Time series produced by simulate_ring / simulate_box plus run diagnostics.
struct SimulationRecord {
  std::vector<SimulationSample> samples;
  HaltReason halt = HaltReason::completed;
  std::string halt_detail;
  double dense_dt = 0.0;
  double t_end_requested = 0.0;
  /// max over samples of |E(t) - E(0)| / |E(0)| for the model's conserved
  /// (or budget) energy
  double energy_drift = 0.0;
  std::optional<double> el_residual;
  std::optional<double> wronskian_drift;

  bool truncated() const { return halt != HaltReason::completed; }
};

}  // namespace dce
