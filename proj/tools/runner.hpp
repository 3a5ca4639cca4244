#pragma once

#include <string>
#include <vector>

#include "config.hpp"
#include "dce/types.hpp"

namespace dce::cli {

struct RunOutput {
  int exit_code = 0;  ///< 0 clean, 2 truncated, 1 error
  std::vector<std::string> csv_files;
  std::string sidecar;
  std::string message;  ///< non-empty on error
  std::vector<SimulationRecord> records;  ///< one per emitted CSV
};

/// Execute one configuration: write CSV time series plus a JSON metadata
/// sidecar into out_dir. Never throws; failures land in exit_code/message.
RunOutput run_command(const RunConfig& config, const std::string& out_dir,
                      bool quiet);

struct SweepPoint {
  double value = 0.0;
  int exit_code = 0;
  HaltReason halt = HaltReason::completed;
  double t_final = 0.0;
  double L_final = 0.0;
  double V_final = 0.0;
  double energy_drift = 0.0;
  bool lenz_ok = true;  ///< box runs: |Ldot| non-increasing within 1e-9
  std::string message;
};

struct SweepOutput {
  int exit_code = 0;
  std::vector<SweepPoint> points;
  std::string summary_csv;
};

/// One run per axis value, executed on a bounded worker pool (capped by
/// DCE_WORKERS); a failing point is recorded in the summary, not fatal.
SweepOutput sweep_command(const RunConfig& base, const std::string& axis_key,
                          const std::vector<double>& values,
                          const std::string& out_dir, bool quiet);

/// Simulation dispatch shared by run/sweep (ring or box as configured).
SimulationRecord simulate_config(const RunConfig& config, double v0_override);

}  // namespace dce::cli
