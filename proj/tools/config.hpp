#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dce/errors.hpp"

namespace dce::cli {

enum class Model { ring, box };

/// Fully resolved run configuration. parse_config fills every documented
/// default; only ic.V0 stays optional (an unset box V0 selects the paired
/// +-0.5 launch).
struct RunConfig {
  Model model = Model::ring;

  // ring parameters
  double ring_M = 1.0;
  double ring_l = 1.0;
  double ring_m_field = 0.0;
  bool backreaction = true;

  // box parameters
  double box_l = 50.0;
  double box_m = 10.0;
  double box_t0 = 1.0;
  bool box_conformal_clock = false;  ///< sensitivity switch for the R(t) clock

  // initial conditions
  double L0 = 1.0;
  std::optional<double> V0;

  // run controls
  double t_end = 3.0;
  double dense_dt = 1e-3;
  double tol = 2e-13;
  bool deterministic = true;

  std::string out_basename;  // "ring" / "box" by default

  bool operator==(const RunConfig&) const = default;
};

/// Parse a flat key-value document (one `key = value` per line, `#` comments)
/// into a validated configuration with defaults filled in. Throws ConfigError
/// with kind unknown_key / out_of_range / missing_required / malformed.
RunConfig parse_config(const std::string& text);

/// Canonical text form; parse_config(emit_config(c)) == c for every valid c.
std::string emit_config(const RunConfig& config);

RunConfig load_config_file(const std::string& path);

/// Numeric config fields addressable as sweep axes, in deterministic order.
std::vector<std::string> sweep_axis_keys();

/// Set a numeric field by key; throws ConfigError for unknown / non-numeric
/// keys or out-of-range values.
void set_numeric_key(RunConfig& config, const std::string& key, double value);

}  // namespace dce::cli
