#pragma once

#include <stdexcept>
#include <string>

namespace dce {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The adaptive step controller drove the step size below the representable
/// minimum; usually signals an integrable singularity in the right-hand side.
class StepUnderflow : public Error {
 public:
  StepUnderflow(const std::string& msg, double t, double step)
      : Error(msg), t(t), step(step) {}
  double t;
  double step;
};

/// Adaptive quadrature exhausted its subdivision budget. `achieved` is the
/// error estimate at the point of giving up.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& msg, double achieved)
      : Error(msg), achieved(achieved) {}
  double achieved;
};

/// Requested the frequency of the null mode of a massless field.
class ZeroFrequency : public Error {
 public:
  using Error::Error;
};

/// Ring length at or below the zero of the effective mass.
class CriticalLength : public Error {
 public:
  CriticalLength(const std::string& msg, double length, double critical)
      : Error(msg), length(length), critical(critical) {}
  double length;
  double critical;
};

/// Successive extrapolants in a limit sequence failed to settle.
class ExtrapolationUnstable : public Error {
 public:
  ExtrapolationUnstable(const std::string& msg, double spread)
      : Error(msg), spread(spread) {}
  double spread;
};

/// Effective mass in an Euler-Lagrange assembly is numerically zero.
class EffectiveMassSingular : public Error {
 public:
  using Error::Error;
};

/// Linear system for the low-frequency coefficients is singular.
class SingularSystem : public Error {
 public:
  using Error::Error;
};

/// Configuration parsing / validation failure.
class ConfigError : public Error {
 public:
  enum class Kind { unknown_key, out_of_range, missing_required, malformed };
  ConfigError(Kind kind, const std::string& key, const std::string& msg)
      : Error(msg), kind(kind), key(key) {}
  Kind kind;
  std::string key;
};

}  // namespace dce
