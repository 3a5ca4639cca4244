#pragma once

#include <string>
#include <vector>

namespace dce::cli {

enum class VerifyLevel { fast, full };

enum class CheckStatus { pass, fail, documented_open, skipped };

std::string_view to_string(CheckStatus s);

struct CheckResult {
  std::string name;
  std::string anchor;     ///< the formula or property the check pins down
  double computed = 0.0;
  double reference = 0.0;
  double tolerance = 0.0;
  CheckStatus status = CheckStatus::pass;
  std::string note;
  double seconds = 0.0;
};

struct VerifyReport {
  VerifyLevel level = VerifyLevel::fast;
  std::vector<CheckResult> checks;

  int passed() const;
  int failed() const;
  int open() const;
  int skipped() const;
  bool all_green() const { return failed() == 0; }
};

/// Run the full oracle suite (fast skips the 3D creation-density quadrature
/// grid). Every acceptance check appears exactly once in the report.
VerifyReport verify(VerifyLevel level);

/// Print one line per check, write <out_dir>/verify_report.json, and return
/// the process exit code (0 iff no check failed).
int verify_command(VerifyLevel level, const std::string& out_dir, bool quiet);

std::string verify_report_json(const VerifyReport& report);

}  // namespace dce::cli
