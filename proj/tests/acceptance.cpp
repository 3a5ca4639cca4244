// Acceptance suite: every release criterion, one test case each, evaluated
// from a single full verify pass. Prints one line per criterion.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>

#include "verify.hpp"

using dce::cli::CheckResult;
using dce::cli::CheckStatus;
using dce::cli::VerifyLevel;
using dce::cli::VerifyReport;

namespace {

const VerifyReport& report() {
  static const VerifyReport r = dce::cli::verify(VerifyLevel::full);
  return r;
}

const CheckResult& check(const std::string& name) {
  for (const auto& c : report().checks) {
    if (c.name == name) return c;
  }
  static CheckResult missing;
  REQUIRE_MESSAGE(false, "check not found: ", name);
  return missing;
}

void print_line(const CheckResult& c) {
  std::printf("[%s] %-25s computed=%-13.6g ref=%-10.6g tol=%-8.3g (%.2fs) %s\n",
              std::string(to_string(c.status)).c_str(), c.name.c_str(),
              c.computed, c.reference, c.tolerance, c.seconds,
              c.note.c_str());
}

}  // namespace

TEST_CASE("1. rho2 quadrature oracle: (adot/a)^2/(24 pi), mass-independent") {
  const auto& c = check("rho2_quadrature_oracle");
  print_line(c);
  CHECK(c.computed <= 1e-6);
  CHECK(c.seconds < 5.0);
}

TEST_CASE("2. Casimir cutoff oracle: -pi/(6 a^2 l^2) on the (a, l) grid") {
  const auto& c = check("casimir_cutoff_oracle");
  print_line(c);
  CHECK(c.computed <= 1e-4);
  CHECK(c.seconds < 10.0);
}

TEST_CASE("3. Euler-Lagrange residual of the backreaction trajectory") {
  const auto& c = check("ring_el_residual");
  print_line(c);
  CHECK(c.computed <= 1e-4);
  CHECK(c.status == CheckStatus::pass);  // includes the ~4x refinement ratio
}

TEST_CASE("4. ring energy conservation on the default backreaction run") {
  const auto& c = check("ring_energy_conservation");
  print_line(c);
  CHECK(c.computed <= 1e-8);
}

TEST_CASE("5. accelerated collapse for V0 in {-0.3, 0, +0.3}") {
  const auto& c = check("accelerated_collapse");
  print_line(c);
  CHECK(c.computed < 0.0);
  CHECK(c.seconds < 5.0);
}

TEST_CASE("6. Bogoliubov invariants: Wronskians and coefficient norm") {
  const auto& c = check("bogoliubov_invariants");
  print_line(c);
  CHECK(c.computed <= 1.0);  // worst violation as a fraction of its budget
}

TEST_CASE("7. WKB order: amplitude deviation and timescale-doubling ratio") {
  const auto& c = check("wkb_order");
  print_line(c);
  CHECK(c.status == CheckStatus::pass);
  CHECK(c.computed >= 4.0 * 0.85);
  CHECK(c.computed <= 4.0 * 1.15);
}

TEST_CASE("8. creation density vanishes at the isotropic static point") {
  const auto& c = check("creation_null_point");
  print_line(c);
  CHECK(c.computed <= 1e-10);
}

TEST_CASE("9. creation-density oracle grid (agreement or documented-open)") {
  const auto& c = check("creation_oracle_grid");
  print_line(c);
  const bool acceptable = c.status == CheckStatus::pass ||
                          c.status == CheckStatus::documented_open;
  CHECK(acceptable);
  CHECK(c.seconds < 120.0);
}

TEST_CASE("10. EL assembler matches ring_accel on the shared Lagrangian") {
  const auto& c = check("el_assembler_oracle");
  print_line(c);
  CHECK(c.computed <= 1e-6);
}

TEST_CASE("11. quantum Lenz law at l=50, m=10, V0=+-0.5") {
  const auto& c = check("quantum_lenz_law");
  print_line(c);
  CHECK(c.computed <= 1e-9);
  CHECK(c.seconds < 30.0);
}

TEST_CASE("12. matter-energy bound stays negligible") {
  const auto& c = check("matter_energy_bound");
  print_line(c);
  CHECK(c.computed <= 1e-2);
}

TEST_CASE("13. plumbing: round-trip, determinism, exit codes") {
  const auto& c = check("cli_plumbing");
  print_line(c);
  CHECK(c.computed == 0.0);
}
