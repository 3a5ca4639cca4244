#include "verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

#include "config.hpp"
#include "dce/box3d.hpp"
#include "dce/modes.hpp"
#include "dce/ring1d.hpp"
#include "runner.hpp"

namespace dce::cli {

namespace {

constexpr double kPi = std::numbers::pi;

double smoothstep(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return x * x * (3.0 - 2.0 * x);
}
double smoothstep_d(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  return 6.0 * x * (1.0 - x);
}

CheckResult make_result(std::string name, std::string anchor, double computed,
                        double reference, double tolerance, bool pass,
                        std::string note = "") {
  CheckResult r;
  r.name = std::move(name);
  r.anchor = std::move(anchor);
  r.computed = computed;
  r.reference = reference;
  r.tolerance = tolerance;
  r.status = pass ? CheckStatus::pass : CheckStatus::fail;
  r.note = std::move(note);
  return r;
}

// 1. second-adiabatic-order density against its closed form, mass ladder
CheckResult check_rho2() {
  double worst = 0.0;
  for (double a : {0.5, 1.0, 2.0}) {
    for (double adot : {-2.0, -1.0, 1.0, 2.0}) {
      const ring1d::RingKinematics kin{a, adot, 0.0};
      const double closed = ring1d::rho2_closed(kin);
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
      for (double m : {0.1, 1.0, 10.0}) {
        const double quad = ring1d::rho2_quadrature(kin, m);
        worst = std::max(worst, std::abs(quad - closed) / std::abs(closed));
        lo = std::min(lo, quad);
        hi = std::max(hi, quad);
      }
      // mass independence across the ladder
      worst = std::max(worst, (hi - lo) / std::abs(closed));
    }
  }
  return make_result("rho2_quadrature_oracle",
                     "integral of the second-order spectral density equals "
                     "(adot/a)^2/(24 pi), independent of the field mass",
                     worst, 0.0, 1e-6, worst <= 1e-6);
}

// 2. cutoff-regularized Casimir density against -pi/(6 a^2 l^2)
CheckResult check_casimir() {
  double worst = 0.0;
  for (double a : {0.5, 1.0, 2.0}) {
    for (double l : {1.0, 2.0 * kPi, 10.0}) {
      const double scale = a * l / (2.0 * kPi);
      const std::vector<double> lambdas = {0.5 * scale, 0.25 * scale,
                                           0.125 * scale, 0.0625 * scale};
      const double got =
          ring1d::casimir_density_numeric({a, 0.0, 0.0}, l, lambdas);
      const double want = ring1d::casimir_density_closed({a, 0.0, 0.0}, l);
      worst = std::max(worst, std::abs(got - want) / std::abs(want));
    }
  }
  return make_result("casimir_cutoff_oracle",
                     "mode sum minus continuum, cutoff removed by "
                     "extrapolation, equals -pi/(6 a^2 l^2)",
                     worst, 0.0, 1e-4, worst <= 1e-4);
}

// 3. discrete Euler-Lagrange residual of a backreaction trajectory
CheckResult check_el_residual() {
  ring1d::RingParams params;
  ring1d::RingRunOptions opts;
  opts.tol = 1e-10;
  opts.max_step = 5e-3;

  opts.dense_dt = 1e-3;
  const auto fine = ring1d::simulate_ring(params, {1.0, 0.0}, 1.0, true, opts);
  const double res = ring1d::el_residual(fine, params);

  opts.dense_dt = 2e-3;
  const auto coarse =
      ring1d::simulate_ring(params, {1.0, 0.0}, 1.0, true, opts);
  const double ratio = ring1d::el_residual(coarse, params) / res;

  const bool pass = res <= 1e-4 && ratio >= 3.0 && ratio <= 5.0;
  char note[96];
  std::snprintf(note, sizeof(note), "refinement ratio %.3f (expected ~4)",
                ratio);
  return make_result("ring_el_residual",
                     "the backreaction equation of motion is the "
                     "Euler-Lagrange equation of the ring action",
                     res, 0.0, 1e-4, pass, note);
}

// 4. energy conservation along the default backreaction run
CheckResult check_energy_conservation() {
  ring1d::RingParams params;
  const auto rec = ring1d::simulate_ring(params, {1.0, 0.0}, 3.0, true);
  return make_result("ring_energy_conservation",
                     "M Ldot^2/2 - Ldot^2/(24 pi L) - pi/(6L) is conserved "
                     "along backreaction trajectories",
                     rec.energy_drift, 0.0, 1e-8, rec.energy_drift <= 1e-8,
                     "halt: " + std::string(to_string(rec.halt)));
}

// 5. backreaction accelerates the collapse for every launch velocity
CheckResult check_accelerated_collapse() {
  ring1d::RingParams params;
  double worst = -std::numeric_limits<double>::infinity();
  for (double v0 : {-0.3, 0.0, 0.3}) {
    const auto with = ring1d::simulate_ring(params, {1.0, v0}, 5.0, true);
    const auto without = ring1d::simulate_ring(params, {1.0, v0}, 5.0, false);
    const std::size_t n =
        std::min(with.samples.size(), without.samples.size());
    for (std::size_t i = 0; i < n; ++i) {
      const auto& a = with.samples[i];
      const auto& b = without.samples[i];
      if (a.t != b.t) break;
      if (a.t <= 0.05) continue;
      worst = std::max(worst, a.L - b.L);
    }
  }
  return make_result("accelerated_collapse",
                     "the trace-anomaly backreaction shrinks the ring faster "
                     "for V0 in {-0.3, 0, +0.3}",
                     worst, 0.0, 0.0, worst < 0.0,
                     "max over samples of L_bkr - L_nobkr (negative = faster "
                     "collapse)");
}

// 6. Bogoliubov invariants: bank Wronskian, analytic pair, coefficients
CheckResult check_bogoliubov_invariants() {
  // (a) mode bank driven by the simulated box trajectory
  box3d::BoxParams params;
  const auto rec = box3d::simulate_box(params, {0.0, 0.5}, 10.0);
  double bank_drift = 0.0;
  for (auto [n1, n2, n3] : {std::array{1, 1, 0}, std::array{0, 2, 1},
                            std::array{3, 0, 0}}) {
    const auto k = box3d::KVector::discrete(n1, n2, n3, params.l);
    auto bg = box3d::background_from_record(rec, params, k);
    auto series = modes::evolve_bogoliubov(bg, {}, 8.0, 0.5, 1e-11);
    bank_drift = std::max(bank_drift, series.wronskian_drift);
  }

  // (b) analytic low-frequency pair, (c) coefficient normalization
  std::mt19937 rng(123);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double pair_viol = 0.0, coeff_viol = 0.0;
  for (int i = 0; i < 500; ++i) {
    modes::LowFreqCoeffs c;
    c.c1 = std::complex<double>(u(rng) + 1.5, u(rng));
    c.c2 = std::complex<double>(0.25, u(rng)) / std::conj(c.c1);
    c.Omega0 = 1.0;
    const auto pair =
        modes::lowfreq_alpha_beta(c, 0.3 + 2.0 * std::abs(u(rng)), u(rng));
    pair_viol = std::max(pair_viol, std::abs(modes::wronskian(pair) - 1.0));

    const double r = 1.5 * std::abs(u(rng));
    modes::BogoliubovPair ic{std::polar(std::cosh(r), u(rng)),
                             std::polar(std::sinh(r), u(rng)), 0.0};
    const auto cc = modes::lowfreq_coeffs(0.5 + std::abs(u(rng)), ic);
    const auto norm = cc.c1 * std::conj(cc.c2) + cc.c2 * std::conj(cc.c1);
    coeff_viol = std::max(coeff_viol,
                          std::abs(norm - std::complex<double>(0.5, 0.0)));
  }

  const double budget = std::max(
      {bank_drift / 1e-9, pair_viol / 1e-12, coeff_viol / 1e-12});
  char note[160];
  std::snprintf(note, sizeof(note),
                "bank drift %.2e (<=1e-9), pair wronskian %.2e (<=1e-12), "
                "coeff norm %.2e (<=1e-12)",
                bank_drift, pair_viol, coeff_viol);
  return make_result("bogoliubov_invariants",
                     "|alpha|^2 - |beta|^2 = 1 along every evolution; "
                     "c1 c2* + c2 c1* = 1/2",
                     budget, 0.0, 1.0, budget <= 1.0, note);
}

// 7. adiabatic modes track the WKB amplitude at second order
CheckResult check_wkb_order() {
  auto amp_dev = [](double T, double* dev2_out, double* adiab_out) {
    const double delta = 0.1, k = 5.0, m = 3.0;
    modes::RingBackground bg = [=](double t) {
      return ring1d::RingKinematics{1.0 + delta * std::sin(t / T),
                                    delta / T * std::cos(t / T),
                                    -delta / (T * T) * std::sin(t / T)};
    };
    auto series = modes::evolve_mode_exact(k, bg, m, 0.0, 2.0 * kPi * T,
                                           2.0 * kPi * T / 400.0, 1e-11);
    double dev0 = 0.0, dev2 = 0.0, adiab = 0.0;
    for (const auto& s : series.samples) {
      const auto kin = bg(s.t);
      const double w = ring1d::mode_frequency(k, kin, m).omega;
      const double W2 = ring1d::wkb_frequency(k, kin, m);
      dev0 = std::max(dev0, std::abs(std::abs(s.f) * std::sqrt(2.0 * w) - 1.0));
      dev2 =
          std::max(dev2, std::abs(std::abs(s.f) * std::sqrt(2.0 * W2) - 1.0));
      adiab = std::max(adiab, std::abs(modes::adiabaticity(k, kin, m)));
    }
    if (dev2_out) *dev2_out = dev2;
    if (adiab_out) *adiab_out = adiab;
    return dev0;
  };
  double dev2 = 0.0, adiab = 0.0;
  const double e1 = amp_dev(10.0, &dev2, &adiab);
  const double e2 = amp_dev(20.0, nullptr, nullptr);
  const double ratio = e1 / e2;
  const bool pass = adiab <= 0.01 && e1 <= 1e-3 && dev2 <= 1e-3 &&
                    ratio >= 3.4 && ratio <= 4.6;
  char note[160];
  std::snprintf(note, sizeof(note),
                "zeroth-order dev %.2e, second-order dev %.2e, doubling "
                "ratio %.3f, max adiabaticity %.2e",
                e1, dev2, ratio, adiab);
  return make_result("wkb_order",
                     "amplitude deviation from the static spectrum is second "
                     "order in the evolution rate (4x per timescale doubling)",
                     ratio, 4.0, 0.6, pass, note);
}

// 8. both creation-density evaluators vanish at the isotropic static point
CheckResult check_creation_null_point() {
  box3d::CreationEnergyModel model;
  double worst = 0.0;
  for (double t : {1.0, 2.0, 5.0}) {
    worst = std::max(worst,
                     std::abs(box3d::rho_creation_closed({1.0, 0.0}, t)));
    worst = std::max(
        worst, std::abs(box3d::rho_creation_quadrature({1.0, 0.0}, t, model)));
  }
  return make_result("creation_null_point",
                     "9a^4 - 36a^{10/3} + 18a^{8/3}P + 9a^2P vanishes at "
                     "a = 1, and the region integrand vanishes pointwise",
                     worst, 0.0, 1e-10, worst <= 1e-10);
}

// 9. creation density: quadrature vs closed form on the (a, a', t) grid
CheckResult check_creation_oracle_grid() {
  box3d::CreationEnergyModel model;
  double worst_closed = 0.0;   // quadrature vs the dynamics closed form
  double worst_region = 0.0;   // quadrature vs the independent reduction
  for (double a : {0.5, 0.8, 1.0, 1.25, 2.0}) {
    for (double ap : {-0.2, -0.1, 0.0, 0.1, 0.2}) {
      for (double t : {1.0, 2.0, 5.0}) {
        const auto kin = box3d::BoxKinematics::from_conformal(a, ap);
        const double quad = box3d::rho_creation_quadrature(kin, t, model);
        const double closed = box3d::rho_creation_closed(kin, t);
        const double region = box3d::rho_creation_region_analytic(kin, t);
        const double scale_c = std::max(std::abs(closed), 1e-12);
        const double scale_r = std::max(std::abs(region), 1e-12);
        worst_closed =
            std::max(worst_closed, std::abs(quad - closed) / scale_c);
        worst_region =
            std::max(worst_region, std::abs(quad - region) / scale_r);
      }
    }
  }
  CheckResult r = make_result(
      "creation_oracle_grid",
      "the nonadiabatic-region integral: adaptive quadrature vs the closed "
      "form used by the dynamics",
      worst_closed, 0.0, 1e-3, worst_closed <= 1e-3);
  char note[200];
  if (worst_closed <= 1e-3) {
    std::snprintf(note, sizeof(note), "quadrature agrees with the closed form "
                                      "(max rel dev %.2e)",
                  worst_closed);
  } else if (worst_region <= 1e-3) {
    // stable, understood disagreement: the quadrature matches the direct
    // analytic reduction of the region integral instead (at a=1 the pair is
    // -a'^2/(36 pi^2 t^2) vs -a'^2/(144 pi^2 t)); the dynamics keeps the
    // published closed form
    r.status = CheckStatus::documented_open;
    std::snprintf(note, sizeof(note),
                  "quadrature matches the independent region reduction to "
                  "%.2e while differing from the dynamics closed form by up "
                  "to %.2e (factor 4 static / 4:t velocity pattern)",
                  worst_region, worst_closed);
  } else {
    std::snprintf(note, sizeof(note),
                  "quadrature matches NEITHER closed form (vs dynamics %.2e, "
                  "vs region reduction %.2e)",
                  worst_closed, worst_region);
  }
  r.note = note;
  return r;
}

// 10. finite-difference EL assembly against the ring acceleration
CheckResult check_el_assembler() {
  ring1d::RingParams rp;
  auto lag = [&rp](double L, double V, double) {
    return 0.5 * rp.M * V * V - V * V / (24.0 * kPi * L) + kPi / (6.0 * L);
  };
  double worst = 0.0;
  for (double L : {0.1, 0.3, 0.5, 1.0, 2.0}) {
    for (double V : {-1.0, -0.3, 0.3, 1.0}) {
      const double got = box3d::el_acceleration(lag, L, V, 0.0).accel;
      const double want = ring1d::ring_accel({0.0, L, V}, rp, true);
      worst = std::max(worst, std::abs(got - want) / std::abs(want));
    }
  }
  return make_result("el_assembler_oracle",
                     "the generic finite-difference Euler-Lagrange assembly "
                     "reproduces the hand-derived ring acceleration",
                     worst, 0.0, 1e-6, worst <= 1e-6);
}

// 11. quantum Lenz law at the published box parameters
CheckResult check_lenz_law() {
  box3d::BoxParams params;
  double worst = 0.0;
  std::string halts;
  for (double v0 : {0.5, -0.5}) {
    const auto rec = box3d::simulate_box(params, {0.0, v0}, 10.0);
    halts += std::string(to_string(rec.halt)) + " ";
    double prev = std::abs(rec.samples.front().L_dot);
    for (const auto& s : rec.samples) {
      worst = std::max(worst, std::abs(s.L_dot) - prev);
      prev = std::abs(s.L_dot);
    }
  }
  return make_result("quantum_lenz_law",
                     "|Ldot| is non-increasing for both launch directions at "
                     "l = 50, m = 10",
                     worst, 0.0, 1e-9, worst <= 1e-9, "halts: " + halts);
}

// 12. matter-energy bound ratio on the published parameters
CheckResult check_matter_bound() {
  box3d::BoxParams params;
  const auto rec = box3d::simulate_box(params, {0.0, 0.5}, 10.0);
  const double bound = box3d::matter_energy_bound(rec, params);
  double emax = 0.0;
  for (const auto& s : rec.samples)
    emax = std::max(emax, std::abs(s.energy.creation));
  const double ratio = bound / emax;
  return make_result(
      "matter_energy_bound",
      "the cumulative matter-energy estimate stays negligible against the "
      "creation energy",
      ratio, 0.0, 1e-2, ratio <= 1e-2,
      "bound = |dE/dt(t0)| * (t_end - t0); ratio against max |E_creation|");
}

// 13. CLI plumbing: round-trip, deterministic reruns, exit codes
CheckResult check_plumbing() {
  int violations = 0;
  std::string note;

  // config round-trip over 1000 random valid configs
  std::mt19937 rng(20240808);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    RunConfig c;
    if (u(rng) < 0.5) {
      c.model = Model::ring;
      c.ring_M = 0.5 + 2.0 * u(rng);
      c.ring_l = 0.5 + 2.0 * u(rng);
      c.ring_m_field = u(rng);
      c.backreaction = u(rng) < 0.5;
      c.L0 = 0.5 + u(rng);
      c.V0 = -0.5 + u(rng);
      c.t_end = 0.5 + 2.0 * u(rng);
      c.dense_dt = 1e-3 * (1.0 + u(rng));
      c.tol = 1e-12 * (1.0 + 9.0 * u(rng));
      c.out_basename = "ring";
    } else {
      c.model = Model::box;
      c.box_l = 10.0 + 90.0 * u(rng);
      c.box_m = 1.0 + 10.0 * u(rng);
      c.box_t0 = 0.5 + u(rng);
      c.L0 = c.box_l * (0.8 + 0.4 * u(rng));
      if (u(rng) < 0.5) c.V0 = -0.5 + u(rng);
      c.t_end = c.box_t0 + 1.0 + 5.0 * u(rng);
      c.dense_dt = 1e-2 * (1.0 + u(rng));
      c.tol = 1e-10 * (1.0 + 9.0 * u(rng));
      c.out_basename = "box";
    }
    try {
      if (!(parse_config(emit_config(c)) == c)) {
        ++violations;
        note += "round-trip mismatch; ";
        break;
      }
    } catch (const std::exception& e) {
      ++violations;
      note += std::string("round-trip threw: ") + e.what() + "; ";
      break;
    }
  }

  namespace fs = std::filesystem;
  const fs::path tmp =
      fs::temp_directory_path() / "dce_verify_plumbing";
  fs::remove_all(tmp);

  // byte-identical reruns of a short ring config
  RunConfig quick;
  quick.model = Model::ring;
  quick.V0 = 0.0;
  quick.t_end = 0.05;
  quick.dense_dt = 1e-3;
  quick.out_basename = "ring";
  const auto r1 = run_command(quick, (tmp / "a").string(), true);
  const auto r2 = run_command(quick, (tmp / "b").string(), true);
  auto slurp = [](const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  if (r1.exit_code != 0 || r2.exit_code != 0) {
    ++violations;
    note += "clean run exit != 0; ";
  } else if (slurp(r1.csv_files[0]) != slurp(r2.csv_files[0])) {
    ++violations;
    note += "rerun not byte-identical; ";
  }

  // exit-code contract: truncated run -> 2, unwritable output -> 1
  RunConfig collapse = quick;
  collapse.t_end = 3.0;  // runs into the critical length
  if (run_command(collapse, (tmp / "c").string(), true).exit_code != 2) {
    ++violations;
    note += "truncated run exit != 2; ";
  }
  if (run_command(quick, "/proc/invalid-output-dir", true).exit_code != 1) {
    ++violations;
    note += "error exit != 1; ";
  }
  fs::remove_all(tmp);

  return make_result("cli_plumbing",
                     "config round-trip, byte-identical reruns, exit-code "
                     "contract",
                     violations, 0.0, 0.0, violations == 0,
                     note.empty() ? "1000 round-trips, rerun and exit paths"
                                  : note);
}

}  // namespace

std::string_view to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "PASS";
    case CheckStatus::fail: return "FAIL";
    case CheckStatus::documented_open: return "OPEN";
    case CheckStatus::skipped: return "SKIP";
  }
  return "?";
}

int VerifyReport::passed() const {
  int n = 0;
  for (const auto& c : checks) n += c.status == CheckStatus::pass;
  return n;
}
int VerifyReport::failed() const {
  int n = 0;
  for (const auto& c : checks) n += c.status == CheckStatus::fail;
  return n;
}
int VerifyReport::open() const {
  int n = 0;
  for (const auto& c : checks) n += c.status == CheckStatus::documented_open;
  return n;
}
int VerifyReport::skipped() const {
  int n = 0;
  for (const auto& c : checks) n += c.status == CheckStatus::skipped;
  return n;
}

VerifyReport verify(VerifyLevel level) {
  VerifyReport report;
  report.level = level;

  using Clock = std::chrono::steady_clock;
  auto timed = [&report](auto&& fn) {
    const auto start = Clock::now();
    CheckResult r = fn();
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    report.checks.push_back(std::move(r));
  };

  timed(check_rho2);
  timed(check_casimir);
  timed(check_el_residual);
  timed(check_energy_conservation);
  timed(check_accelerated_collapse);
  timed(check_bogoliubov_invariants);
  timed(check_wkb_order);
  timed(check_creation_null_point);
  if (level == VerifyLevel::full) {
    timed(check_creation_oracle_grid);
  } else {
    CheckResult r;
    r.name = "creation_oracle_grid";
    r.anchor = "the nonadiabatic-region integral: adaptive quadrature vs the "
               "closed form used by the dynamics";
    r.status = CheckStatus::skipped;
    r.note = "run with --full to evaluate the 5x5x3 quadrature grid";
    report.checks.push_back(std::move(r));
  }
  timed(check_el_assembler);
  timed(check_lenz_law);
  timed(check_matter_bound);
  timed(check_plumbing);
  return report;
}

std::string verify_report_json(const VerifyReport& report) {
  nlohmann::json j;
  j["level"] = report.level == VerifyLevel::full ? "full" : "fast";
  j["library_version"] = std::string(library_version);
  auto checks = nlohmann::json::array();
  for (const auto& c : report.checks) {
    nlohmann::json e;
    e["name"] = c.name;
    e["anchor"] = c.anchor;
    e["computed"] = c.computed;
    e["reference"] = c.reference;
    e["tolerance"] = c.tolerance;
    e["status"] = std::string(to_string(c.status));
    e["note"] = c.note;
    e["seconds"] = c.seconds;
    checks.push_back(e);
  }
  j["checks"] = checks;
  j["summary"] = {{"pass", report.passed()},
                  {"fail", report.failed()},
                  {"documented_open", report.open()},
                  {"skipped", report.skipped()}};
  return j.dump(2) + "\n";
}

int verify_command(VerifyLevel level, const std::string& out_dir, bool quiet) {
  const VerifyReport report = verify(level);
  if (!quiet) {
    for (const auto& c : report.checks) {
      std::printf("[%s] %-25s computed=%-13.6g ref=%-10.6g tol=%-8.3g %s "
                  "(%.2fs)\n",
                  std::string(to_string(c.status)).c_str(), c.name.c_str(),
                  c.computed, c.reference, c.tolerance, c.note.c_str(),
                  c.seconds);
    }
    std::printf("summary: %d pass, %d fail, %d documented-open, %d skipped\n",
                report.passed(), report.failed(), report.open(),
                report.skipped());
  }
  namespace fs = std::filesystem;
  const fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  std::ofstream out(dir / "verify_report.json", std::ios::binary);
  if (out) {
    out << verify_report_json(report);
  } else if (!quiet) {
    std::fprintf(stderr, "warning: cannot write verify_report.json in %s\n",
                 dir.string().c_str());
  }
  return report.all_green() ? 0 : 1;
}

}  // namespace dce::cli
