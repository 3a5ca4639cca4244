#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "config.hpp"
#include "dce/ring1d.hpp"
#include "runner.hpp"
#include "verify.hpp"

using namespace dce;
using namespace dce::cli;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

ConfigError::Kind kind_of(const std::string& text) {
  try {
    (void)parse_config(text);
  } catch (const ConfigError& e) {
    return e.kind;
  }
  FAIL("expected ConfigError");
  return ConfigError::Kind::malformed;
}

}  // namespace

TEST_CASE("parse_config: documented defaults") {
  const auto ring = parse_config("model = ring\n");
  CHECK(ring.model == Model::ring);
  CHECK(ring.ring_M == 1.0);
  CHECK(ring.L0 == 1.0);
  REQUIRE(ring.V0.has_value());
  CHECK(*ring.V0 == 0.0);
  CHECK(ring.backreaction);
  CHECK(ring.t_end == 3.0);
  CHECK(ring.dense_dt == 1e-3);
  CHECK(ring.out_basename == "ring");

  const auto box = parse_config("model = box\n");
  CHECK(box.model == Model::box);
  CHECK(box.box_l == 50.0);
  CHECK(box.box_m == 10.0);
  CHECK(box.box_t0 == 1.0);
  CHECK(box.L0 == 50.0);
  CHECK_FALSE(box.V0.has_value());  // paired +-0.5 launch
  CHECK(box.t_end == 10.0);
  CHECK_FALSE(box.box_conformal_clock);

  const auto conf =
      parse_config("model = box\nbox.time_convention = conformal\n");
  CHECK(conf.box_conformal_clock);
  CHECK(parse_config(emit_config(conf)) == conf);
  CHECK(kind_of("model = box\nbox.time_convention = sidereal\n") ==
        ConfigError::Kind::out_of_range);
}

TEST_CASE("parse_config: comments, overrides, derived L0") {
  const auto c = parse_config(
      "# circumference sweep base\n"
      "model = box   # mirror box\n"
      "box.l = 20\n"
      "run.t_end = 4\n");
  CHECK(c.box_l == 20.0);
  CHECK(c.L0 == 20.0);  // a0 = 1 follows box.l
  CHECK(c.t_end == 4.0);
}

TEST_CASE("parse_config: error kinds") {
  CHECK(kind_of("") == ConfigError::Kind::missing_required);
  CHECK(kind_of("ring.M = 1\n") == ConfigError::Kind::missing_required);
  CHECK(kind_of("model = ring\nring.M = -1\n") ==
        ConfigError::Kind::out_of_range);
  CHECK(kind_of("model = torus\n") == ConfigError::Kind::out_of_range);
  CHECK(kind_of("model = ring\nring.mass = 1\n") ==
        ConfigError::Kind::unknown_key);
  CHECK(kind_of("model = box\nring.M = 1\n") ==
        ConfigError::Kind::unknown_key);
  CHECK(kind_of("model = ring\nmodel = ring\n") ==
        ConfigError::Kind::malformed);
  CHECK(kind_of("model = ring\nrun.tol = fast\n") ==
        ConfigError::Kind::malformed);
  CHECK(kind_of("model = ring\nrun.deterministic = false\n") ==
        ConfigError::Kind::out_of_range);
  // ring below the critical length and box with a bad window
  CHECK(kind_of("model = ring\nic.L0 = 0.01\n") ==
        ConfigError::Kind::out_of_range);
  CHECK(kind_of("model = box\nrun.t_end = 0.5\n") ==
        ConfigError::Kind::out_of_range);

  // the out-of-range report names the key and the allowed range
  try {
    (void)parse_config("model = ring\nring.M = -1\n");
  } catch (const ConfigError& e) {
    CHECK(e.key == "ring.M");
    CHECK(std::string(e.what()).find("(0, inf)") != std::string::npos);
  }
}

TEST_CASE("emit/parse round trip") {
  RunConfig c;
  c.model = Model::box;
  c.box_l = 37.5;
  c.box_m = 4.25;
  c.box_t0 = 0.75;
  c.L0 = 41.0;
  c.V0 = -0.125;
  c.t_end = 9.5;
  c.dense_dt = 0.02;
  c.tol = 3e-10;
  c.out_basename = "box";
  CHECK(parse_config(emit_config(c)) == c);

  c.V0.reset();
  CHECK(parse_config(emit_config(c)) == c);

  RunConfig r;
  r.model = Model::ring;
  r.ring_M = 2.0;
  r.ring_l = 0.7;
  r.ring_m_field = 0.3;
  r.backreaction = false;
  r.L0 = 1.7;
  r.V0 = 0.3;
  r.t_end = 2.0;
  r.dense_dt = 5e-4;
  r.tol = 1e-11;
  r.out_basename = "ring";
  CHECK(parse_config(emit_config(r)) == r);
}

TEST_CASE("sweep axis registry") {
  const auto keys = sweep_axis_keys();
  for (const char* k : {"ring.M", "box.t0", "ic.V0", "run.t_end"}) {
    CHECK(std::find(keys.begin(), keys.end(), k) != keys.end());
  }

  RunConfig c = parse_config("model = box\n");
  set_numeric_key(c, "box.l", 25.0);
  CHECK(c.box_l == 25.0);
  CHECK(c.L0 == 25.0);  // a0 = 1 preserved

  CHECK_THROWS_AS(set_numeric_key(c, "output.basename", 1.0), ConfigError);
  CHECK_THROWS_AS(set_numeric_key(c, "nope", 1.0), ConfigError);
  CHECK_THROWS_AS(set_numeric_key(c, "box.m", -2.0), ConfigError);
}

TEST_CASE("run_command: ring CSV contract") {
  TempDir tmp("dce_test_ring_run");
  RunConfig c = parse_config("model = ring\nrun.t_end = 0.1\n");
  const auto out = run_command(c, tmp.path.string(), true);
  REQUIRE(out.exit_code == 0);
  REQUIRE(out.csv_files.size() == 1);

  const std::string csv = slurp(out.csv_files[0]);
  CHECK(csv.rfind("t,L,Ldot,Lddot,E_casimir,E_kinetic_anomaly,E_total\n", 0) ==
        0);
  CHECK(csv.find("\r") == std::string::npos);  // LF endings only
  const std::size_t rows = std::count(csv.begin(), csv.end(), '\n') - 1;
  CHECK(rows == 101);  // t = 0, 1e-3, ..., 0.1

  // 17-significant-digit round trip: re-reading the first L reproduces 1.0
  std::istringstream lines(csv);
  std::string header, first;
  std::getline(lines, header);
  std::getline(lines, first);
  std::istringstream cells(first);
  std::string cell;
  std::getline(cells, cell, ',');
  CHECK(cell == "0");
  std::getline(cells, cell, ',');
  CHECK(std::stod(cell) == 1.0);

  const auto meta = nlohmann::json::parse(slurp(out.sidecar));
  CHECK(meta["runs"][0]["halt_reason"] == "completed");
  CHECK(meta["config"]["ring.M"] == "1");
  CHECK(meta["library_version"] == std::string(library_version));
  CHECK(meta["runs"][0]["invariant_drifts"].contains("energy_drift"));
  CHECK(meta["runs"][0]["invariant_drifts"].contains("el_residual"));
}

TEST_CASE("run_command: box pair run emits two CSVs") {
  TempDir tmp("dce_test_box_run");
  RunConfig c = parse_config("model = box\nrun.t_end = 1.5\n");
  c.dense_dt = 0.05;
  const auto out = run_command(c, tmp.path.string(), true);
  REQUIRE(out.exit_code == 0);
  REQUIRE(out.csv_files.size() == 2);
  CHECK(out.csv_files[0].find("box_expand.csv") != std::string::npos);
  CHECK(out.csv_files[1].find("box_contract.csv") != std::string::npos);
  for (const auto& f : out.csv_files) {
    CHECK(slurp(f).rfind(
              "t,L,Ldot,Lddot,E_creation,E_kinetic,ratio_matter_bound\n", 0) ==
          0);
  }
  // a single-V0 box config emits one file
  c.V0 = 0.25;
  const auto single = run_command(c, tmp.path.string(), true);
  REQUIRE(single.exit_code == 0);
  CHECK(single.csv_files.size() == 1);
}

TEST_CASE("run_command: reruns are byte-identical") {
  TempDir tmp("dce_test_rerun");
  RunConfig c = parse_config("model = ring\nrun.t_end = 0.05\n");
  const auto a = run_command(c, (tmp.path / "a").string(), true);
  const auto b = run_command(c, (tmp.path / "b").string(), true);
  REQUIRE(a.exit_code == 0);
  REQUIRE(b.exit_code == 0);
  CHECK(slurp(a.csv_files[0]) == slurp(b.csv_files[0]));
  CHECK(slurp(a.sidecar) == slurp(b.sidecar));
}

TEST_CASE("run_command: exit codes") {
  TempDir tmp("dce_test_exit");
  // truncated: the default ring run halts at the critical length before t_end
  RunConfig c = parse_config("model = ring\n");
  CHECK(run_command(c, tmp.path.string(), true).exit_code == 2);
  // error: unwritable output path
  c.t_end = 0.01;
  const auto err = run_command(c, "/proc/not-a-writable-dir", true);
  CHECK(err.exit_code == 1);
  CHECK_FALSE(err.message.empty());
}

TEST_CASE("sweep_command") {
  TempDir tmp("dce_test_sweep");
  RunConfig base = parse_config("model = ring\nrun.t_end = 0.1\n");

  const auto out = sweep_command(base, "ic.V0", {-0.3, 0.0, 0.3},
                                 tmp.path.string(), true);
  CHECK(out.exit_code == 0);
  REQUIRE(out.points.size() == 3);
  for (const auto& pt : out.points) {
    CHECK(pt.exit_code == 0);
    CHECK(pt.halt == HaltReason::completed);
  }
  // summary: header + 3 rows, in axis order
  const std::string summary = slurp(out.summary_csv);
  CHECK(summary.rfind("index,ic.V0,exit,halt,", 0) == 0);
  CHECK(std::count(summary.begin(), summary.end(), '\n') == 4);

  CHECK_THROWS_AS(
      (void)sweep_command(base, "ic.V0", {}, tmp.path.string(), true),
      ConfigError);
  CHECK_THROWS_AS((void)sweep_command(base, "bogus", {1.0},
                                      tmp.path.string(), true),
                  ConfigError);

  // box sweep over the start time carries the per-point Lenz flag
  setenv("DCE_WORKERS", "2", 1);
  RunConfig boxbase = parse_config("model = box\n");
  const auto bs = sweep_command(boxbase, "box.t0", {0.5, 1.0, 2.0},
                                tmp.path.string(), true);
  unsetenv("DCE_WORKERS");
  CHECK(bs.points.size() == 3);
  CHECK(slurp(bs.summary_csv).rfind("index,box.t0") == 0);
  CHECK(slurp(bs.summary_csv).find("lenz_ok") != std::string::npos);
  for (const auto& pt : bs.points) {
    CHECK(pt.exit_code == 0);
    CHECK(pt.lenz_ok);
  }

  // one bad point does not abort the sweep
  const auto mixed = sweep_command(base, "ring.M", {1.0, -1.0, 2.0},
                                   tmp.path.string(), true);
  CHECK(mixed.points.size() == 3);
  CHECK(mixed.points[0].exit_code == 0);
  CHECK(mixed.points[1].exit_code == 1);
  CHECK_FALSE(mixed.points[1].message.empty());
  CHECK(mixed.points[2].exit_code == 0);
}

TEST_CASE("verify report structure (fast level)") {
  const auto report = verify(VerifyLevel::fast);
  REQUIRE(report.checks.size() == 13);
  // every acceptance check appears exactly once
  for (std::size_t i = 0; i < report.checks.size(); ++i) {
    for (std::size_t j = i + 1; j < report.checks.size(); ++j) {
      CHECK(report.checks[i].name != report.checks[j].name);
    }
  }
  int skipped = 0;
  for (const auto& c : report.checks) {
    if (c.status == CheckStatus::skipped) {
      ++skipped;
      CHECK(c.name == "creation_oracle_grid");
    }
  }
  CHECK(skipped == 1);

  const auto j = nlohmann::json::parse(verify_report_json(report));
  CHECK(j["checks"].size() == 13);
  CHECK(j["summary"].contains("fail"));
}

TEST_CASE("verify is sensitive to a tampered Casimir constant") {
  // if the closed form asserted -pi/5 instead of -pi/6, the cutoff oracle
  // would disagree far beyond its 1e-4 tolerance
  const double a = 1.0, l = 1.0;
  const double scale = a * l / (2.0 * kPi);
  const std::vector<double> lambdas = {0.5 * scale, 0.25 * scale,
                                       0.125 * scale, 0.0625 * scale};
  const double numeric =
      ring1d::casimir_density_numeric({a, 0.0, 0.0}, l, lambdas);
  const double tampered = -kPi / 5.0;
  CHECK(std::abs(numeric - tampered) / std::abs(tampered) > 1e-4);
}
