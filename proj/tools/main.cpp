#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "config.hpp"
#include "runner.hpp"
#include "verify.hpp"

namespace {

// "key=v1,v2,..." -> (key, values)
std::pair<std::string, std::vector<double>> parse_axis(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw dce::ConfigError(dce::ConfigError::Kind::malformed, "--axis",
                           "expected key=v1,v2,...");
  }
  std::pair<std::string, std::vector<double>> out;
  out.first = s.substr(0, eq);
  std::string rest = s.substr(eq + 1);
  std::size_t pos = 0;
  while (pos <= rest.size()) {
    const auto comma = rest.find(',', pos);
    const std::string tok = rest.substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (!tok.empty()) {
      try {
        std::size_t used = 0;
        out.second.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw dce::ConfigError(dce::ConfigError::Kind::malformed, "--axis",
                               "bad numeric value '" + tok + "'");
      }
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dce: semiclassical backreaction simulator for a collapsing "
               "ring and a moving-mirror box"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::string out_dir;
  bool quiet = false;
  double tol_override = 0.0;
  app.add_option("--out", out_dir, "output directory (default: .)")
      ->capture_default_str();
  app.add_flag("--quiet", quiet, "suppress progress output");
  app.add_option("--tol", tol_override,
                 "override run.tol from the config file");

  std::string run_config_path;
  auto* run = app.add_subcommand("run", "simulate one configuration");
  run->add_option("config", run_config_path, "config file")->required();

  std::string sweep_config_path, axis_spec;
  auto* sweep = app.add_subcommand("sweep", "run a one-axis parameter sweep");
  sweep->add_option("config", sweep_config_path, "template config file")
      ->required();
  sweep->add_option("--axis", axis_spec, "numeric axis: key=v1,v2,...")
      ->required();

  bool full = false;
  auto* verify = app.add_subcommand(
      "verify", "run the built-in oracle suite and write verify_report.json");
  verify->add_flag("--full", full,
                   "include the 3D creation-density quadrature grid");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      auto config = dce::cli::load_config_file(run_config_path);
      if (tol_override > 0.0) config.tol = tol_override;
      return dce::cli::run_command(config, out_dir, quiet).exit_code;
    }
    if (sweep->parsed()) {
      auto config = dce::cli::load_config_file(sweep_config_path);
      if (tol_override > 0.0) config.tol = tol_override;
      const auto [key, values] = parse_axis(axis_spec);
      const auto result =
          dce::cli::sweep_command(config, key, values, out_dir, quiet);
      if (!quiet) {
        std::printf("sweep summary: %s\n", result.summary_csv.c_str());
      }
      return result.exit_code;
    }
    return dce::cli::verify_command(
        full ? dce::cli::VerifyLevel::full : dce::cli::VerifyLevel::fast,
        out_dir, quiet);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
