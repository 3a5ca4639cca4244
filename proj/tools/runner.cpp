#include "runner.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "dce/box3d.hpp"
#include "dce/ring1d.hpp"

namespace dce::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string num(double v) {
  char buf[64];
  const auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

std::string ring_csv(const SimulationRecord& rec) {
  std::string out = "t,L,Ldot,Lddot,E_casimir,E_kinetic_anomaly,E_total\n";
  for (const auto& s : rec.samples) {
    out += num(s.t) + ',' + num(s.L) + ',' + num(s.L_dot) + ',' +
           num(s.L_ddot) + ',' + num(s.energy.casimir) + ',' +
           num(s.energy.kinetic_anomaly) + ',' + num(s.energy.total) + '\n';
  }
  return out;
}

std::string box_csv(const SimulationRecord& rec) {
  std::string out = "t,L,Ldot,Lddot,E_creation,E_kinetic,ratio_matter_bound\n";
  for (const auto& s : rec.samples) {
    out += num(s.t) + ',' + num(s.L) + ',' + num(s.L_dot) + ',' +
           num(s.L_ddot) + ',' + num(s.energy.creation) + ',' +
           num(s.energy.kinetic) + ',' + num(s.energy.matter_bound_ratio) +
           '\n';
  }
  return out;
}

json record_meta(const SimulationRecord& rec) {
  json j;
  j["halt_reason"] = std::string(to_string(rec.halt));
  j["halt_detail"] = rec.halt_detail;
  j["t_end_requested"] = rec.t_end_requested;
  j["t_end_reached"] = rec.samples.empty() ? 0.0 : rec.samples.back().t;
  j["samples"] = rec.samples.size();
  json drifts;
  drifts["energy_drift"] = rec.energy_drift;
  if (rec.el_residual) drifts["el_residual"] = *rec.el_residual;
  if (rec.wronskian_drift) drifts["wronskian_drift"] = *rec.wronskian_drift;
  j["invariant_drifts"] = drifts;
  return j;
}

bool lenz_monotone(const SimulationRecord& rec) {
  double prev = std::abs(rec.samples.front().L_dot);
  for (const auto& s : rec.samples) {
    if (std::abs(s.L_dot) > prev + 1e-9) return false;
    prev = std::abs(s.L_dot);
  }
  return true;
}

std::size_t worker_count(std::size_t jobs) {
  std::size_t n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("DCE_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) n = static_cast<std::size_t>(v);
  }
  return std::max<std::size_t>(1, std::min(n, jobs));
}

}  // namespace

SimulationRecord simulate_config(const RunConfig& c, double v0_override) {
  if (c.model == Model::ring) {
    ring1d::RingParams params{c.ring_M, c.ring_l, c.ring_m_field};
    ring1d::RingRunOptions opts;
    opts.dense_dt = c.dense_dt;
    opts.tol = c.tol;
    auto rec = simulate_ring(params, {c.L0, v0_override}, c.t_end,
                             c.backreaction, opts);
    if (rec.samples.size() >= 3) {
      rec.el_residual = ring1d::el_residual(rec, params);
    }
    return rec;
  }
  // a0 stays the reference normalization (1); ic.L0 sets the actual start
  box3d::BoxParams params{c.box_l, c.box_m, c.box_t0};
  box3d::BoxRunOptions opts;
  opts.dense_dt = c.dense_dt;
  opts.tol = c.tol;
  opts.time_convention = c.box_conformal_clock
                             ? box3d::TimeConvention::conformal
                             : box3d::TimeConvention::cosmic;
  return box3d::simulate_box(params, {c.L0, v0_override}, c.t_end, opts);
}

RunOutput run_command(const RunConfig& c, const std::string& out_dir,
                      bool quiet) {
  RunOutput out;
  try {
    const fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
    fs::create_directories(dir);

    json meta;
    meta["library_version"] = std::string(library_version);
    meta["config"] = json::parse("{}");
    {
      // echo the canonical config, one entry per key
      json cfg;
      std::istringstream lines(emit_config(c));
      std::string line;
      while (std::getline(lines, line)) {
        const auto eq = line.find('=');
        cfg[line.substr(0, eq - 1)] = line.substr(eq + 2);
      }
      meta["config"] = cfg;
    }

    bool truncated = false;
    json runs = json::array();
    auto emit_one = [&](double v0, const std::string& stem) {
      auto rec = simulate_config(c, v0);
      const fs::path csv = dir / (stem + ".csv");
      write_text(csv, c.model == Model::ring ? ring_csv(rec) : box_csv(rec));
      out.csv_files.push_back(csv.string());
      json meta_run = record_meta(rec);
      meta_run["csv"] = csv.filename().string();
      meta_run["V0"] = v0;
      if (c.model == Model::box) meta_run["lenz_monotone"] = lenz_monotone(rec);
      runs.push_back(meta_run);
      truncated |= rec.truncated();
      if (!quiet) {
        std::printf("wrote %s (%zu samples, halt=%s)\n", csv.string().c_str(),
                    rec.samples.size(),
                    std::string(to_string(rec.halt)).c_str());
      }
      out.records.push_back(std::move(rec));
    };

    if (c.model == Model::ring) {
      emit_one(*c.V0, c.out_basename);
    } else if (c.V0) {
      emit_one(*c.V0, c.out_basename);
    } else {
      emit_one(+0.5, c.out_basename + "_expand");
      emit_one(-0.5, c.out_basename + "_contract");
    }

    meta["runs"] = runs;
    const fs::path sidecar = dir / (c.out_basename + ".json");
    write_text(sidecar, meta.dump(2) + "\n");
    out.sidecar = sidecar.string();
    out.exit_code = truncated ? 2 : 0;
  } catch (const std::exception& e) {
    out.exit_code = 1;
    out.message = e.what();
    if (!quiet) std::fprintf(stderr, "error: %s\n", e.what());
  }
  return out;
}

SweepOutput sweep_command(const RunConfig& base, const std::string& axis_key,
                          const std::vector<double>& values,
                          const std::string& out_dir, bool quiet) {
  SweepOutput out;
  if (values.empty()) {
    throw ConfigError(ConfigError::Kind::missing_required, axis_key,
                      "sweep: empty value list");
  }
  {
    // validate the axis key up front (throws on unknown)
    RunConfig probe = base;
    set_numeric_key(probe, axis_key, values.front());
  }

  out.points.resize(values.size());
  std::mutex io_mutex;
  std::size_t next = 0;
  std::mutex next_mutex;

  auto work = [&]() {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard lock(next_mutex);
        if (next >= values.size()) return;
        i = next++;
      }
      SweepPoint& pt = out.points[i];
      pt.value = values[i];
      try {
        RunConfig c = base;
        set_numeric_key(c, axis_key, values[i]);
        c.out_basename = base.out_basename + "_" + std::to_string(i);
        const RunOutput r = run_command(c, out_dir, true);
        pt.exit_code = r.exit_code;
        pt.message = r.message;
        if (r.exit_code != 1 && !r.records.empty()) {
          // summarize the first emitted trajectory of the point
          const auto& rec = r.records.front();
          pt.halt = rec.halt;
          pt.t_final = rec.samples.back().t;
          pt.L_final = rec.samples.back().L;
          pt.V_final = rec.samples.back().L_dot;
          pt.energy_drift = rec.energy_drift;
          pt.lenz_ok = c.model == Model::box ? lenz_monotone(rec) : true;
        }
      } catch (const std::exception& e) {
        pt.exit_code = 1;
        pt.message = e.what();
      }
      if (!quiet) {
        std::lock_guard lock(io_mutex);
        std::printf("sweep %s = %s -> exit %d\n", axis_key.c_str(),
                    num(values[i]).c_str(), pt.exit_code);
      }
    }
  };

  std::vector<std::thread> pool;
  const std::size_t workers = worker_count(values.size());
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& th : pool) th.join();

  std::string summary = "index," + axis_key +
                        ",exit,halt,t_final,L_final,V_final,energy_drift" +
                        (base.model == Model::box ? ",lenz_ok\n" : "\n");
  for (std::size_t i = 0; i < out.points.size(); ++i) {
    const auto& pt = out.points[i];
    summary += std::to_string(i) + ',' + num(pt.value) + ',' +
               std::to_string(pt.exit_code) + ',' +
               std::string(to_string(pt.halt)) + ',' + num(pt.t_final) + ',' +
               num(pt.L_final) + ',' + num(pt.V_final) + ',' +
               num(pt.energy_drift);
    if (base.model == Model::box) summary += pt.lenz_ok ? ",1" : ",0";
    summary += '\n';
  }
  const fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
  fs::create_directories(dir);
  const fs::path summary_path =
      dir / (base.out_basename + "_sweep_summary.csv");
  write_text(summary_path, summary);
  out.summary_csv = summary_path.string();
  return out;
}

}  // namespace dce::cli
