#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "dce/ring1d.hpp"

namespace dce::cli {

namespace {

using Kind = ConfigError::Kind;

[[noreturn]] void fail(Kind kind, const std::string& key,
                       const std::string& what) {
  throw ConfigError(kind, key, "config: " + key + ": " + what);
}

std::string trim(std::string s) {
  const auto notspace = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
  s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
  return s;
}

double parse_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* begin = value.data();
  const char* end = begin + value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc() || ptr != end) {
    fail(Kind::malformed, key, "expected a number, got '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true") return true;
  if (value == "false") return false;
  fail(Kind::malformed, key, "expected true or false, got '" + value + "'");
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

void check_range(const std::string& key, bool ok, const std::string& range) {
  if (!ok) fail(Kind::out_of_range, key, "allowed range: " + range);
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(Kind::malformed, "line " + std::to_string(lineno),
           "expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      fail(Kind::malformed, "line " + std::to_string(lineno),
           "expected 'key = value'");
    }
    if (!kv.emplace(key, value).second) {
      fail(Kind::malformed, key, "duplicate key");
    }
  }

  const auto model_it = kv.find("model");
  if (model_it == kv.end()) {
    fail(Kind::missing_required, "model", "required (ring or box)");
  }

  RunConfig c;
  if (model_it->second == "ring") {
    c.model = Model::ring;
  } else if (model_it->second == "box") {
    c.model = Model::box;
  } else {
    fail(Kind::out_of_range, "model",
         "allowed range: {ring, box}, got '" + model_it->second + "'");
  }
  kv.erase(model_it);

  // per-model defaults
  if (c.model == Model::ring) {
    c.L0 = 1.0;
    c.V0 = 0.0;
    c.t_end = 3.0;
    c.dense_dt = 1e-3;
    c.tol = 2e-13;
    c.out_basename = "ring";
  } else {
    c.L0 = c.box_l;  // a0 = 1
    c.V0.reset();    // paired +-0.5 launch
    c.t_end = 10.0;
    c.dense_dt = 1e-2;
    c.tol = 1e-10;
    c.out_basename = "box";
  }

  bool l0_given = false;
  auto take = [&kv](const std::string& key) -> std::optional<std::string> {
    const auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };

  if (c.model == Model::ring) {
    if (auto v = take("ring.M")) c.ring_M = parse_double("ring.M", *v);
    if (auto v = take("ring.l")) c.ring_l = parse_double("ring.l", *v);
    if (auto v = take("ring.m_field"))
      c.ring_m_field = parse_double("ring.m_field", *v);
    if (auto v = take("ring.backreaction"))
      c.backreaction = parse_bool("ring.backreaction", *v);
  } else {
    if (auto v = take("box.l")) {
      c.box_l = parse_double("box.l", *v);
      c.L0 = c.box_l;
    }
    if (auto v = take("box.m")) c.box_m = parse_double("box.m", *v);
    if (auto v = take("box.t0")) c.box_t0 = parse_double("box.t0", *v);
    if (auto v = take("box.time_convention")) {
      if (*v == "cosmic") {
        c.box_conformal_clock = false;
      } else if (*v == "conformal") {
        c.box_conformal_clock = true;
      } else {
        fail(Kind::out_of_range, "box.time_convention",
             "allowed range: {cosmic, conformal}");
      }
    }
  }
  if (auto v = take("ic.L0")) {
    c.L0 = parse_double("ic.L0", *v);
    l0_given = true;
  }
  if (auto v = take("ic.V0")) c.V0 = parse_double("ic.V0", *v);
  if (auto v = take("run.t_end")) c.t_end = parse_double("run.t_end", *v);
  if (auto v = take("run.dense_dt"))
    c.dense_dt = parse_double("run.dense_dt", *v);
  if (auto v = take("run.tol")) c.tol = parse_double("run.tol", *v);
  if (auto v = take("run.deterministic"))
    c.deterministic = parse_bool("run.deterministic", *v);
  if (auto v = take("output.basename")) c.out_basename = *v;

  if (!kv.empty()) {
    fail(Kind::unknown_key, kv.begin()->first, "unknown key");
  }

  // validation
  if (c.model == Model::ring) {
    check_range("ring.M", c.ring_M > 0.0, "(0, inf)");
    check_range("ring.l", c.ring_l > 0.0, "(0, inf)");
    check_range("ring.m_field", c.ring_m_field >= 0.0, "[0, inf)");
    const double floor =
        c.backreaction
            ? (1.0 + 1e-6) / (12.0 * std::numbers::pi * c.ring_M)
            : 1e-6;
    check_range("ic.L0", c.L0 > floor,
                "(" + format_double(floor) + ", inf) for this M");
    check_range("run.t_end", c.t_end > 0.0, "(0, inf)");
  } else {
    check_range("box.l", c.box_l > 0.0, "(0, inf)");
    check_range("box.m", c.box_m > 0.0, "(0, inf)");
    check_range("box.t0", c.box_t0 > 0.0, "(0, inf)");
    check_range("ic.L0", c.L0 > 0.0, "(0, inf)");
    check_range("run.t_end", c.t_end > c.box_t0,
                "(" + format_double(c.box_t0) + ", inf), must exceed box.t0");
    if (!l0_given) c.L0 = c.box_l;
  }
  check_range("run.dense_dt", c.dense_dt > 0.0, "(0, inf)");
  check_range("run.tol", c.tol > 0.0, "(0, inf)");
  check_range("run.deterministic", c.deterministic,
              "{true}; runs are always seed-free");
  check_range("output.basename",
              c.out_basename.find('/') == std::string::npos &&
                  !c.out_basename.empty(),
              "non-empty file stem without '/'");
  return c;
}

std::string emit_config(const RunConfig& c) {
  std::ostringstream out;
  out << "model = " << (c.model == Model::ring ? "ring" : "box") << "\n";
  if (c.model == Model::ring) {
    out << "ring.M = " << format_double(c.ring_M) << "\n";
    out << "ring.l = " << format_double(c.ring_l) << "\n";
    out << "ring.m_field = " << format_double(c.ring_m_field) << "\n";
    out << "ring.backreaction = " << (c.backreaction ? "true" : "false")
        << "\n";
  } else {
    out << "box.l = " << format_double(c.box_l) << "\n";
    out << "box.m = " << format_double(c.box_m) << "\n";
    out << "box.t0 = " << format_double(c.box_t0) << "\n";
    out << "box.time_convention = "
        << (c.box_conformal_clock ? "conformal" : "cosmic") << "\n";
  }
  out << "ic.L0 = " << format_double(c.L0) << "\n";
  if (c.V0) out << "ic.V0 = " << format_double(*c.V0) << "\n";
  out << "run.t_end = " << format_double(c.t_end) << "\n";
  out << "run.dense_dt = " << format_double(c.dense_dt) << "\n";
  out << "run.tol = " << format_double(c.tol) << "\n";
  out << "run.deterministic = " << (c.deterministic ? "true" : "false")
      << "\n";
  out << "output.basename = " << c.out_basename << "\n";
  return out.str();
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

namespace {

struct AxisEntry {
  const char* key;
  double RunConfig::* field;
};

constexpr AxisEntry kAxes[] = {
    {"box.l", &RunConfig::box_l},       {"box.m", &RunConfig::box_m},
    {"box.t0", &RunConfig::box_t0},     {"ic.L0", &RunConfig::L0},
    {"ring.M", &RunConfig::ring_M},     {"ring.l", &RunConfig::ring_l},
    {"ring.m_field", &RunConfig::ring_m_field},
    {"run.dense_dt", &RunConfig::dense_dt},
    {"run.t_end", &RunConfig::t_end},   {"run.tol", &RunConfig::tol},
};

}  // namespace

std::vector<std::string> sweep_axis_keys() {
  std::vector<std::string> keys;
  for (const auto& a : kAxes) keys.emplace_back(a.key);
  keys.emplace_back("ic.V0");
  std::sort(keys.begin(), keys.end());
  return keys;
}

void set_numeric_key(RunConfig& config, const std::string& key, double value) {
  if (key == "ic.V0") {
    config.V0 = value;
  } else if (key == "box.l" && config.L0 == config.box_l) {
    // keep a0 = 1 when sweeping the side length with the default L0
    config.box_l = value;
    config.L0 = value;
  } else {
    const auto it =
        std::find_if(std::begin(kAxes), std::end(kAxes),
                     [&key](const AxisEntry& a) { return key == a.key; });
    if (it == std::end(kAxes)) {
      fail(Kind::unknown_key, key, "not a numeric config key");
    }
    config.*(it->field) = value;
  }
  // re-validate through the canonical path
  config = parse_config(emit_config(config));
}

}  // namespace dce::cli
