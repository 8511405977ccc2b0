#pragma once

// Flat key=value run configuration and trajectory directory IO.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "moebius/blowup.hpp"
#include "moebius/curve.hpp"
#include "moebius/flow.hpp"
#include "moebius/types.hpp"
#include "moebius/zoo.hpp"

namespace moebius {

struct RunConfig {
  FlowConfig flow;
  std::string input;             // curve file; empty means the zoo curve below
  std::string zoo = "ellipse";
  zoo::Params zoo_params;
  std::string output;            // output directory (CLI flag wins)
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_real(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size() || !std::isfinite(out))
    throw Error(ErrorKind::ConfigError, key + ": not a real number: '" + v + "'");
  return out;
}

inline std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
    throw Error(ErrorKind::ConfigError, key + ": not a nonnegative integer: '" + v + "'");
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw Error(ErrorKind::ConfigError, key + ": not a boolean: '" + v + "'");
}

inline std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(key, trim(item)));
  if (out.empty()) throw Error(ErrorKind::ConfigError, key + ": empty list");
  return out;
}

}  // namespace detail

/// Applies one key=value pair. Throws ConfigError on unknown keys or bad values.
inline void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  using namespace detail;
  FlowConfig& f = cfg.flow;
  if (key == "scheme") {
    if (value == "explicit") f.scheme = Scheme::Explicit;
    else if (value == "imex") f.scheme = Scheme::Imex;
    else throw Error(ErrorKind::ConfigError, "scheme must be explicit or imex, got '" + value + "'");
  } else if (key == "n") f.n = parse_uint(key, value);
  else if (key == "dt0") f.dt0 = parse_real(key, value);
  else if (key == "c_dt") f.c_dt = parse_real(key, value);
  else if (key == "dt_max") f.dt_max = parse_real(key, value);
  else if (key == "mu") f.mu = parse_real(key, value);
  else if (key == "t_end") f.t_end = parse_real(key, value);
  else if (key == "eps0") f.eps0 = parse_real(key, value);
  else if (key == "r_list") f.r_list = parse_list(key, value);
  else if (key == "snapshot_every") f.snapshot_every = parse_uint(key, value);
  else if (key == "stop_stationary_tol") f.stop_stationary_tol = parse_real(key, value);
  else if (key == "max_steps") f.max_steps = parse_uint(key, value);
  else if (key == "alarm") f.alarm = parse_bool(key, value);
  else if (key == "local_kind") {
    if (value == "intrinsic") f.local_kind = LocalKind::Intrinsic;
    else if (value == "ball") f.local_kind = LocalKind::BallExtrinsic;
    else throw Error(ErrorKind::ConfigError, "local_kind must be intrinsic or ball, got '" + value + "'");
  } else if (key == "seed") {
    f.seed = parse_uint(key, value);
    cfg.zoo_params.seed = f.seed;
  } else if (key == "input") cfg.input = value;
  else if (key == "output") cfg.output = value;
  else if (key == "zoo") cfg.zoo = value;
  else if (key == "radius") cfg.zoo_params.radius = parse_real(key, value);
  else if (key == "a") cfg.zoo_params.a = parse_real(key, value);
  else if (key == "b") cfg.zoo_params.b = parse_real(key, value);
  else if (key == "amplitude") cfg.zoo_params.amplitude = parse_real(key, value);
  else if (key == "mode") cfg.zoo_params.mode = static_cast<int>(parse_uint(key, value));
  else if (key == "gap") cfg.zoo_params.gap = parse_real(key, value);
  else if (key == "dim") {
    const auto d = parse_uint(key, value);
    if (d != 2 && d != 3) throw Error(ErrorKind::ConfigError, "dim must be 2 or 3");
    cfg.zoo_params.dim = static_cast<int>(d);
  } else throw Error(ErrorKind::ConfigError, "unknown key '" + key + "'");
}

/// Parses '#'-commented key=value lines, then validates the flow parameters.
inline RunConfig parse_run_config(std::istream& is) {
  RunConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::ConfigError, "line " + std::to_string(lineno) + ": expected key=value");
    try {
      apply_setting(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    } catch (const Error& e) {
      throw Error(ErrorKind::ConfigError, "line " + std::to_string(lineno) + ": " + e.detail());
    }
  }
  validate(cfg.flow);
  return cfg;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot open config " + path.string());
  return parse_run_config(in);
}

// ---------------------------------------------------------------------------
// Curve files

inline CurveFile load_curve_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path.string());
  return read_curve(in);
}

/// Arclength curve from a file. Files carrying length= are taken as uniform arclength
/// nodes; otherwise the polygon is resampled to n nodes (its own count when n == 0).
inline ArcLengthCurve load_arclength_curve(const std::filesystem::path& path, std::size_t n = 0) {
  CurveFile f = load_curve_file(path);
  validate(f.samples);
  const std::size_t count = f.samples.vertices.size();
  if (f.length && (n == 0 || n == count) && count % 2 == 0)
    return make_arclength_curve(f.samples.dim, std::move(f.samples.vertices), *f.length);
  std::size_t target = n == 0 ? count + count % 2 : n;
  return resample_arclength(f.samples, target);
}

inline void save_curve(const std::filesystem::path& path, const ArcLengthCurve& curve) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::ConfigError, "cannot write " + path.string());
  write_curve(out, curve);
}

// ---------------------------------------------------------------------------
// Trajectory directories:
//   trajectory.csv, events.csv, snapshots.csv (step,t,file), snapshots/step_<000000>.curve

inline std::string snapshot_name(std::size_t step) {
  std::ostringstream os;
  os << "step_" << std::setw(6) << std::setfill('0') << step << ".curve";
  return os.str();
}

inline void write_trajectory_dir(const std::filesystem::path& dir, const Trajectory& traj) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "snapshots");
  {
    std::ofstream out(dir / "trajectory.csv");
    write_trajectory_csv(out, traj);
  }
  {
    std::ofstream out(dir / "events.csv");
    write_events_csv(out, traj.events);
  }
  std::ofstream index(dir / "snapshots.csv");
  index << "step,t,file\n";
  for (const auto& s : traj.snapshots) {
    const std::string name = snapshot_name(s.step);
    save_curve(dir / "snapshots" / name, s.curve);
    index << s.step << ',' << format_double(s.t) << ",snapshots/" << name << '\n';
  }
}

/// Snapshots listed in <dir>/snapshots.csv, in file order.
inline std::vector<Snapshot> read_snapshots(const std::filesystem::path& dir) {
  std::ifstream index(dir / "snapshots.csv");
  if (!index) throw Error(ErrorKind::ParseError, "no snapshots.csv in " + dir.string());
  std::string line;
  std::getline(index, line);
  if (detail::trim(line) != "step,t,file") throw Error(ErrorKind::ParseError, "snapshots.csv: line 1: bad header");
  std::vector<Snapshot> out;
  std::size_t lineno = 1;
  while (std::getline(index, line)) {
    ++lineno;
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw Error(ErrorKind::ParseError, "snapshots.csv: line " + std::to_string(lineno) + ": expected step,t,file");
    Snapshot s;
    try {
      s.step = detail::parse_uint("step", line.substr(0, c1));
      s.t = detail::parse_real("t", line.substr(c1 + 1, c2 - c1 - 1));
    } catch (const Error& e) {
      throw Error(ErrorKind::ParseError, "snapshots.csv: line " + std::to_string(lineno) + ": " + e.detail());
    }
    s.curve = load_arclength_curve(dir / line.substr(c2 + 1));
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace moebius
