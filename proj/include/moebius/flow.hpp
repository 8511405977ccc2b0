#pragma once

// Time integration of d/dt g = -H g on a fixed node count with arclength
// reparameterization after every step.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "moebius/curve.hpp"
#include "moebius/diagnostics.hpp"
#include "moebius/energy.hpp"
#include "moebius/gradient.hpp"
#include "moebius/types.hpp"

namespace moebius {

enum class Scheme { Explicit, Imex };

inline const char* to_string(Scheme s) { return s == Scheme::Explicit ? "explicit" : "imex"; }

struct FlowConfig {
  Scheme scheme = Scheme::Imex;
  std::size_t n = 256;
  double dt0 = 0.0;     // 0: start at the scheme cap
  double c_dt = 0.025;  // explicit cap c_dt * h^3; forward Euler needs c_dt < 2 / (mu pi^3) ~ 0.031
  double dt_max = 0.0;  // IMEX cap; 0 means h
  double mu = 2.0 * kPi / 3.0;
  double t_end = 1.0;
  double eps0 = kDefaultEps0;
  std::vector<double> r_list{0.5, 0.2, 0.05};
  std::size_t snapshot_every = 10;
  double stop_stationary_tol = 1e-6;
  LocalKind local_kind = LocalKind::Intrinsic;
  bool alarm = true;  // stop when the smallest radius of r_list concentrates
  std::size_t max_steps = 1000000;
  double energy_increase_tol = 1e-8;  // relative
  int grow_after = 10;
  double grow_factor = 1.2;
  std::uint64_t seed = 0;
};

/// Throws ConfigError on invalid parameters.
inline void validate(const FlowConfig& cfg) {
  auto bad = [](const std::string& why) { throw Error(ErrorKind::ConfigError, why); };
  if (cfg.n < kMinNodes || cfg.n % 2 != 0) bad("n must be even and >= 16");
  if (cfg.dt0 < 0.0) bad("dt0 must be >= 0");
  if (!(cfg.c_dt > 0.0)) bad("c_dt must be positive");
  if (cfg.dt_max < 0.0) bad("dt_max must be >= 0");
  if (!(cfg.mu >= 0.0)) bad("mu must be >= 0");
  if (!(cfg.t_end >= 0.0)) bad("t_end must be >= 0");
  if (!(cfg.eps0 > 0.0)) bad("eps0 must be positive");
  if (cfg.snapshot_every == 0) bad("snapshot_every must be positive");
  if (!(cfg.stop_stationary_tol >= 0.0)) bad("stop_stationary_tol must be >= 0");
  if (cfg.r_list.empty()) bad("r_list must not be empty");
  for (std::size_t i = 0; i < cfg.r_list.size(); ++i) {
    if (!(cfg.r_list[i] > 0.0)) bad("r_list entries must be positive");
    if (i > 0 && !(cfg.r_list[i] < cfg.r_list[i - 1])) bad("r_list must be strictly decreasing");
  }
  if (!(cfg.grow_factor >= 1.0)) bad("grow_factor must be >= 1");
}

struct FlowState {
  double t = 0.0;
  ArcLengthCurve curve;
  double dt = 0.0;
  std::size_t step = 0;
  double energy = 0.0;
  GradientField gradient;
};

inline FlowState make_state(ArcLengthCurve curve, double t = 0.0, std::size_t step = 0) {
  FlowState s;
  s.t = t;
  s.step = step;
  s.energy = mobius_energy(curve).total;
  s.gradient = mobius_gradient(curve, false);
  s.curve = std::move(curve);
  return s;
}

/// Explicit cap c_dt h^3.
inline double explicit_dt_cap(const ArcLengthCurve& curve, double c_dt) {
  const double h = curve.spacing();
  return c_dt * h * h * h;
}

namespace detail {

inline FlowState finish_step(const FlowState& state, Points moved, double dt, double energy_tol) {
  const ArcLengthCurve& old = state.curve;
  const double tol = kEmbedTolRelative * diameter(moved);
  if (min_nonadjacent_segment_distance(moved, tol) <= tol)
    throw StepRejected("step produced a self-intersection", 0.5 * dt);
  ArcLengthCurve next;
  FlowState out;
  try {
    next = reparameterize_spectral(old.dim, moved, old.size());
    out = make_state(std::move(next), state.t + dt, state.step + 1);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::NonEmbedded || e.kind() == ErrorKind::DegenerateCurve)
      throw StepRejected(std::string("step broke the curve: ") + e.what(), 0.5 * dt);
    throw;
  }
  if (out.energy > state.energy + energy_tol * std::abs(state.energy))
    throw StepRejected("energy increased from " + std::to_string(state.energy) + " to " + std::to_string(out.energy),
                       0.5 * dt);
  out.dt = dt;
  return out;
}

}  // namespace detail

/// g <- g - dt H, projected normal, then arclength resampling to the same N.
/// Throws StepRejected (suggesting dt/2) on energy increase or self-contact.
inline FlowState step_explicit(const FlowState& state, double dt, double energy_tol = 1e-8) {
  if (!(dt >= 0.0)) throw Error(ErrorKind::ParamError, "dt must be >= 0");
  if (dt == 0.0) return state;
  const ArcLengthCurve& c = state.curve;
  Points moved = c.nodes;
  for (std::size_t i = 0; i < moved.size(); ++i)
    moved[i] -= dt * normal_part(state.gradient.values[i], c.tangent[i]);
  return detail::finish_step(state, std::move(moved), dt, energy_tol);
}

/// Semi-implicit step with the stabilizer L = mu |xi|^3 treated implicitly:
///   g_hat' = (g_hat - dt (H - L g)_hat) / (1 + dt mu |xi|^3)  =  g_hat - dt H_hat / (1 + dt mu |xi|^3).
/// The filtered update is projected normal before it is applied.
inline FlowState step_imex(const FlowState& state, double dt, double mu, double energy_tol = 1e-8) {
  if (!(dt >= 0.0)) throw Error(ErrorKind::ParamError, "dt must be >= 0");
  if (dt == 0.0) return state;
  const ArcLengthCurve& c = state.curve;
  const std::size_t n = c.size();
  const double l = c.length;
  auto filter = [&](std::size_t k) {
    const double xi = 2.0 * kPi * static_cast<double>(k) / l;
    return dt / (1.0 + dt * mu * xi * xi * xi);
  };
  Points update(n, Vec3::Zero());
  for (int comp = 0; comp < 3; ++comp) {
    std::vector<double> hc(n);
    for (std::size_t i = 0; i < n; ++i) hc[i] = state.gradient.values[i][comp];
    const auto filtered = fourier::apply_multiplier(hc, filter);
    for (std::size_t i = 0; i < n; ++i) update[i][comp] = filtered[i];
  }
  Points moved = c.nodes;
  for (std::size_t i = 0; i < n; ++i) moved[i] -= normal_part(update[i], c.tangent[i]);
  return detail::finish_step(state, std::move(moved), dt, energy_tol);
}

// ---------------------------------------------------------------------------
// Trajectories

struct ConcentrationEvent {
  double t = 0.0;
  std::size_t step = 0;
  std::size_t node = 0;
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
  double value = 0.0;
  LocalKind kind = LocalKind::Intrinsic;
};

struct TrajectoryRecord {
  std::size_t step = 0;
  double t = 0.0;
  double energy = 0.0;
  double length = 0.0;
  double distortion = 1.0;
  double max_curv = 0.0;
  double dt = 0.0;
  std::vector<double> sup_local;  // one per radius of r_list
};

struct Snapshot {
  std::size_t step = 0;
  double t = 0.0;
  ArcLengthCurve curve;
};

enum class StopReason { EndTime, Stationary, SingularityAlarm, MaxSteps, NumericalFailure };

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::EndTime: return "end-time";
    case StopReason::Stationary: return "stationary";
    case StopReason::SingularityAlarm: return "singularity-alarm";
    case StopReason::MaxSteps: return "max-steps";
    case StopReason::NumericalFailure: return "numerical-failure";
  }
  return "?";
}

struct Trajectory {
  std::vector<double> r_list;
  std::vector<TrajectoryRecord> records;
  std::vector<Snapshot> snapshots;
  std::vector<ConcentrationEvent> events;
  StopReason stop = StopReason::EndTime;
  std::size_t rejected_steps = 0;
  std::string message;
};

/// run_flow failed; the partial trajectory (ending with the last good state) is attached.
class FlowFailure : public Error {
 public:
  FlowFailure(ErrorKind kind, const std::string& what, Trajectory partial)
      : Error(kind, what), partial_(std::move(partial)) {}
  const Trajectory& partial() const { return partial_; }

 private:
  Trajectory partial_;
};

/// For every snapshot and radius, emits an event when the sup-localized energy reaches eps0.
inline std::vector<ConcentrationEvent> detect_singularity(const std::vector<Snapshot>& window, double eps0,
                                                          const std::vector<double>& r_list,
                                                          LocalKind kind = LocalKind::Intrinsic) {
  std::vector<ConcentrationEvent> events;
  for (const auto& snap : window) {
    for (double r : r_list) {
      const LocalizedValue sup = sup_localized(snap.curve, r, kind);
      if (sup.value >= eps0) events.push_back({snap.t, snap.step, sup.node, sup.center, r, sup.value, kind});
    }
  }
  return events;
}

inline TrajectoryRecord make_record(const FlowState& s, const FlowConfig& cfg) {
  TrajectoryRecord r;
  r.step = s.step;
  r.t = s.t;
  r.energy = s.energy;
  r.length = s.curve.length;
  r.distortion = distortion(s.curve);
  r.max_curv = curvature_stats(s.curve).max;
  r.dt = s.dt;
  for (double rad : cfg.r_list) r.sup_local.push_back(sup_localized(s.curve, rad, cfg.local_kind).value);
  return r;
}

inline double dt_cap(const FlowState& s, const FlowConfig& cfg) {
  if (cfg.scheme == Scheme::Explicit) return explicit_dt_cap(s.curve, cfg.c_dt);
  return cfg.dt_max > 0.0 ? cfg.dt_max : s.curve.spacing();
}

inline FlowState take_step(const FlowState& s, double dt, const FlowConfig& cfg) {
  return cfg.scheme == Scheme::Explicit ? step_explicit(s, dt, cfg.energy_increase_tol)
                                        : step_imex(s, dt, cfg.mu, cfg.energy_increase_tol);
}

/// Integrates until t_end, stationarity (sup |H| < stop_stationary_tol) or a concentration
/// alarm at the smallest radius. Rejected steps halve dt; after `grow_after` accepted
/// steps dt grows by `grow_factor` up to the scheme cap.
inline Trajectory run_flow(const ArcLengthCurve& initial, const FlowConfig& cfg) {
  validate(cfg);
  Trajectory traj;
  traj.r_list = cfg.r_list;
  ArcLengthCurve start = initial.size() == cfg.n ? initial : resample_arclength(initial, cfg.n);
  FlowState state = make_state(std::move(start));
  double dt = dt_cap(state, cfg);
  if (cfg.dt0 > 0.0) dt = std::min(dt, cfg.dt0);
  state.dt = 0.0;

  auto snapshot = [&](const FlowState& s) {
    if (!traj.snapshots.empty() && traj.snapshots.back().step == s.step) return std::vector<ConcentrationEvent>{};
    traj.snapshots.push_back({s.step, s.t, s.curve});
    auto ev = detect_singularity({traj.snapshots.back()}, cfg.eps0, cfg.r_list, cfg.local_kind);
    traj.events.insert(traj.events.end(), ev.begin(), ev.end());
    return ev;
  };
  auto alarmed = [&](const std::vector<ConcentrationEvent>& ev) {
    if (!cfg.alarm) return false;
    for (const auto& e : ev)
      if (e.radius == cfg.r_list.back()) return true;
    return false;
  };

  traj.records.push_back(make_record(state, cfg));
  if (alarmed(snapshot(state))) {
    traj.stop = StopReason::SingularityAlarm;
    return traj;
  }
  int accepted_since_growth = 0;
  const double t_eps = 1e-12 * std::max(1.0, cfg.t_end);
  while (true) {
    if (state.t >= cfg.t_end - t_eps) {
      traj.stop = StopReason::EndTime;
      break;
    }
    if (state.gradient.sup_norm() < cfg.stop_stationary_tol) {
      traj.stop = StopReason::Stationary;
      break;
    }
    if (state.step >= cfg.max_steps) {
      traj.stop = StopReason::MaxSteps;
      break;
    }
    const double cap = dt_cap(state, cfg);
    dt = std::min(dt, cap);
    const double remaining = cfg.t_end - state.t;
    const double attempt = std::min(dt, remaining);
    try {
      state = take_step(state, attempt, cfg);
    } catch (const StepRejected& rej) {
      ++traj.rejected_steps;
      dt = rej.suggested_dt();
      accepted_since_growth = 0;
      if (dt < 1e-12 * cap) {
        snapshot(state);
        traj.stop = StopReason::NumericalFailure;
        traj.message = rej.what();
        throw FlowFailure(ErrorKind::NonEmbedded, std::string("step size collapsed: ") + rej.what(), std::move(traj));
      }
      continue;
    }
    traj.records.push_back(make_record(state, cfg));
    if (++accepted_since_growth >= cfg.grow_after) {
      dt = std::min(dt * cfg.grow_factor, dt_cap(state, cfg));
      accepted_since_growth = 0;
    }
    if (state.step % cfg.snapshot_every == 0 && alarmed(snapshot(state))) {
      traj.stop = StopReason::SingularityAlarm;
      return traj;
    }
  }
  if (alarmed(snapshot(state))) traj.stop = StopReason::SingularityAlarm;
  return traj;
}

// ---------------------------------------------------------------------------
// Output

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string radius_label(double r) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", r);
  return buf;
}

inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,energy,length,distortion,max_curv,dt";
  for (double r : traj.r_list) os << ",sup_local_r" << radius_label(r);
  os << '\n';
  for (const auto& rec : traj.records) {
    os << format_double(rec.t) << ',' << format_double(rec.energy) << ',' << format_double(rec.length) << ','
       << format_double(rec.distortion) << ',' << format_double(rec.max_curv) << ',' << format_double(rec.dt);
    for (double v : rec.sup_local) os << ',' << format_double(v);
    os << '\n';
  }
}

inline void write_events_csv(std::ostream& os, const std::vector<ConcentrationEvent>& events) {
  os << "t,step,node,x,y,z,r,value,kind\n";
  for (const auto& e : events) {
    os << format_double(e.t) << ',' << e.step << ',' << e.node << ',' << format_double(e.center.x()) << ','
       << format_double(e.center.y()) << ',' << format_double(e.center.z()) << ',' << format_double(e.radius) << ','
       << format_double(e.value) << ',' << to_string(e.kind) << '\n';
  }
}

}  // namespace moebius
