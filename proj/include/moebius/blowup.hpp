#pragma once

// Point-picking of the first concentration and normalized blow-up profiles.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "moebius/curve.hpp"
#include "moebius/diagnostics.hpp"
#include "moebius/energy.hpp"
#include "moebius/flow.hpp"
#include "moebius/gradient.hpp"
#include "moebius/types.hpp"
#include "moebius/zoo.hpp"

namespace moebius {

inline constexpr std::size_t kProfileNodeCap = 4096;

/// Earliest snapshot whose sup over node centers of E^int_{B_r} reaches eps0, with the
/// maximizing node (lowest index on ties). Throws NotReached.
inline ConcentrationEvent pick_concentration(const std::vector<Snapshot>& snapshots, double eps0, double r,
                                             LocalKind kind = LocalKind::Intrinsic) {
  if (!(eps0 > 0.0)) throw Error(ErrorKind::ParamError, "eps0 must be positive");
  if (!(r > 0.0)) throw Error(ErrorKind::ParamError, "r must be positive");
  double best_seen = -std::numeric_limits<double>::infinity();
  for (const auto& snap : snapshots) {
    const LocalizedValue sup = sup_localized(snap.curve, r, kind);
    if (sup.value >= eps0) return {snap.t, snap.step, sup.node, sup.center, r, sup.value, kind};
    best_seen = std::max(best_seen, sup.value);
  }
  throw Error(ErrorKind::NotReached, "no snapshot reaches eps0 = " + format_double(eps0) + " at r = " +
                                         format_double(r) + " (largest value " + format_double(best_seen) + ")");
}

struct WindowDiagnostic {
  double radius = 0.0;
  double energy = 0.0;    // ball energy of B_R(0)
  double max_curv = 0.0;  // over nodes in B_R(0)
  std::size_t nodes = 0;
};

struct BlowupProfile {
  ArcLengthCurve curve;
  ConcentrationEvent event;
  Vec3 x = Vec3::Zero();
  double r = 1.0;
  double t = 0.0;
  double e_int_b1 = 0.0;  // E^int over the closed unit ball around node 0
  double el_residual_sup = 0.0;
  double el_residual_l2 = 0.0;
  std::vector<WindowDiagnostic> windows;  // R = 1, 2, 4
};

struct ProfileOptions {
  std::size_t refine = 1;  // profile nodes = refine * source nodes, capped
  std::size_t cap = kProfileNodeCap;
};

/// r^{-1}(g - x) of an arclength curve, with the index origin rotated to `origin` and
/// n_out arclength nodes.
inline ArcLengthCurve rescale_translate(const ArcLengthCurve& source, std::size_t origin, const Vec3& x, double r,
                                        std::size_t n_out) {
  const std::size_t n = source.size();
  Points p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = (source.nodes[(i + origin) % n] - x) / r;
  if (n_out == n) return make_arclength_curve(source.dim, std::move(p), source.length / r);
  return reparameterize_spectral(source.dim, p, n_out);
}

inline std::vector<WindowDiagnostic> window_diagnostics(const ArcLengthCurve& curve) {
  std::vector<WindowDiagnostic> out;
  for (double radius : {1.0, 2.0, 4.0}) {
    WindowDiagnostic d;
    d.radius = radius;
    d.energy = localized_energy_ball(curve, Vec3::Zero(), radius);
    for (std::size_t i = 0; i < curve.size(); ++i) {
      if (curve.nodes[i].norm() < radius) {
        ++d.nodes;
        d.max_curv = std::max(d.max_curv, curve.curvature[i].norm());
      }
    }
    out.push_back(d);
  }
  return out;
}

/// Throws EventStale when no snapshot matches the event's step.
inline BlowupProfile extract_profile(const std::vector<Snapshot>& snapshots, const ConcentrationEvent& event,
                                     const ProfileOptions& opt = {}) {
  const Snapshot* src = nullptr;
  for (const auto& s : snapshots)
    if (s.step == event.step) src = &s;
  if (src == nullptr) throw Error(ErrorKind::EventStale, "no snapshot for step " + std::to_string(event.step));
  const ArcLengthCurve& c = src->curve;
  if (event.node >= c.size()) throw Error(ErrorKind::EventStale, "event node outside the snapshot");
  if (!(event.radius > 0.0)) throw Error(ErrorKind::ParamError, "event radius must be positive");

  std::size_t n_out = std::min(std::max(c.size(), opt.refine * c.size()), std::max(opt.cap, c.size()));
  n_out -= n_out % 2;

  BlowupProfile prof;
  prof.event = event;
  prof.x = c.nodes[event.node];
  prof.r = event.radius;
  prof.t = event.t;
  prof.curve = rescale_translate(c, event.node, prof.x, prof.r, n_out);
  prof.e_int_b1 = localized_energy_intrinsic(prof.curve, 0, 1.0);
  const ELResidual el = el_residual(prof.curve);
  prof.el_residual_sup = el.sup;
  prof.el_residual_l2 = el.l2;
  prof.windows = window_diagnostics(prof.curve);
  return prof;
}

/// Extraction from a single curve given center node and radius.
inline BlowupProfile extract_profile(const ArcLengthCurve& curve, std::size_t node, double r, double t = 0.0,
                                     const ProfileOptions& opt = {}) {
  ConcentrationEvent ev{t, 0, node, curve.nodes[node], r, 0.0, LocalKind::Intrinsic};
  return extract_profile(std::vector<Snapshot>{{0, t, curve}}, ev, opt);
}

enum class ProfileVerdict { CircleLike, LineLike, Other };

inline const char* to_string(ProfileVerdict v) {
  switch (v) {
    case ProfileVerdict::CircleLike: return "circle-like";
    case ProfileVerdict::LineLike: return "line-like";
    case ProfileVerdict::Other: return "other";
  }
  return "?";
}

inline constexpr double kLineThreshold = 0.02;
inline constexpr double kCircleResidualThreshold = 1e-2;  // el_residual sup / mean|kappa|^3

struct ProfileScores {
  ProfileVerdict verdict = ProfileVerdict::Other;
  double curv_cv = 0.0;
  double residual_rel = 0.0;
  double line_score = 0.0;  // max|kappa| * min(4, window arclength) over nodes in B_2(0)
};

/// Line-like is tested first on the central window (nodes in B_2(0)); circle-like needs
/// curv_cv < 0.02 and a small scale-free EL residual.
inline ProfileScores classify_profile(const BlowupProfile& prof) {
  const ArcLengthCurve& c = prof.curve;
  ProfileScores sc;
  const CurvatureStats st = curvature_stats(c);
  sc.curv_cv = st.cv;
  const double mean3 = st.mean * st.mean * st.mean;
  sc.residual_rel = mean3 > 0.0 ? prof.el_residual_sup / mean3 : std::numeric_limits<double>::infinity();

  double kmax = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c.nodes[i].norm() < 2.0) {
      ++count;
      kmax = std::max(kmax, c.curvature[i].norm());
    }
  }
  // A line crosses B_2(0) in arclength 4; coarse grids would otherwise overcount.
  sc.line_score = kmax * std::min(4.0, static_cast<double>(count) * c.spacing());

  if (count > 0 && sc.line_score < kLineThreshold)
    sc.verdict = ProfileVerdict::LineLike;
  else if (sc.curv_cv < kRoundnessThreshold && sc.residual_rel < kCircleResidualThreshold)
    sc.verdict = ProfileVerdict::CircleLike;
  return sc;
}

inline void write_profile_report(std::ostream& os, const BlowupProfile& prof, const ProfileScores& sc, double eps0) {
  os << "t_j=" << format_double(prof.t) << '\n';
  os << "step=" << prof.event.step << '\n';
  os << "node=" << prof.event.node << '\n';
  os << "r_j=" << format_double(prof.r) << '\n';
  os << "x_j=" << format_double(prof.x.x()) << ',' << format_double(prof.x.y()) << ',' << format_double(prof.x.z())
     << '\n';
  os << "eps0=" << format_double(eps0) << '\n';
  os << "event_value=" << format_double(prof.event.value) << '\n';
  os << "E_int_B1=" << format_double(prof.e_int_b1) << '\n';
  os << "el_residual_sup=" << format_double(prof.el_residual_sup) << '\n';
  os << "el_residual_l2=" << format_double(prof.el_residual_l2) << '\n';
  os << "n=" << prof.curve.size() << '\n';
  os << "length=" << format_double(prof.curve.length) << '\n';
  for (const auto& w : prof.windows) {
    const std::string tag = radius_label(w.radius);
    os << "E_ball_B" << tag << '=' << format_double(w.energy) << '\n';
    os << "max_curv_B" << tag << '=' << format_double(w.max_curv) << '\n';
  }
  os << "curv_cv=" << format_double(sc.curv_cv) << '\n';
  os << "residual_rel=" << format_double(sc.residual_rel) << '\n';
  os << "line_score=" << format_double(sc.line_score) << '\n';
  os << "verdict=" << to_string(sc.verdict) << '\n';
}

// ---------------------------------------------------------------------------
// Synthetic trajectory used by the pipeline tests

/// Hairpins with the strand gap shrinking linearly from gap0 to gap1 over `frames` snapshots.
inline std::vector<Snapshot> hairpin_family(std::size_t n, std::size_t frames, double gap0 = 0.6,
                                           double gap1 = 0.1) {
  std::vector<Snapshot> out;
  for (std::size_t f = 0; f < frames; ++f) {
    const double s = frames > 1 ? static_cast<double>(f) / static_cast<double>(frames - 1) : 0.0;
    out.push_back({f, static_cast<double>(f), zoo::hairpin(n, gap0 + s * (gap1 - gap0))});
  }
  return out;
}

}  // namespace moebius
