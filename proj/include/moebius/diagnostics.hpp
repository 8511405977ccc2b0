#pragma once

// Scalar health quantities of arclength sampled curves.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "moebius/curve.hpp"
#include "moebius/energy.hpp"
#include "moebius/fourier.hpp"
#include "moebius/parallel.hpp"
#include "moebius/types.hpp"

namespace moebius {

inline constexpr double kRoundnessThreshold = 0.02;

/// Gromov distortion max_{i != j} d(i, j) / |g_i - g_j| over node pairs.
inline double distortion(const ArcLengthCurve& curve) {
  const std::size_t n = curve.size();
  const double collapse = kChordCollapseRelative * curve.length;
  std::vector<double> rows(n, 1.0);
  parallel_for(n, [&](std::size_t i) {
    double best = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double chord = (curve.nodes[i] - curve.nodes[j]).norm();
      if (chord < collapse) throw Error(ErrorKind::NonEmbedded, "chord collapse in distortion");
      best = std::max(best, geodesic_distance(curve, i, j) / chord);
    }
    rows[i] = best;
  });
  return *std::max_element(rows.begin(), rows.end());
}

/// The bi-Lipschitz bound 18 exp(E / 4).
inline double distortion_bound(double energy) { return 18.0 * std::exp(energy / 4.0); }

/// Localized W^{3/2,2} quantity of the tangent:
///   sup_x  int_{|u - x| <= window} int_{|w| <= l/2} |T(u+w) - T(u)|^2 / w^2 dw du.
/// The w = 0 node uses the limit |kappa(u)|^2.
inline double m_threehalves(const ArcLengthCurve& curve, double window = 1.0) {
  const std::size_t n = curve.size();
  const double h = curve.spacing();
  if (!(window > 0.0)) throw Error(ErrorKind::ParamError, "window must be positive");
  std::vector<double> inner(n);
  parallel_for(n, [&](std::size_t i) {
    double acc = curve.curvature[i].squaredNorm();
    for (std::size_t j = 1; j <= n / 2; ++j) {
      const double w = static_cast<double>(j) * h;
      const double weight = j == n / 2 ? 0.5 : 1.0;
      acc += weight * ((curve.tangent[(i + j) % n] - curve.tangent[i]).squaredNorm() +
                       (curve.tangent[(i + n - j) % n] - curve.tangent[i]).squaredNorm()) /
             (w * w);
    }
    inner[i] = acc * h;
  });
  // Outer integral over [x - W, x + W]: trapezoid on the whole nodes, linear
  // interpolation of the inner values on the fractional cells at both ends.
  const double half = std::min(window, 0.5 * curve.length) / h;
  const bool full = 2.0 * half >= static_cast<double>(n) - 1e-9;
  const std::size_t m = static_cast<std::size_t>(std::floor(half + 1e-12));
  const double f = std::clamp(half - static_cast<double>(m), 0.0, 1.0);
  const long nl = static_cast<long>(n);
  auto at = [&](std::size_t x, long o) { return inner[static_cast<std::size_t>(((static_cast<long>(x) + o) % nl + nl) % nl)]; };
  double best = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    double acc = 0.0;
    if (full) {
      for (double v : inner) acc += v;
    } else {
      const long ml = static_cast<long>(m);
      if (m > 0)
        for (long o = -ml; o <= ml; ++o) acc += (o == -ml || o == ml) ? 0.5 * at(x, o) : at(x, o);
      for (long side : {-1L, 1L}) {
        const double a = at(x, side * ml);
        const double b = at(x, side * (ml + 1));
        acc += f * a + 0.5 * f * f * (b - a);
      }
    }
    best = std::max(best, acc * h);
  }
  return best;
}

struct BesovParams {
  double s = 0.5;
  double p = 2.0;
  double q = 2.0;
  double radius = 1.0;     // lag range |w| <= radius; u-window [x - radius/2, x + radius/2]
  std::size_t center = 0;  // node index of x
};

/// Besov-type seminorm of f (vector valued samples on [0, l)) built from differences of f':
///   ( int_{|w| <= R} ( int_{|u - x| <= R/2} |f'(u+w) - f'(u)|^p du )^{q/p} |w|^{-1-qs} dw )^{1/q}.
/// Windows are capped at the period.
inline double besov_seminorm(const Points& f, double l, const BesovParams& prm) {
  if (!(prm.s > 0.0 && prm.s < 1.0)) throw Error(ErrorKind::ParamError, "s must lie in (0, 1)");
  if (!(prm.p >= 1.0) || !(prm.q >= 1.0)) throw Error(ErrorKind::ParamError, "p and q must be >= 1");
  if (!(prm.radius > 0.0)) throw Error(ErrorKind::ParamError, "radius must be positive");
  const std::size_t n = f.size();
  const double h = l / static_cast<double>(n);
  const Points d1 = detail::differentiate(f, l, 1, DiffMethod::Spectral);
  const long n_l = static_cast<long>(n);
  auto at = [&](long i) -> const Vec3& { return d1[static_cast<std::size_t>(((i % n_l) + n_l) % n_l)]; };

  // u-window
  std::vector<long> us;
  const double half_window = 0.5 * prm.radius;
  if (half_window >= 0.5 * l) {
    for (long i = 0; i < n_l; ++i) us.push_back(i);
  } else {
    const long mu = static_cast<long>(std::floor(half_window / h + 1e-12));
    for (long o = -mu; o <= mu; ++o) us.push_back(static_cast<long>(prm.center) + o);
  }
  const long jmax = std::min<long>(n_l / 2, static_cast<long>(std::floor(prm.radius / h + 1e-12)));
  auto inner = [&](long j) {
    double acc = 0.0;
    for (long u : us) acc += std::pow((at(u + j) - at(u)).norm(), prm.p);
    return std::pow(acc * h, prm.q / prm.p);
  };
  double total = 0.0;
  for (long j = 1; j <= jmax; ++j) {
    const double w = static_cast<double>(j) * h;
    const double weight = (j == n_l / 2 && 2 * jmax == n_l) ? 0.5 : 1.0;
    total += weight * (inner(j) + inner(-j)) / std::pow(w, 1.0 + prm.q * prm.s);
  }
  // w = 0: |w|^{q(1-s)-1} times (int |f''|^p)^{q/p}; finite and nonzero only when q(1-s) == 1.
  if (std::abs(prm.q * (1.0 - prm.s) - 1.0) < 1e-14) {
    const Points d2 = detail::differentiate(f, l, 2, DiffMethod::Spectral);
    double acc = 0.0;
    for (long u : us) acc += std::pow(d2[static_cast<std::size_t>(((u % n_l) + n_l) % n_l)].norm(), prm.p);
    total += std::pow(acc * h, prm.q / prm.p);
  }
  return std::pow(total * h, 1.0 / prm.q);
}

/// Scalar convenience overload.
inline double besov_seminorm(std::span<const double> f, double l, const BesovParams& prm) {
  Points v(f.size(), Vec3::Zero());
  for (std::size_t i = 0; i < f.size(); ++i) v[i].x() = f[i];
  return besov_seminorm(v, l, prm);
}

struct CurvatureStats {
  double max = 0.0;
  double mean = 0.0;
  double cv = 0.0;  // std / mean of |kappa|
};

inline CurvatureStats curvature_stats(const ArcLengthCurve& curve) {
  CurvatureStats st;
  const double n = static_cast<double>(curve.size());
  double sum = 0.0;
  double sum2 = 0.0;
  for (const auto& k : curve.curvature) {
    const double v = k.norm();
    st.max = std::max(st.max, v);
    sum += v;
    sum2 += v * v;
  }
  st.mean = sum / n;
  const double var = std::max(0.0, sum2 / n - st.mean * st.mean);
  st.cv = st.mean > 0.0 ? std::sqrt(var) / st.mean : 0.0;
  return st;
}

enum class Clearance { Disjoint, ContainsCurve, Mixed };

inline const char* to_string(Clearance c) {
  switch (c) {
    case Clearance::Disjoint: return "disjoint";
    case Clearance::ContainsCurve: return "contains-curve";
    case Clearance::Mixed: return "mixed";
  }
  return "?";
}

struct ClearanceResult {
  Clearance verdict = Clearance::Mixed;
  double margin = 0.0;  // signed distance to the osculating circle (positive outside)
};

inline constexpr double kClearanceTol = 1e-8;
inline constexpr double kFlatCurvature = 1e-10;

/// Position of the curve relative to the open osculating disc at node i (planar curves).
/// Nodes within 2h of i are skipped: the curve always touches its osculating circle there.
inline ClearanceResult osculating_clearance(const ArcLengthCurve& curve, std::size_t i) {
  if (curve.dim != 2) throw Error(ErrorKind::ParamError, "osculating clearance needs a planar curve");
  const Vec3& kappa = curve.curvature[i];
  const double k = kappa.norm();
  if (k < kFlatCurvature) throw Error(ErrorKind::FlatPoint, "curvature vanishes at node " + std::to_string(i));
  const double rho = 1.0 / k;
  const Vec3 center = curve.nodes[i] + kappa / (k * k);
  const std::size_t n = curve.size();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    const long off = index_offset(i, j, n);
    if (std::abs(off) <= 2) continue;
    const double delta = (curve.nodes[j] - center).norm() - rho;
    lo = std::min(lo, delta);
    hi = std::max(hi, delta);
  }
  if (hi <= kClearanceTol) return {Clearance::ContainsCurve, hi};
  if (lo >= -kClearanceTol) return {Clearance::Disjoint, lo};
  return {Clearance::Mixed, std::abs(lo) < std::abs(hi) ? lo : hi};
}

struct DiagnosticsReport {
  double distortion = 1.0;
  double m_threehalves = 0.0;
  double max_curv = 0.0;
  double curv_cv = 0.0;
  bool round = false;
  std::vector<ClearanceResult> clearance;  // planar curves only, when requested
};

inline DiagnosticsReport diagnose(const ArcLengthCurve& curve, bool with_clearance = false) {
  DiagnosticsReport r;
  r.distortion = distortion(curve);
  r.m_threehalves = m_threehalves(curve);
  const CurvatureStats st = curvature_stats(curve);
  r.max_curv = st.max;
  r.curv_cv = st.cv;
  r.round = st.cv < kRoundnessThreshold;
  if (with_clearance && curve.dim == 2) {
    for (std::size_t i = 0; i < curve.size(); ++i) {
      try {
        r.clearance.push_back(osculating_clearance(curve, i));
      } catch (const Error&) {
        r.clearance.push_back({Clearance::Mixed, 0.0});
      }
    }
  }
  return r;
}

}  // namespace moebius
