#pragma once

// Moebius energy and its localized variants on uniformly arclength sampled curves.
//
// Quadrature: uniform product trapezoid over node pairs. The integrand
// 1/|g(x)-g(y)|^2 - 1/d(x,y)^2 extends continuously to the diagonal with value
// |kappa|^2 / 12, which is what the diagonal terms contribute.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "moebius/curve.hpp"
#include "moebius/parallel.hpp"
#include "moebius/types.hpp"

namespace moebius {

inline constexpr double kChordCollapseRelative = 1e-12;
inline constexpr double kDefaultEps0 = 0.1;

struct LocalizedValue {
  std::size_t node = 0;
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
  double value = 0.0;
};

struct EnergyReport {
  double total = 0.0;
  double length = 0.0;
  std::size_t n = 0;
  std::string method = "trapezoid+diagonal-limit";
  std::vector<LocalizedValue> localization;
};

enum class LocalKind { BallExtrinsic, Intrinsic };

inline const char* to_string(LocalKind kind) {
  return kind == LocalKind::Intrinsic ? "intrinsic" : "extrinsic";
}

/// Trapezoid error of the geodesic term 1/d(w)^2, whose w-derivatives jump at the antipodal
/// node w = l/2. The chord term is smooth and periodic, so the Euler-Maclaurin end terms
/// are curve independent: 8/(3N^2) - 32/(15N^4).
inline double antipodal_correction(std::size_t n) {
  const double inv2 = 1.0 / (static_cast<double>(n) * static_cast<double>(n));
  return inv2 * (8.0 / 3.0 - 32.0 / 15.0 * inv2);
}

/// Energy density of the node pair (i, j), without the h^2 weight. The antipodal pair of
/// each row carries that row's share of the end correction, so any restriction that
/// contains whole rows (full windows, large balls) sums to the total.
inline double pair_density(const ArcLengthCurve& curve, std::size_t i, std::size_t j) {
  if (i == j) return curve.curvature[i].squaredNorm() / 12.0;
  const double chord2 = (curve.nodes[i] - curve.nodes[j]).squaredNorm();
  const double collapse = kChordCollapseRelative * curve.length;
  if (chord2 < collapse * collapse)
    throw Error(ErrorKind::NonEmbedded, "chord between nodes " + std::to_string(i) + " and " + std::to_string(j) + " collapsed");
  const std::size_t n = curve.size();
  const double d = geodesic_distance(curve, i, j);
  double v = 1.0 / chord2 - 1.0 / (d * d);
  if ((j + n - i) % n == n / 2) v -= antipodal_correction(n) * static_cast<double>(n) / (curve.length * curve.length);
  return v;
}

inline EnergyReport mobius_energy(const ArcLengthCurve& curve) {
  const std::size_t n = curve.size();
  const double h = curve.spacing();
  EnergyReport report;
  report.length = curve.length;
  report.n = n;
  report.total = h * h * parallel_sum(n, [&](std::size_t i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += pair_density(curve, i, j);
    return row;
  });
  return report;
}

/// Sum of the energy double integral restricted to a node subset (both variables).
inline double restricted_energy(const ArcLengthCurve& curve, const std::vector<std::size_t>& subset) {
  const double h = curve.spacing();
  double total = 0.0;
  for (std::size_t a : subset) {
    double row = 0.0;
    for (std::size_t b : subset) row += pair_density(curve, a, b);
    total += row;
  }
  return total * h * h;
}

/// Extrinsic localization: both points of the pair inside the open ball B_r(x0).
inline double localized_energy_ball(const ArcLengthCurve& curve, const Vec3& x0, double r) {
  if (!(r > 0.0)) throw Error(ErrorKind::ParamError, "ball radius must be positive");
  std::vector<std::size_t> inside;
  for (std::size_t i = 0; i < curve.size(); ++i)
    if ((curve.nodes[i] - x0).norm() < r) inside.push_back(i);
  return restricted_energy(curve, inside);
}

namespace detail {

/// Energies of the symmetric index windows [c - m, c + m] for m = 0..m_max (full curve once 2m+1 >= N).
inline std::vector<double> window_energies(const ArcLengthCurve& curve, std::size_t center, std::size_t m_max) {
  const std::size_t n = curve.size();
  const double h2 = curve.spacing() * curve.spacing();
  auto node = [&](long offset) {
    return static_cast<std::size_t>(((static_cast<long>(center) + offset) % static_cast<long>(n) + static_cast<long>(n)) %
                                    static_cast<long>(n));
  };
  std::vector<double> out;
  out.reserve(m_max + 1);
  double acc = pair_density(curve, center, center);
  out.push_back(acc * h2);
  for (std::size_t m = 1; m <= m_max; ++m) {
    if (2 * m + 1 > n) {
      // Window wraps onto itself: the full double sum.
      if (2 * (m - 1) + 1 >= n) {
        out.push_back(out.back());
        continue;
      }
      std::vector<std::size_t> all(n);
      for (std::size_t i = 0; i < n; ++i) all[i] = i;
      out.push_back(restricted_energy(curve, all));
      continue;
    }
    // Add the two new nodes (offsets -m and +m) against the old window and each other.
    const std::size_t lo = node(-static_cast<long>(m));
    const std::size_t hi = node(static_cast<long>(m));
    double add = pair_density(curve, lo, lo) + pair_density(curve, hi, hi) + 2.0 * pair_density(curve, lo, hi);
    for (long o = -static_cast<long>(m) + 1; o <= static_cast<long>(m) - 1; ++o) {
      const std::size_t k = node(o);
      add += 2.0 * (pair_density(curve, lo, k) + pair_density(curve, hi, k));
    }
    acc += add;
    out.push_back(acc * h2);
  }
  return out;
}

}  // namespace detail

/// Intrinsic localization around node i0: both points within geodesic distance r.
/// Radii in [m h, (m + 1/2) h] give the plain window sum of offsets |o| <= m; on the
/// second half cell the value ramps linearly to the next window, so r -> value is
/// continuous and nondecreasing.
inline double localized_energy_intrinsic(const ArcLengthCurve& curve, std::size_t i0, double r) {
  if (!(r > 0.0)) throw Error(ErrorKind::ParamError, "intrinsic radius must be positive");
  const double h = curve.spacing();
  const std::size_t n = curve.size();
  const double ratio = std::min(r, 0.5 * curve.length) / h;
  std::size_t m = static_cast<std::size_t>(std::floor(ratio + 1e-12));
  // Node m + 1 enters at (m + 1) h; the ramp runs over the second half of the cell so
  // that radii below h/2 keep only the center node.
  const double frac = std::clamp(2.0 * (ratio - static_cast<double>(m)) - 1.0, 0.0, 1.0);
  m = std::min(m, n / 2);
  const auto e = detail::window_energies(curve, i0, std::min(m + 1, n / 2));
  if (m + 1 >= e.size()) return e[m];
  return e[m] + frac * (e[m + 1] - e[m]);
}

/// Smooth radial bump: 1 on B_R(center), 0 outside B_2R(center), monotone in between.
struct CutoffFunction {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;  // +inf gives phi == 1

  static double profile(double rho) {
    if (rho <= 1.0) return 1.0;
    if (rho >= 2.0) return 0.0;
    auto psi = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
    const double a = psi(2.0 - rho);
    const double b = psi(rho - 1.0);
    return a / (a + b);
  }

  double operator()(const Vec3& y) const {
    if (std::isinf(radius)) return 1.0;
    return profile((y - center).norm() / radius);
  }
};

/// Cutoff-weighted energy: the integrand is weighted by phi(g(x)) in the first variable only.
inline double localized_energy_cutoff(const ArcLengthCurve& curve, const CutoffFunction& phi) {
  const std::size_t n = curve.size();
  const double h = curve.spacing();
  return h * h * parallel_sum(n, [&](std::size_t i) {
    const double w = phi(curve.nodes[i]);
    if (w == 0.0) return 0.0;
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += pair_density(curve, i, j);
    return w * row;
  });
}

/// Largest localized energy over centers placed at curve nodes. Ties keep the lowest index.
inline LocalizedValue sup_localized(const ArcLengthCurve& curve, double r, LocalKind kind) {
  const std::size_t n = curve.size();
  std::vector<double> values(n);
  parallel_for(n, [&](std::size_t i) {
    values[i] = kind == LocalKind::Intrinsic ? localized_energy_intrinsic(curve, i, r)
                                             : localized_energy_ball(curve, curve.nodes[i], r);
  });
  LocalizedValue best;
  best.radius = r;
  best.value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (values[i] > best.value) {
      best.value = values[i];
      best.node = i;
    }
  }
  best.center = curve.nodes[best.node];
  return best;
}

/// Radius at which the sup of the intrinsic localized energy equals eps (bisection in r).
inline double concentration_radius(const ArcLengthCurve& curve, double eps, double rel_tol = 1e-3) {
  const double total = mobius_energy(curve).total;
  if (!(eps > 0.0) || !(eps < total))
    throw Error(ErrorKind::EpsilonOutOfRange, "eps must lie in (0, E) with E = " + std::to_string(total));
  double lo = 0.0;
  double hi = 0.5 * curve.length;
  while (hi - lo > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (sup_localized(curve, mid, LocalKind::Intrinsic).value < eps)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace moebius
