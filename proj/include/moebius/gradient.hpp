#pragma once

// The L^2 gradient H of the Moebius energy on an arclength sampled curve.
//
//   H = P_T^perp (Q + R1 + R2)
//   Q(x)  = 2 pv int (2 (g(x+w) - g(x) - w T) / w^4 - kappa / w^2) dw  = Qt kappa
//   R1(x) = 4 int (g(x+w) - g(x) - w T) (1/|g(x+w)-g(x)|^4 - 1/w^4) dw
//   R2(x) = 2 int kappa (1/w^2 - 1/|g(x+w)-g(x)|^2) dw
//   Qt f(x) = 4 pv int int_0^1 (1-s) (f(x+sw) - f(x)) / w^2 ds dw
//
// All w-integrals run over [-l/2, l/2] on the node grid w = j h. The offsets +jh and
// -jh are always accumulated as a pair, which realizes the principal value; the
// endpoint pair j = N/2 gets the trapezoid half weight. The w = 0 node contributes
// the analytic limit of the paired integrand:
//   Q: kappa''/6,  R1: kappa |kappa|^2 / 3,  R2: -kappa |kappa|^2 / 6.

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <cstddef>
#include <cstring>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "moebius/curve.hpp"
#include "moebius/energy.hpp"
#include "moebius/fourier.hpp"
#include "moebius/parallel.hpp"
#include "moebius/types.hpp"

namespace moebius {

struct GradientParts {
  Points q;
  Points r1;
  Points r2;
};

/// Per-node gradient values (normal to the curve), optionally with the raw parts.
struct GradientField {
  Points values;
  std::optional<GradientParts> parts;

  double sup_norm() const {
    double m = 0.0;
    for (const auto& v : values) m = std::max(m, v.norm());
    return m;
  }
};

inline Vec3 normal_part(const Vec3& v, const Vec3& unit_tangent) { return v - v.dot(unit_tangent) * unit_tangent; }

// ---------------------------------------------------------------------------
// Spectral symbol of Qt

namespace detail {

/// Paired w-integrand of Qt on the mode cos(xi x), evaluated at x = 0 (one side).
inline double qt_mode_integrand(double xi, double w) {
  const double a = xi * w;
  double bracket;  // (1 - cos a)/a^2 - 1/2
  if (std::abs(a) < 0.1) {
    const double a2 = a * a;
    bracket = a2 * (-1.0 / 24.0 + a2 * (1.0 / 720.0 - a2 / 40320.0));
  } else {
    const double s = std::sin(0.5 * a);
    bracket = 2.0 * s * s / (a * a) - 0.5;
  }
  return 4.0 * bracket / (w * w);
}

}  // namespace detail

/// Eigenvalue of the grid quadrature of Qt on Fourier mode k (curve length l, N nodes).
/// Exact in s; the w-quadrature is the same one used by the direct operator.
inline double qt_symbol_value(std::size_t n, double l, std::size_t k) {
  if (k == 0) return 0.0;
  const double h = l / static_cast<double>(n);
  const double xi = 2.0 * kPi * static_cast<double>(k) / l;
  double sum = -xi * xi / 6.0;  // w = 0 limit
  for (std::size_t j = 1; j < n / 2; ++j) sum += 2.0 * detail::qt_mode_integrand(xi, static_cast<double>(j) * h);
  sum += detail::qt_mode_integrand(xi, 0.5 * l);
  return h * sum;
}

/// Per-mode coefficients q_k of Qt for |k| = 0..N/2.
struct SpectralSymbol {
  std::size_t n = 0;
  double length = 0.0;
  std::vector<double> q;

  double operator()(std::size_t abs_k) const { return q.at(abs_k); }
};

/// Cached per (N, l).
inline const SpectralSymbol& spectral_symbol(std::size_t n, double l) {
  static std::mutex mutex;
  static std::map<std::pair<std::size_t, std::uint64_t>, SpectralSymbol> cache;
  std::uint64_t bits = 0;
  std::memcpy(&bits, &l, sizeof bits);
  std::lock_guard<std::mutex> lock(mutex);
  auto key = std::make_pair(n, bits);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  SpectralSymbol sym;
  sym.n = n;
  sym.length = l;
  sym.q.resize(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) sym.q[k] = qt_symbol_value(n, l, k);
  if (cache.size() > 64) cache.clear();
  return cache.emplace(key, std::move(sym)).first->second;
}

enum class QMode { Direct, Spectral };

/// Qt applied to periodic samples f on [0, l). Direct mode integrates the s-variable
/// with composite 8-point Gauss-Legendre on the trigonometric interpolant of f.
inline std::vector<double> q_tilde(double l, std::span<const double> f, QMode mode) {
  const std::size_t n = f.size();
  if (mode == QMode::Spectral) {
    const SpectralSymbol& sym = spectral_symbol(n, l);
    return fourier::apply_multiplier(f, [&](std::size_t k) { return sym(k); });
  }
  const double h = l / static_cast<double>(n);
  const fourier::TrigInterpolant interp(f, l);
  const std::vector<double> f2 = fourier::derivative(f, l, 2);
  const double xi_max = 2.0 * kPi * static_cast<double>(std::max<std::size_t>(interp.bandwidth(), 1)) / l;
  using GL = boost::math::quadrature::gauss<double, 8>;
  std::vector<double> out(n);
  parallel_for(n, [&](std::size_t i) {
    const double x = static_cast<double>(i) * h;
    const double fx = f[i];
    double acc = h * f2[i] / 6.0;
    for (std::size_t j = 1; j <= n / 2; ++j) {
      const double w = static_cast<double>(j) * h;
      const int panels = std::max(1, static_cast<int>(std::ceil(xi_max * w / 2.0)));
      double inner = 0.0;
      for (int p = 0; p < panels; ++p) {
        const double a = static_cast<double>(p) / panels;
        const double b = static_cast<double>(p + 1) / panels;
        inner += GL::integrate(
            [&](double s) { return (1.0 - s) * (interp(x + s * w) + interp(x - s * w) - 2.0 * fx); }, a, b);
      }
      const double weight = (j == n / 2) ? 0.5 * h : h;
      acc += weight * 4.0 * inner / (w * w);
    }
    out[i] = acc;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Q and the remainders

enum class QOperatorMode { Grid, Spectral, Direct };

/// Q gamma = Qt kappa. Grid mode evaluates the first form on the nodes directly;
/// Spectral and Direct apply q_tilde componentwise to the curvature.
inline Points q_operator(const ArcLengthCurve& curve, QOperatorMode mode = QOperatorMode::Grid) {
  const std::size_t n = curve.size();
  Points out(n, Vec3::Zero());
  if (mode != QOperatorMode::Grid) {
    const QMode qm = mode == QOperatorMode::Spectral ? QMode::Spectral : QMode::Direct;
    for (int c = 0; c < 3; ++c) {
      std::vector<double> k(n);
      for (std::size_t i = 0; i < n; ++i) k[i] = curve.curvature[i][c];
      const auto qk = q_tilde(curve.length, k, qm);
      for (std::size_t i = 0; i < n; ++i) out[i][c] = qk[i];
    }
    return out;
  }
  const double h = curve.spacing();
  parallel_for(n, [&](std::size_t i) {
    const Vec3& g = curve.nodes[i];
    const Vec3& kappa = curve.curvature[i];
    Vec3 acc = h * curve.curvature_dd[i] / 6.0;
    for (std::size_t j = 1; j <= n / 2; ++j) {
      const double w = static_cast<double>(j) * h;
      const double w2 = w * w;
      // +w and -w: the -w T terms cancel inside the pair.
      const Vec3 second = curve.nodes[(i + j) % n] + curve.nodes[(i + n - j) % n] - 2.0 * g;
      const Vec3 pair = 2.0 * (2.0 * second / (w2 * w2) - 2.0 * kappa / w2);
      acc += (j == n / 2 ? 0.5 * h : h) * pair;
    }
    out[i] = acc;
  });
  return out;
}

inline std::pair<Points, Points> remainder_r(const ArcLengthCurve& curve) {
  const std::size_t n = curve.size();
  const double h = curve.spacing();
  const double collapse = kChordCollapseRelative * curve.length;
  Points r1(n), r2(n);
  parallel_for(n, [&](std::size_t i) {
    const Vec3& g = curve.nodes[i];
    const Vec3& t = curve.tangent[i];
    const Vec3& kappa = curve.curvature[i];
    const double k2 = kappa.squaredNorm();
    Vec3 acc1 = h * kappa * k2 / 3.0;
    double acc2 = -h * k2 / 12.0;  // R2 = 2 kappa * acc2
    for (std::size_t j = 1; j <= n / 2; ++j) {
      const double w = static_cast<double>(j) * h;
      const double w2 = w * w;
      const double weight = (j == n / 2) ? 0.5 * h : h;
      for (int side = -1; side <= 1; side += 2) {
        const std::size_t k = side > 0 ? (i + j) % n : (i + n - j) % n;
        const Vec3 delta = curve.nodes[k] - g;
        const double c2 = delta.squaredNorm();
        if (c2 < collapse * collapse)
          throw Error(ErrorKind::NonEmbedded, "chord collapse at nodes " + std::to_string(i) + ", " + std::to_string(k));
        // 1/c^4 - 1/w^4 = (w^2 - c^2)(w^2 + c^2) / (c^4 w^4)
        const double dw = w2 - c2;
        const double inv4 = dw * (w2 + c2) / (c2 * c2 * w2 * w2);
        const Vec3 taylor = delta - (side * w) * t;
        acc1 += weight * 4.0 * taylor * inv4;
        acc2 += weight * (-dw / (c2 * w2));
      }
    }
    r1[i] = acc1;
    r2[i] = 2.0 * kappa * acc2;
  });
  return {std::move(r1), std::move(r2)};
}

/// H = P^perp (Q + R1 + R2), per node.
inline GradientField mobius_gradient(const ArcLengthCurve& curve, bool keep_parts = true) {
  GradientParts parts;
  parts.q = q_operator(curve, QOperatorMode::Grid);
  auto [r1, r2] = remainder_r(curve);
  parts.r1 = std::move(r1);
  parts.r2 = std::move(r2);
  GradientField field;
  field.values.resize(curve.size());
  for (std::size_t i = 0; i < curve.size(); ++i)
    field.values[i] = normal_part(parts.q[i] + parts.r1[i] + parts.r2[i], curve.tangent[i]);
  if (keep_parts) field.parts = std::move(parts);
  return field;
}

/// L^2(ds) inner product of two per-node fields.
inline double l2_inner(const ArcLengthCurve& curve, const Points& a, const Points& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i].dot(b[i]);
  return s * curve.spacing();
}

// ---------------------------------------------------------------------------
// Tangent-point curvature and the geometric Euler-Lagrange residual

/// Curvature vector at g_i of the circle through g_i and g_j tangent to T_i:
/// 2 P^perp (g_j - g_i) / |g_j - g_i|^2. Zero when the chord is parallel to T_i.
inline Vec3 tangent_point_curvature(const ArcLengthCurve& curve, std::size_t i, std::size_t j) {
  if (i == j) throw Error(ErrorKind::CoincidentPoints, "tangent-point curvature needs two distinct nodes");
  const Vec3 delta = curve.nodes[j] - curve.nodes[i];
  const double c2 = delta.squaredNorm();
  const double collapse = kChordCollapseRelative * curve.length;
  if (c2 < collapse * collapse) throw Error(ErrorKind::CoincidentPoints, "chord below 1e-12 l");
  const Vec3 perp = normal_part(delta, curve.tangent[i]);
  if (perp.norm() <= 1e-10 * std::sqrt(c2)) return Vec3::Zero();
  return 2.0 * perp / c2;
}

struct ELResidual {
  Points values;
  double sup = 0.0;
  double l2 = 0.0;
};

/// pv sum_j (kappa(x_i, x_j) - kappa(x_i)) / |x_i - x_j|^2 h, with the diagonal limit
/// P^perp kappa''/12 + kappa |kappa|^2 / 12. Convention: 2 * residual == H.
inline ELResidual el_residual(const ArcLengthCurve& curve) {
  const std::size_t n = curve.size();
  const double h = curve.spacing();
  ELResidual res;
  res.values.resize(n);
  parallel_for(n, [&](std::size_t i) {
    const Vec3& kappa = curve.curvature[i];
    Vec3 acc = h * (normal_part(curve.curvature_dd[i], curve.tangent[i]) + kappa * kappa.squaredNorm()) / 12.0;
    for (std::size_t j = 1; j <= n / 2; ++j) {
      const double weight = (j == n / 2) ? 0.5 * h : h;
      for (std::size_t k : {(i + j) % n, (i + n - j) % n}) {
        const double c2 = (curve.nodes[k] - curve.nodes[i]).squaredNorm();
        acc += weight * (tangent_point_curvature(curve, i, k) - kappa) / c2;
      }
    }
    res.values[i] = acc;
  });
  double sum2 = 0.0;
  for (const auto& v : res.values) {
    res.sup = std::max(res.sup, v.norm());
    sum2 += v.squaredNorm();
  }
  res.l2 = std::sqrt(sum2 * h);
  return res;
}

}  // namespace moebius
