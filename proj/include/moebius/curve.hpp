#pragma once

// Closed curves: raw samples, uniformly-by-arclength sampled curves, periodic
// differentiation, reparameterization and the plain text curve file format.

#include <boost/math/quadrature/gauss.hpp>

#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <iomanip>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "moebius/fourier.hpp"
#include "moebius/parallel.hpp"
#include "moebius/types.hpp"

namespace moebius {

inline constexpr std::size_t kMinNodes = 16;

enum class DiffMethod { Spectral, FiniteDifference4 };

/// Raw closed polygon in R^2 or R^3 (planar curves keep z = 0).
struct CurveSamples {
  int dim = 3;
  Points vertices;
  bool closed = true;
  std::string label;
};

/// Closed curve sampled at s_i = i * l / N, with cached arclength derivatives.
/// `curvature_dd` holds the second arclength derivative of the curvature vector.
struct ArcLengthCurve {
  int dim = 3;
  double length = 0.0;
  Points nodes;
  Points tangent;
  Points curvature;
  Points curvature_dd;

  std::size_t size() const { return nodes.size(); }
  double spacing() const { return length / static_cast<double>(nodes.size()); }
};

// ---------------------------------------------------------------------------
// Geometry helpers

inline double squared_distance_segments(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1) {
  // Closest points between two segments (Ericson, Real-Time Collision Detection 5.1.9).
  const Vec3 d1 = p1 - p0;
  const Vec3 d2 = q1 - q0;
  const Vec3 r = p0 - q0;
  const double a = d1.squaredNorm();
  const double e = d2.squaredNorm();
  const double f = d2.dot(r);
  double s = 0.0;
  double t = 0.0;
  constexpr double eps = 1e-300;
  if (a <= eps && e <= eps) return r.squaredNorm();
  if (a <= eps) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = d1.dot(r);
    if (e <= eps) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = d1.dot(d2);
      const double denom = a * e - b * b;
      s = denom > 0.0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return ((p0 + s * d1) - (q0 + t * d2)).squaredNorm();
}

inline double squared_distance_point_segment(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (a + t * ab - p).squaredNorm();
}

inline double diameter(const Points& pts) {
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::max(best, (pts[i] - pts[j]).squaredNorm());
  return std::sqrt(best);
}

inline Vec3 centroid(const Points& pts) {
  Vec3 c = Vec3::Zero();
  for (const auto& p : pts) c += p;
  return c / static_cast<double>(pts.size());
}

/// Minimum distance between non-adjacent segments of the closed polygon. Returns
/// as soon as a pair closer than `stop_below` is found.
inline double min_nonadjacent_segment_distance(const Points& pts, double stop_below = 0.0) {
  const std::size_t n = pts.size();
  std::vector<double> row_min(n, std::numeric_limits<double>::infinity());
  const double stop2 = stop_below * stop_below;
  std::atomic<bool> found{false};
  parallel_for(n, [&](std::size_t i) {
    if (found.load(std::memory_order_relaxed)) return;
    const Vec3& a0 = pts[i];
    const Vec3& a1 = pts[(i + 1) % n];
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // adjacent through the wrap
      const double d2 = squared_distance_segments(a0, a1, pts[j], pts[(j + 1) % n]);
      best = std::min(best, d2);
      if (best < stop2) {
        found.store(true, std::memory_order_relaxed);
        break;
      }
    }
    row_min[i] = best;
  });
  double best = std::numeric_limits<double>::infinity();
  for (double v : row_min) best = std::min(best, v);
  return std::sqrt(best);
}

inline double min_segment_length(const Points& pts) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) best = std::min(best, (pts[(i + 1) % pts.size()] - pts[i]).norm());
  return best;
}

/// Default embeddedness threshold: 1e-8 times the diameter.
inline constexpr double kEmbedTolRelative = 1e-8;

/// Throws on too few vertices, zero-length segments or self-contact.
inline void validate(const CurveSamples& curve, double embed_tol_relative = kEmbedTolRelative) {
  if (curve.dim != 2 && curve.dim != 3)
    throw Error(ErrorKind::InvalidCurve, "dim must be 2 or 3, got " + std::to_string(curve.dim));
  if (curve.vertices.size() < kMinNodes)
    throw Error(ErrorKind::InvalidCurve,
                "need at least " + std::to_string(kMinNodes) + " vertices, got " + std::to_string(curve.vertices.size()));
  for (const auto& v : curve.vertices)
    if (!v.allFinite()) throw Error(ErrorKind::InvalidCurve, "non-finite vertex");
  if (curve.dim == 2)
    for (const auto& v : curve.vertices)
      if (v.z() != 0.0) throw Error(ErrorKind::InvalidCurve, "planar curve with nonzero z");
  if (!(min_segment_length(curve.vertices) > 0.0))
    throw Error(ErrorKind::DegenerateCurve, "consecutive vertices coincide");
  const double tol = embed_tol_relative * diameter(curve.vertices);
  const double gap = min_nonadjacent_segment_distance(curve.vertices, tol);
  if (gap <= tol)
    throw Error(ErrorKind::NonEmbedded, "non-adjacent segments within " + std::to_string(gap));
}

// ---------------------------------------------------------------------------
// Differentiation

namespace detail {

inline std::vector<double> coordinate(const Points& pts, int c) {
  std::vector<double> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) out[i] = pts[i][c];
  return out;
}

inline Points assemble(const std::array<std::vector<double>, 3>& xyz) {
  Points out(xyz[0].size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = Vec3(xyz[0][i], xyz[1][i], xyz[2][i]);
  return out;
}

/// Fourth-order central difference of periodic samples.
inline std::vector<double> fd4(const std::vector<double>& f, double h, int order) {
  const std::size_t n = f.size();
  std::vector<double> out(n);
  auto at = [&](long i) { return f[static_cast<std::size_t>((i % static_cast<long>(n) + static_cast<long>(n)) % static_cast<long>(n))]; };
  for (std::size_t ii = 0; ii < n; ++ii) {
    const long i = static_cast<long>(ii);
    if (order == 1)
      out[ii] = (-at(i + 2) + 8.0 * at(i + 1) - 8.0 * at(i - 1) + at(i - 2)) / (12.0 * h);
    else
      out[ii] = (-at(i + 2) + 16.0 * at(i + 1) - 30.0 * at(i) + 16.0 * at(i - 1) - at(i - 2)) / (12.0 * h * h);
  }
  return out;
}

inline Points differentiate(const Points& pts, double period, int order, DiffMethod method) {
  std::array<std::vector<double>, 3> d;
  const double h = period / static_cast<double>(pts.size());
  for (int c = 0; c < 3; ++c) {
    auto f = coordinate(pts, c);
    if (method == DiffMethod::Spectral) {
      d[c] = fourier::derivative(f, period, order);
    } else if (order <= 2) {
      d[c] = fd4(f, h, order);
    } else {
      d[c] = fd4(fd4(f, h, 2), h, order - 2);
    }
  }
  return assemble(d);
}

}  // namespace detail

/// Builds an ArcLengthCurve from nodes that are uniform in arclength with total length `length`.
/// Tangents are normalized and curvature is projected normal, using the general-speed formula
/// kappa = (g'' - <g'', T> T) / |g'|^2 so small speed deviations do not leak into the invariants.
inline ArcLengthCurve make_arclength_curve(int dim, Points nodes, double length,
                                           DiffMethod method = DiffMethod::Spectral) {
  if (nodes.size() < kMinNodes || nodes.size() % 2 != 0)
    throw Error(ErrorKind::InvalidCurve, "arclength curves need an even node count >= 16");
  if (!(length > 0.0)) throw Error(ErrorKind::DegenerateCurve, "nonpositive length");
  ArcLengthCurve c;
  c.dim = dim;
  c.length = length;
  c.nodes = std::move(nodes);
  if (dim == 2)
    for (auto& p : c.nodes) p.z() = 0.0;
  const Points d1 = detail::differentiate(c.nodes, length, 1, method);
  const Points d2 = detail::differentiate(c.nodes, length, 2, method);
  const std::size_t n = c.nodes.size();
  c.tangent.resize(n);
  c.curvature.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double speed = d1[i].norm();
    if (!(speed > 0.0)) throw Error(ErrorKind::DegenerateCurve, "zero speed at node " + std::to_string(i));
    const Vec3 t = d1[i] / speed;
    c.tangent[i] = t;
    c.curvature[i] = (d2[i] - d2[i].dot(t) * t) / (speed * speed);
  }
  c.curvature_dd = detail::differentiate(c.curvature, length, 2, method);
  return c;
}

/// Total length of the trigonometric interpolant through uniformly parameterized samples.
inline double spectral_length(const Points& samples) {
  const Points d1 = detail::differentiate(samples, 1.0, 1, DiffMethod::Spectral);
  double total = 0.0;
  for (const auto& v : d1) total += v.norm();
  return total / static_cast<double>(samples.size());
}

/// Nodes already uniform in arclength; the length is measured spectrally.
inline ArcLengthCurve from_uniform_nodes(int dim, Points nodes, DiffMethod method = DiffMethod::Spectral) {
  const double l = spectral_length(nodes);
  return make_arclength_curve(dim, std::move(nodes), l, method);
}

/// Unit tangents and curvature vectors (cached on the curve).
inline std::pair<Points, Points> tangent_and_curvature(const ArcLengthCurve& curve) {
  return {curve.tangent, curve.curvature};
}

/// Intrinsic distance min(|s_i - s_j|, l - |s_i - s_j|).
inline double geodesic_distance(const ArcLengthCurve& curve, std::size_t i, std::size_t j) {
  const std::size_t n = curve.size();
  const std::size_t d = i > j ? i - j : j - i;
  const std::size_t m = std::min(d % n, n - d % n);
  return static_cast<double>(m) * curve.spacing();
}

/// Index offset of the shortest signed path from i to j, in (-N/2, N/2].
inline long index_offset(std::size_t i, std::size_t j, std::size_t n) {
  long d = (static_cast<long>(j) - static_cast<long>(i)) % static_cast<long>(n);
  if (d < 0) d += static_cast<long>(n);
  if (d > static_cast<long>(n) / 2) d -= static_cast<long>(n);
  return d;
}

// ---------------------------------------------------------------------------
// Discrete Fourier pair per coordinate

struct CurveSpectrum {
  std::array<fourier::Spectrum, 3> coords;
};

inline CurveSpectrum curve_dft(const Points& nodes) {
  CurveSpectrum s;
  for (int c = 0; c < 3; ++c) s.coords[c] = fourier::forward(detail::coordinate(nodes, c));
  return s;
}

inline CurveSpectrum curve_dft(const ArcLengthCurve& curve) { return curve_dft(curve.nodes); }

inline Points curve_idft(const CurveSpectrum& spec) {
  std::array<std::vector<double>, 3> xyz;
  for (int c = 0; c < 3; ++c) xyz[c] = fourier::inverse(spec.coords[c]);
  return detail::assemble(xyz);
}

// ---------------------------------------------------------------------------
// Spectral reparameterization of uniformly parameterized samples

namespace detail {

/// s(u) = integral_0^u sigma for a periodic sigma on [0, 1), from its trigonometric interpolant.
class PeriodicPrimitive {
 public:
  explicit PeriodicPrimitive(const std::vector<double>& sigma)
      : n_(sigma.size()), coeff_(fourier::forward(sigma)) {
    for (auto& c : coeff_) c /= static_cast<double>(n_);
    mean_ = coeff_[0].real();
    offset_ = raw(0.0);
  }

  double mean() const { return mean_; }
  double operator()(double u) const { return raw(u) - offset_; }

 private:
  double raw(double u) const {
    using fourier::Complex;
    double sum = mean_ * u;
    const double theta = 2.0 * kPi * u;
    const Complex step{std::cos(theta), std::sin(theta)};
    Complex phase{1.0, 0.0};
    const std::size_t half = n_ / 2;
    for (std::size_t k = 1; k <= half; ++k) {
      phase *= step;
      const double w = 2.0 * kPi * static_cast<double>(k);
      if (n_ % 2 == 0 && k == half) {
        sum += coeff_[k].real() * std::sin(w * u) / w;
        continue;
      }
      // c_k e^{iwu}/(iw) + c_{-k} e^{-iwu}/(-iw)
      sum += (coeff_[k] * phase / Complex{0.0, w}).real();
      sum += (coeff_[n_ - k] * std::conj(phase) / Complex{0.0, -w}).real();
    }
    return sum;
  }

  std::size_t n_;
  fourier::Spectrum coeff_;
  double mean_ = 0.0;
  double offset_ = 0.0;
};

}  // namespace detail

/// Resamples the trigonometric interpolant of uniformly parameterized closed samples at
/// `n_out` points uniform in arclength, starting at sample 0.
inline ArcLengthCurve reparameterize_spectral(int dim, const Points& samples, std::size_t n_out,
                                              DiffMethod method = DiffMethod::Spectral) {
  const std::size_t m = samples.size();
  if (m < kMinNodes) throw Error(ErrorKind::InvalidCurve, "too few samples for spectral resampling");
  const Points d1 = detail::differentiate(samples, 1.0, 1, DiffMethod::Spectral);
  std::vector<double> sigma(m);
  for (std::size_t i = 0; i < m; ++i) {
    sigma[i] = d1[i].norm();
    if (!(sigma[i] > 0.0)) throw Error(ErrorKind::DegenerateCurve, "zero speed in spectral resampling");
  }
  const detail::PeriodicPrimitive primitive(sigma);
  const fourier::TrigInterpolant speed(sigma, 1.0);
  std::array<fourier::TrigInterpolant, 3> coords;
  for (int c = 0; c < 3; ++c) coords[c] = fourier::TrigInterpolant(detail::coordinate(samples, c), 1.0);
  const double total = primitive.mean();
  Points out(n_out);
  parallel_for(n_out, [&](std::size_t k) {
    const double target = total * static_cast<double>(k) / static_cast<double>(n_out);
    double u = static_cast<double>(k) / static_cast<double>(n_out);
    for (int it = 0; it < 60; ++it) {
      const double f = primitive(u) - target;
      double sp = speed(u);
      if (!(sp > 0.1 * total * 1e-6)) sp = total;
      const double du = f / sp;
      u -= du;
      if (std::abs(du) < 1e-15) break;
    }
    out[k] = Vec3(coords[0](u), coords[1](u), coords[2](u));
  });
  return make_arclength_curve(dim, std::move(out), total, method);
}

/// Samples a parametric closed curve p(u), u in [0, 1), finely and reparameterizes spectrally.
inline ArcLengthCurve arclength_from_parametric(int dim, const std::function<Vec3(double)>& param, std::size_t n,
                                                std::size_t oversample = 8) {
  const std::size_t m = std::max<std::size_t>(n * oversample, 1024);
  Points samples(m);
  for (std::size_t i = 0; i < m; ++i) samples[i] = param(static_cast<double>(i) / static_cast<double>(m));
  return reparameterize_spectral(dim, samples, n);
}

/// Resampling an ArcLengthCurve: spectral, since the data are already uniform.
inline ArcLengthCurve resample_arclength(const ArcLengthCurve& curve, std::size_t n) {
  return reparameterize_spectral(curve.dim, curve.nodes, n);
}

/// Largest relative deviation of the arclength between consecutive nodes from l / N,
/// measured on the trigonometric interpolant.
inline double arclength_spacing_deviation(const Points& nodes) {
  const std::size_t n = nodes.size();
  const Points d1 = detail::differentiate(nodes, 1.0, 1, DiffMethod::Spectral);
  std::vector<double> sigma(n);
  for (std::size_t i = 0; i < n; ++i) sigma[i] = d1[i].norm();
  const detail::PeriodicPrimitive primitive(sigma);
  const double h = primitive.mean() / static_cast<double>(n);
  double worst = 0.0;
  double prev = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    const double s = i == n ? primitive.mean() : primitive(static_cast<double>(i) / static_cast<double>(n));
    worst = std::max(worst, std::abs((s - prev) - h) / h);
    prev = s;
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Periodic cubic spline resampling of raw samples

namespace detail {

/// Periodic cubic spline through closed polygon vertices with chord-length knots.
class PeriodicSpline {
 public:
  explicit PeriodicSpline(const Points& pts) : pts_(pts) {
    const std::size_t n = pts.size();
    h_.resize(n);
    for (std::size_t i = 0; i < n; ++i) h_[i] = (pts[(i + 1) % n] - pts[i]).norm();
    second_.assign(n, Vec3::Zero());
    solve_second_derivatives();
    seg_len_.resize(n);
    cum_.assign(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      seg_len_[i] = partial_length(i, h_[i]);
      cum_[i + 1] = cum_[i] + seg_len_[i];
    }
  }

  double length() const { return cum_.back(); }

  Vec3 value(std::size_t i, double t) const {
    const std::size_t j = (i + 1) % pts_.size();
    const double h = h_[i];
    const double a = (h - t) / h;
    const double b = t / h;
    return a * pts_[i] + b * pts_[j] +
           ((a * a * a - a) * second_[i] + (b * b * b - b) * second_[j]) * (h * h / 6.0);
  }

  Vec3 derivative(std::size_t i, double t) const {
    const std::size_t j = (i + 1) % pts_.size();
    const double h = h_[i];
    const double a = (h - t) / h;
    const double b = t / h;
    return (pts_[j] - pts_[i]) / h - (3.0 * a * a - 1.0) * h / 6.0 * second_[i] +
           (3.0 * b * b - 1.0) * h / 6.0 * second_[j];
  }

  double partial_length(std::size_t i, double t) const {
    if (t <= 0.0) return 0.0;
    constexpr int panels = 4;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
      const double a = t * p / panels;
      const double b = t * (p + 1) / panels;
      total += boost::math::quadrature::gauss<double, 15>::integrate(
          [&](double x) { return derivative(i, x).norm(); }, a, b);
    }
    return total;
  }

  /// Point at spline arclength s in [0, length()).
  Vec3 at_arclength(double s) const {
    const auto it = std::upper_bound(cum_.begin(), cum_.end(), s);
    std::size_t i = static_cast<std::size_t>(std::max<long>(0, (it - cum_.begin()) - 1));
    i = std::min(i, pts_.size() - 1);
    const double target = s - cum_[i];
    double lo = 0.0;
    double hi = h_[i];
    double t = h_[i] * std::clamp(target / seg_len_[i], 0.0, 1.0);
    for (int it_count = 0; it_count < 100; ++it_count) {
      const double f = partial_length(i, t) - target;
      if (f > 0.0) hi = t; else lo = t;
      const double d = derivative(i, t).norm();
      double next = t - f / d;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      const double step = std::abs(next - t);
      t = next;
      if (step < 1e-12 * h_[i]) break;
    }
    return value(i, t);
  }

 private:
  void solve_second_derivatives() {
    // Cyclic tridiagonal system h_{i-1} M_{i-1} + 2 (h_{i-1} + h_i) M_i + h_i M_{i+1} = rhs_i,
    // solved by Sherman-Morrison on top of the Thomas algorithm.
    const std::size_t n = pts_.size();
    std::vector<double> lower(n), diag(n), upper(n);
    std::vector<Vec3> rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t im = (i + n - 1) % n;
      const std::size_t ip = (i + 1) % n;
      lower[i] = h_[im];
      upper[i] = h_[i];
      diag[i] = 2.0 * (h_[im] + h_[i]);
      rhs[i] = 6.0 * ((pts_[ip] - pts_[i]) / h_[i] - (pts_[i] - pts_[im]) / h_[im]);
    }
    const double alpha = upper[n - 1];  // corner A[n-1][0]
    const double beta = lower[0];       // corner A[0][n-1]
    const double gamma = -diag[0];
    std::vector<double> d = diag;
    d[0] -= gamma;
    d[n - 1] -= alpha * beta / gamma;
    auto thomas = [&](std::vector<Vec3> b) {
      std::vector<double> c(n);
      std::vector<Vec3> x(n);
      c[0] = upper[0] / d[0];
      b[0] /= d[0];
      for (std::size_t i = 1; i < n; ++i) {
        const double m = d[i] - lower[i] * c[i - 1];
        c[i] = upper[i] / m;
        b[i] = (b[i] - lower[i] * b[i - 1]) / m;
      }
      x[n - 1] = b[n - 1];
      for (std::size_t i = n - 1; i-- > 0;) x[i] = b[i] - c[i] * x[i + 1];
      return x;
    };
    std::vector<Vec3> u(n, Vec3::Zero());
    u[0] = Vec3::Constant(gamma);
    u[n - 1] = Vec3::Constant(alpha);
    const std::vector<Vec3> y = thomas(rhs);
    const std::vector<Vec3> z = thomas(u);
    const double vz_scale = beta / gamma;
    for (int c = 0; c < 3; ++c) {
      const double num = y[0][c] + vz_scale * y[n - 1][c];
      const double den = 1.0 + z[0][c] + vz_scale * z[n - 1][c];
      const double factor = num / den;
      for (std::size_t i = 0; i < n; ++i) second_[i][c] = y[i][c] - factor * z[i][c];
    }
  }

  Points pts_;
  std::vector<double> h_;
  Points second_;
  std::vector<double> seg_len_;
  std::vector<double> cum_;
};

}  // namespace detail

/// Resamples raw closed samples uniformly in arclength of their periodic cubic spline.
inline ArcLengthCurve resample_arclength(const CurveSamples& curve, std::size_t n,
                                         DiffMethod method = DiffMethod::Spectral) {
  validate(curve);
  if (n < kMinNodes) throw Error(ErrorKind::InvalidCurve, "target node count below 16");
  const detail::PeriodicSpline spline(curve.vertices);
  const double l = spline.length();
  Points out(n);
  parallel_for(n, [&](std::size_t k) { out[k] = spline.at_arclength(l * static_cast<double>(k) / static_cast<double>(n)); });
  return make_arclength_curve(curve.dim, std::move(out), l, method);
}

inline CurveSamples to_samples(const ArcLengthCurve& curve, std::string label = {}) {
  return CurveSamples{curve.dim, curve.nodes, true, std::move(label)};
}

// ---------------------------------------------------------------------------
// Similarity transforms (derived data recomputed)

inline ArcLengthCurve scaled(const ArcLengthCurve& curve, double factor) {
  Points p = curve.nodes;
  for (auto& v : p) v *= factor;
  return make_arclength_curve(curve.dim, std::move(p), curve.length * factor);
}

inline ArcLengthCurve rigidly_moved(const ArcLengthCurve& curve, const Eigen::Matrix3d& rotation, const Vec3& shift) {
  Points p = curve.nodes;
  for (auto& v : p) v = rotation * v + shift;
  int dim = curve.dim;
  if (dim == 2)
    for (const auto& v : p)
      if (std::abs(v.z()) > 0.0) dim = 3;
  return make_arclength_curve(dim, std::move(p), curve.length);
}

/// Rotates node indices so that `start` becomes node 0.
inline ArcLengthCurve reindexed(const ArcLengthCurve& curve, std::size_t start) {
  ArcLengthCurve out = curve;
  const std::size_t n = curve.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = (i + start) % n;
    out.nodes[i] = curve.nodes[k];
    out.tangent[i] = curve.tangent[k];
    out.curvature[i] = curve.curvature[k];
    out.curvature_dd[i] = curve.curvature_dd[k];
  }
  return out;
}

/// Symmetric Hausdorff distance between two closed polygons (vertex to segment).
inline double hausdorff_polyline(const Points& a, const Points& b) {
  auto one_sided = [](const Points& from, const Points& to) {
    std::vector<double> best(from.size());
    parallel_for(from.size(), [&](std::size_t i) {
      double m = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < to.size(); ++j)
        m = std::min(m, squared_distance_point_segment(from[i], to[j], to[(j + 1) % to.size()]));
      best[i] = m;
    });
    return std::sqrt(*std::max_element(best.begin(), best.end()));
  };
  return std::max(one_sided(a, b), one_sided(b, a));
}

// ---------------------------------------------------------------------------
// Curve file format

struct CurveFile {
  CurveSamples samples;
  std::optional<double> length;
};

inline void write_curve(std::ostream& os, int dim, const Points& pts, std::optional<double> length = std::nullopt) {
  const auto old_flags = os.flags();
  const auto old_precision = os.precision();
  os << std::setprecision(17);
  os << "# dim=" << dim << " n=" << pts.size() << " closed=1";
  if (length) os << " length=" << *length;
  os << '\n';
  for (const auto& p : pts) {
    os << p.x() << ' ' << p.y();
    if (dim == 3) os << ' ' << p.z();
    os << '\n';
  }
  os.flags(old_flags);
  os.precision(old_precision);
}

inline void write_curve(std::ostream& os, const ArcLengthCurve& curve) {
  write_curve(os, curve.dim, curve.nodes, curve.length);
}

inline CurveFile read_curve(std::istream& is) {
  auto fail = [](std::size_t line, const std::string& why) {
    throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ": " + why);
  };
  std::string line;
  if (!std::getline(is, line)) fail(1, "missing header");
  std::istringstream header(line);
  std::string tok;
  header >> tok;
  if (tok != "#") fail(1, "malformed header (expected '# dim=<2|3> n=<N> closed=1 [length=<l>]')");
  int dim = 0;
  long n = -1;
  int closed = -1;
  std::optional<double> length;
  while (header >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) fail(1, "malformed header token '" + tok + "'");
    const std::string key = tok.substr(0, eq);
    const std::string val = tok.substr(eq + 1);
    try {
      std::size_t used = 0;
      if (key == "dim") dim = std::stoi(val, &used);
      else if (key == "n") n = std::stol(val, &used);
      else if (key == "closed") closed = std::stoi(val, &used);
      else if (key == "length") length = std::stod(val, &used);
      else fail(1, "unknown header key '" + key + "'");
      if (used != val.size()) fail(1, "malformed header value '" + tok + "'");
    } catch (const std::logic_error&) {
      fail(1, "malformed header value '" + tok + "'");
    }
  }
  if (dim != 2 && dim != 3) fail(1, "malformed header: dim must be 2 or 3");
  if (n < 0) fail(1, "malformed header: missing n");
  if (closed != 1) fail(1, "malformed header: closed must be 1");
  CurveFile out;
  out.samples.dim = dim;
  out.length = length;
  out.samples.vertices.reserve(static_cast<std::size_t>(n));
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line);
    Vec3 p = Vec3::Zero();
    for (int c = 0; c < dim; ++c) {
      std::string field;
      if (!(row >> field)) fail(lineno, "expected " + std::to_string(dim) + " coordinates");
      try {
        std::size_t used = 0;
        p[c] = std::stod(field, &used);
        if (used != field.size()) fail(lineno, "bad number '" + field + "'");
      } catch (const std::logic_error&) {
        fail(lineno, "bad number '" + field + "'");
      }
    }
    std::string extra;
    if (row >> extra) fail(lineno, "too many coordinates");
    out.samples.vertices.push_back(p);
  }
  if (static_cast<long>(out.samples.vertices.size()) != n)
    fail(lineno, "header announces n=" + std::to_string(n) + " but found " + std::to_string(out.samples.vertices.size()) + " vertices");
  return out;
}

}  // namespace moebius
