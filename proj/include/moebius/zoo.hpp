#pragma once

// Deterministic test curves.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "moebius/curve.hpp"
#include "moebius/types.hpp"

namespace moebius::zoo {

inline ArcLengthCurve circle(std::size_t n, double radius = 1.0) {
  // Analytic nodes; avoids any resampling error for the reference shape.
  Points p(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
    p[i] = Vec3(radius * std::cos(t), radius * std::sin(t), 0.0);
  }
  return make_arclength_curve(2, std::move(p), 2.0 * kPi * radius);
}

inline ArcLengthCurve ellipse(std::size_t n, double a = 2.0, double b = 1.0) {
  return arclength_from_parametric(
      2, [=](double u) { const double t = 2.0 * kPi * u; return Vec3(a * std::cos(t), b * std::sin(t), 0.0); }, n);
}

/// Polar curve r = 1 + amplitude cos(mode theta).
inline ArcLengthCurve perturbed_circle(std::size_t n, double amplitude = 0.05, int mode = 3) {
  return arclength_from_parametric(
      2,
      [=](double u) {
        const double t = 2.0 * kPi * u;
        const double r = 1.0 + amplitude * std::cos(mode * t);
        return Vec3(r * std::cos(t), r * std::sin(t), 0.0);
      },
      n);
}

/// Planar loop with one sharp U-turn at (1, 0); the tip radius of curvature is about gap^2.
inline ArcLengthCurve hairpin(std::size_t n, double gap = 0.25) {
  return arclength_from_parametric(
      2,
      [=](double u) {
        const double t = 2.0 * kPi * u;
        const double width = gap + (1.0 - gap) * 0.5 * (1.0 - std::cos(t));
        return Vec3(std::cos(t), std::sin(t) * width, 0.0);
      },
      n, 16);
}

inline ArcLengthCurve trefoil(std::size_t n) {
  return arclength_from_parametric(
      3,
      [](double u) {
        const double t = 2.0 * kPi * u;
        return Vec3(std::sin(t) + 2.0 * std::sin(2.0 * t), std::cos(t) - 2.0 * std::cos(2.0 * t), -std::sin(3.0 * t));
      },
      n);
}

/// Unit circle plus seeded Fourier modes 2..max_mode with coefficients decaying like 1/k^2.
inline ArcLengthCurve random_fourier(std::size_t n, std::uint64_t seed, int dim = 2, int max_mode = 5,
                                     double amplitude = 0.08) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  struct Mode {
    int k;
    Vec3 c, s;
  };
  std::vector<Mode> modes;
  for (int k = 2; k <= max_mode; ++k) {
    Mode m{k, Vec3::Zero(), Vec3::Zero()};
    for (int c = 0; c < dim; ++c) {
      m.c[c] = amplitude * uni(rng) / (k * k);
      m.s[c] = amplitude * uni(rng) / (k * k);
    }
    modes.push_back(m);
  }
  return arclength_from_parametric(
      dim,
      [modes](double u) {
        const double t = 2.0 * kPi * u;
        Vec3 p(std::cos(t), std::sin(t), 0.0);
        for (const auto& m : modes) p += m.c * std::cos(m.k * t) + m.s * std::sin(m.k * t);
        return p;
      },
      n);
}

inline const std::vector<std::string>& names() {
  static const std::vector<std::string> all{"circle", "ellipse", "perturbed-circle", "hairpin", "trefoil", "random-fourier"};
  return all;
}

struct Params {
  double radius = 1.0;
  double a = 2.0;
  double b = 1.0;
  double amplitude = 0.05;
  int mode = 3;
  double gap = 0.25;
  std::uint64_t seed = 0;
  int dim = 2;
};

/// Curve by zoo name; throws ConfigError for unknown names.
inline ArcLengthCurve make(const std::string& name, std::size_t n, const Params& p = {}) {
  if (name == "circle") return circle(n, p.radius);
  if (name == "ellipse") return ellipse(n, p.a, p.b);
  if (name == "perturbed-circle") return perturbed_circle(n, p.amplitude, p.mode);
  if (name == "hairpin") return hairpin(n, p.gap);
  if (name == "trefoil") return trefoil(n);
  if (name == "random-fourier") return random_fourier(n, p.seed, p.dim);
  throw Error(ErrorKind::ConfigError, "unknown zoo curve '" + name + "'");
}

}  // namespace moebius::zoo
