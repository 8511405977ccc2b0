#pragma once

// Periodic spectral tools on uniform grids: DFT pair, spectral derivatives and
// trigonometric interpolation. Grids sample [0, period) at N equispaced points.

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "moebius/types.hpp"

namespace moebius::fourier {

using Complex = std::complex<double>;
using Spectrum = std::vector<Complex>;

/// Signed wavenumber of DFT slot `idx`; the Nyquist slot of an even grid maps to +N/2.
inline long wavenumber(std::size_t idx, std::size_t n) {
  return idx <= n / 2 ? static_cast<long>(idx) : static_cast<long>(idx) - static_cast<long>(n);
}

/// Unnormalized forward transform, F_k = sum_j f_j exp(-2 pi i j k / N).
inline Spectrum forward(std::span<const double> f) {
  std::vector<Complex> in(f.begin(), f.end());
  Spectrum out;
  Eigen::FFT<double> fft;
  fft.fwd(out, in);
  return out;
}

/// Inverse of `forward`, real part only.
inline std::vector<double> inverse(const Spectrum& spec) {
  std::vector<Complex> out;
  Eigen::FFT<double> fft;
  fft.inv(out, spec);
  std::vector<double> re(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) re[i] = out[i].real();
  return re;
}

/// Multiplier (i xi_k)^order for slot idx. On even grids the Nyquist mode is
/// treated as a cosine: odd orders annihilate it, even orders keep the real factor.
inline Complex derivative_multiplier(std::size_t idx, std::size_t n, double period, int order) {
  const long k = wavenumber(idx, n);
  const double xi = 2.0 * kPi * static_cast<double>(k) / period;
  if (n % 2 == 0 && idx == n / 2 && order % 2 == 1) return {0.0, 0.0};
  Complex m{1.0, 0.0};
  for (int p = 0; p < order; ++p) m *= Complex{0.0, xi};
  return m;
}

inline std::vector<double> derivative(std::span<const double> f, double period, int order) {
  Spectrum spec = forward(f);
  for (std::size_t i = 0; i < spec.size(); ++i)
    spec[i] *= derivative_multiplier(i, spec.size(), period, order);
  return inverse(spec);
}

/// Applies a real, even Fourier multiplier given per signed wavenumber |k|.
template <class Symbol>
std::vector<double> apply_multiplier(std::span<const double> f, Symbol&& symbol_of_abs_k) {
  Spectrum spec = forward(f);
  const std::size_t n = spec.size();
  for (std::size_t i = 0; i < n; ++i) {
    const long k = wavenumber(i, n);
    spec[i] *= symbol_of_abs_k(static_cast<std::size_t>(k < 0 ? -k : k));
  }
  return inverse(spec);
}

/// Trigonometric interpolant of uniform samples on [0, period). Evaluation is O(N).
class TrigInterpolant {
 public:
  TrigInterpolant() = default;

  TrigInterpolant(std::span<const double> samples, double period)
      : n_(samples.size()), period_(period), coeff_(forward(samples)) {
    double biggest = 0.0;
    for (auto& c : coeff_) {
      c /= static_cast<double>(n_);
      biggest = std::max(biggest, std::abs(c));
    }
    // Modes below roundoff are skipped during evaluation.
    active_ = 0;
    for (std::size_t k = 1; k <= n_ / 2; ++k)
      if (std::abs(coeff_[k]) > 1e-14 * biggest || std::abs(coeff_[n_ - k]) > 1e-14 * biggest) active_ = k;
  }

  /// Highest wavenumber carrying a coefficient above roundoff.
  std::size_t bandwidth() const { return active_; }

  std::size_t size() const { return n_; }
  double period() const { return period_; }

  /// Value of the `order`-th derivative at x.
  double operator()(double x, int order = 0) const {
    const double theta = 2.0 * kPi * x / period_;
    const Complex step{std::cos(theta), std::sin(theta)};
    // Positive half including mode 0; negative half mirrored.
    double sum = 0.0;
    Complex phase{1.0, 0.0};
    const std::size_t half = n_ / 2;
    for (std::size_t k = 0; k <= active_; ++k) {
      if (k > 0) phase *= step;
      const double xi = 2.0 * kPi * static_cast<double>(k) / period_;
      Complex mult = deriv_factor(xi, order);
      if (n_ % 2 == 0 && k == half) {
        // Nyquist: cosine with the real part of the coefficient.
        if (order % 2 == 1) continue;
        sum += (coeff_[k] * mult * Complex{std::cos(xi * x), 0.0}).real();
        continue;
      }
      sum += (coeff_[k] * mult * phase).real();
      if (k > 0) {
        Complex mult_neg = deriv_factor(-xi, order);
        sum += (coeff_[n_ - k] * mult_neg * std::conj(phase)).real();
      }
    }
    return sum;
  }

 private:
  static Complex deriv_factor(double xi, int order) {
    Complex m{1.0, 0.0};
    for (int p = 0; p < order; ++p) m *= Complex{0.0, xi};
    return m;
  }

  std::size_t n_ = 0;
  double period_ = 1.0;
  Spectrum coeff_;
  std::size_t active_ = 0;
};

}  // namespace moebius::fourier
