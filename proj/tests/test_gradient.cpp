#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "moebius/energy.hpp"
#include "moebius/gradient.hpp"
#include "moebius/zoo.hpp"

using namespace moebius;

namespace {

std::vector<double> cos_mode(std::size_t n, double l, int k, double phase = 0.0) {
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = std::cos(2.0 * kPi * k * static_cast<double>(i) / n + phase);
  (void)l;
  return f;
}

std::vector<double> bandlimited(std::size_t n, std::mt19937_64& rng, int kmax) {
  std::normal_distribution<double> g;
  std::vector<double> f(n, g(rng));
  for (int k = 1; k <= kmax; ++k) {
    const double a = g(rng) / (k * k), b = g(rng) / (k * k);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = 2.0 * kPi * k * static_cast<double>(i) / n;
      f[i] += a * std::cos(t) + b * std::sin(t);
    }
  }
  return f;
}

double dot(const std::vector<double>& a, const std::vector<double>& b, double h) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s * h;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST(QTilde, AnnihilatesConstants) {
  const std::vector<double> f(64, 3.5);
  EXPECT_LT(max_abs(q_tilde(2.0, f, QMode::Direct)), 1e-10);
  EXPECT_LT(max_abs(q_tilde(2.0, f, QMode::Spectral)), 1e-10);
}

TEST(QTilde, DirectMatchesSpectral) {
  std::mt19937_64 rng(5);
  const std::size_t n = 128;
  const double l = 3.0;
  const auto f = bandlimited(n, rng, 12);
  const auto d = q_tilde(l, f, QMode::Direct);
  const auto s = q_tilde(l, f, QMode::Spectral);
  double diff = 0.0;
  for (std::size_t i = 0; i < n; ++i) diff = std::max(diff, std::abs(d[i] - s[i]));
  EXPECT_LT(diff, 1e-3 * max_abs(s));
}

TEST(QTilde, CosineIsEigenfunction) {
  const std::size_t n = 128;
  const double l = 2.0 * kPi;
  const auto& sym = spectral_symbol(n, l);
  for (int k : {1, 4, 9}) {
    const auto f = cos_mode(n, l, k, 0.3);
    const auto q = q_tilde(l, f, QMode::Direct);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(q[i], sym(k) * f[i], 1e-6 * std::abs(sym(k)));
  }
  EXPECT_EQ(sym(0), 0.0);
  // Kernel is even in w: the symbol is real and the same for k and -k by construction;
  // it grows linearly in k in the asymptotic window.
  for (std::size_t k = 5; k + 1 <= n / 8; ++k) EXPECT_LT(std::abs(sym(k + 1)), std::abs(sym(k)) + 2.5 * (2.0 * kPi / l));
}

TEST(QTilde, SelfAdjointAndPositive) {
  std::mt19937_64 rng(11);
  const std::size_t n = 96;
  const double l = 2.5;
  const double h = l / n;
  for (int trial = 0; trial < 3; ++trial) {
    const auto f = bandlimited(n, rng, 10);
    const auto g = bandlimited(n, rng, 10);
    const auto qf = q_tilde(l, f, QMode::Direct);
    const auto qg = q_tilde(l, g, QMode::Direct);
    const double a = dot(qf, g, h), b = dot(qg, f, h);
    EXPECT_NEAR(a, b, 1e-8 * (std::abs(a) + std::abs(b)));
    // Q = Qt o d^2 is positive: <Qt f'', f> >= 0.
    const auto f2 = fourier::derivative(f, l, 2);
    EXPECT_GE(dot(q_tilde(l, f2, QMode::Spectral), f, h), 0.0);
  }
}

TEST(QOperator, CircleRadialAndScaling) {
  const ArcLengthCurve c = zoo::circle(128);
  const Points q = q_operator(c);
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_NEAR(q[i].norm(), q[0].norm(), 1e-8);
    EXPECT_LT(std::abs(q[i].dot(c.tangent[i])), 1e-8 * q[0].norm());
  }
  const Points qr = q_operator(zoo::circle(128, 4.0));
  // Qt ~ length^-1 acting on kappa ~ length^-1.
  EXPECT_NEAR(qr[0].norm() * 16.0, q[0].norm(), 1e-8 * q[0].norm());
}

TEST(QOperator, ModesAgreeOnPerturbedCircle) {
  const ArcLengthCurve c = zoo::perturbed_circle(128, 0.05, 3);
  const Points grid = q_operator(c, QOperatorMode::Grid);
  const Points spec = q_operator(c, QOperatorMode::Spectral);
  const Points direct = q_operator(c, QOperatorMode::Direct);
  double scale = 0.0, d1 = 0.0, d2 = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    scale = std::max(scale, spec[i].norm());
    d1 = std::max(d1, (direct[i] - spec[i]).norm());
    d2 = std::max(d2, (grid[i] - spec[i]).norm());
  }
  EXPECT_LT(d1, 1e-3 * scale);
  EXPECT_LT(d2, 1e-3 * scale);
}

// On the circle the discrete values sit at the roundoff floor from N = 64 on, so the
// bounds are absolute rather than a decrease under refinement.
TEST(Remainder, CircleCancelsQ) {
  for (std::size_t n : {64u, 128u, 256u}) {
    const ArcLengthCurve c = zoo::circle(n);
    const Points q = q_operator(c);
    const auto [r1, r2] = remainder_r(c);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, (q[i] + r1[i] + r2[i]).norm());
    EXPECT_LE(worst, 1e-8);
  }
}

TEST(Remainder, ScalingAndRefinement) {
  const ArcLengthCurve c = zoo::random_fourier(128, 21, 3);
  const auto [r1, r2] = remainder_r(c);
  const auto [s1, s2] = remainder_r(scaled(c, 2.0));
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_LT((s1[i] * 4.0 - r1[i]).norm(), 1e-10 * std::max(1.0, r1[i].norm()));
    EXPECT_LT((s2[i] * 4.0 - r2[i]).norm(), 1e-10 * std::max(1.0, r2[i].norm()));
  }
  // 4x refinement: node i of the coarse grid is node 4i of the fine grid.
  const ArcLengthCurve fine = resample_arclength(c, 512);
  const auto [f1, f2] = remainder_r(fine);
  double scale = 0.0, diff = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    scale = std::max(scale, (f1[4 * i] + f2[4 * i]).norm());
    diff = std::max(diff, (f1[4 * i] + f2[4 * i] - r1[i] - r2[i]).norm());
  }
  EXPECT_LT(diff, 1e-2 * scale);
}

TEST(Gradient, NormalAndReconstructed) {
  for (const auto& c : {zoo::ellipse(128), zoo::trefoil(128), zoo::random_fourier(128, 4, 3)}) {
    const GradientField g = mobius_gradient(c, true);
    ASSERT_TRUE(g.parts.has_value());
    for (std::size_t i = 0; i < c.size(); ++i) {
      EXPECT_LE(std::abs(g.values[i].dot(c.tangent[i])), 1e-6 * g.values[i].norm() + 1e-14);
      const Vec3 sum = normal_part(g.parts->q[i] + g.parts->r1[i] + g.parts->r2[i], c.tangent[i]);
      EXPECT_LT((sum - g.values[i]).norm(), 1e-8);
    }
  }
}

TEST(Gradient, CircleIsCritical) {
  const double h256 = mobius_gradient(zoo::circle(256)).sup_norm();
  const double h512 = mobius_gradient(zoo::circle(512)).sup_norm();
  EXPECT_LE(h256, 1e-8);
  EXPECT_LE(h512, 1e-8);
}

TEST(Gradient, ScalingAndEquivariance) {
  const ArcLengthCurve c = zoo::random_fourier(128, 8, 3);
  const GradientField g = mobius_gradient(c, false);
  const GradientField s = mobius_gradient(scaled(c, 3.0), false);
  const Eigen::Matrix3d rot = Eigen::AngleAxisd(-0.4, Vec3(3, 1, 2).normalized()).toRotationMatrix();
  const GradientField m = mobius_gradient(rigidly_moved(c, rot, Vec3(-1, 7, 2)), false);
  const double scale = g.sup_norm();
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_LT((s.values[i] * 9.0 - g.values[i]).norm(), 1e-8 * scale);
    EXPECT_LT((m.values[i] - rot * g.values[i]).norm(), 1e-9 * std::max(1.0, scale));
  }
}

TEST(Gradient, FirstVariationOnEllipse) {
  const ArcLengthCurve c = zoo::ellipse(128);
  const GradientField g = mobius_gradient(c, false);
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> nd;
  const double eps = 1e-5 * c.length;
  for (int trial = 0; trial < 3; ++trial) {
    const double a = nd(rng), b = nd(rng), p = nd(rng);
    Points v(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double s = 2.0 * kPi * static_cast<double>(i) / c.size();
      const Vec3 normal(-c.tangent[i].y(), c.tangent[i].x(), 0.0);
      v[i] = (a + b * std::cos(2 * s + p) + 0.3 * std::sin(3 * s)) * normal;
    }
    auto moved = [&](double sign) {
      Points q = c.nodes;
      for (std::size_t i = 0; i < q.size(); ++i) q[i] += sign * eps * v[i];
      return mobius_energy(reparameterize_spectral(2, q, c.size())).total;
    };
    const double fd = (moved(1.0) - moved(-1.0)) / (2.0 * eps);
    const double an = l2_inner(c, g.values, v);
    EXPECT_NEAR(fd, an, 1e-3 * std::abs(an));
  }
}

TEST(TangentPoint, CircleAndCollinear) {
  const ArcLengthCurve c = zoo::circle(64);
  for (std::size_t j : {1u, 7u, 32u, 50u}) EXPECT_LT((tangent_point_curvature(c, 3, j) - c.curvature[3]).norm(), 1e-10);
  ArcLengthCurve s = c;
  s.nodes[20] = s.nodes[3] + 0.4 * s.tangent[3];
  EXPECT_EQ(tangent_point_curvature(s, 3, 20), Vec3::Zero());
  try {
    tangent_point_curvature(c, 4, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::CoincidentPoints);
  }
  s.nodes[21] = s.nodes[3];
  EXPECT_THROW(tangent_point_curvature(s, 3, 21), Error);
}

TEST(TangentPoint, EllipseCircleFit) {
  const ArcLengthCurve c = zoo::ellipse(64);
  for (auto [i, j] : std::vector<std::pair<int, int>>{{0, 10}, {5, 40}, {17, 18}}) {
    // Circle through p tangent to T passing through q: center p + rho n with |q - center| = rho.
    const Vec3 p = c.nodes[i], q = c.nodes[j], t = c.tangent[i];
    const Vec3 d = q - p;
    const Vec3 n = (d - d.dot(t) * t).normalized();
    const double rho = d.squaredNorm() / (2.0 * d.dot(n));
    const Vec3 center = p + rho * n;
    EXPECT_NEAR((q - center).norm(), rho, 1e-10 * rho);
    EXPECT_LT((tangent_point_curvature(c, i, j) - n / rho).norm(), 1e-8);
  }
}

TEST(ElResidual, CircleEllipseAndConvention) {
  const double r128 = el_residual(zoo::circle(128)).sup;
  const double r256 = el_residual(zoo::circle(256)).sup;
  EXPECT_LE(r128, 1e-8);
  EXPECT_LE(r256, 1e-8);
  const ArcLengthCurve e = zoo::ellipse(128);
  const ELResidual el = el_residual(e);
  EXPECT_GT(el.sup, 0.1);
  const GradientField g = mobius_gradient(e, false);
  double diff = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) diff = std::max(diff, (2.0 * normal_part(el.values[i], e.tangent[i]) - g.values[i]).norm());
  EXPECT_LT(diff, 1e-2 * g.sup_norm());
  // Scaling: the normal residual scales like H, as c^-2.
  const ELResidual s = el_residual(scaled(e, 2.0));
  EXPECT_NEAR(s.sup * 4.0, el.sup, 1e-8 * el.sup);
}
