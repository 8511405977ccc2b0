#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <vector>

#include "moebius/energy.hpp"
#include "moebius/zoo.hpp"

using namespace moebius;

namespace {

// Circle integrand in the angle difference, continuous at 0 with value 1/12.
double circle_density(double delta) {
  delta = std::remainder(delta, 2.0 * kPi);
  const double a = std::abs(delta);
  if (a < 1e-4) return 1.0 / 12.0 + a * a / 240.0;
  const double d = std::min(a, 2.0 * kPi - a);
  return 1.0 / (4.0 * std::sin(0.5 * a) * std::sin(0.5 * a)) - 1.0 / (d * d);
}

// Double integral over the cells [theta_a - h/2, theta_a + h/2] of the given unit-circle
// nodes, with four midpoint subnodes per cell.
double circle_cells_oracle(const std::vector<long>& offsets, std::size_t n) {
  const double h = 2.0 * kPi / static_cast<double>(n);
  std::vector<double> pts;
  for (long o : offsets)
    for (double sub : {-0.375, -0.125, 0.125, 0.375}) pts.push_back((static_cast<double>(o) + sub) * h);
  const double w = h / 4.0;
  double total = 0.0;
  for (double a : pts)
    for (double b : pts) total += circle_density(a - b);
  return total * w * w;
}

// Independent O(M^2) quadrature of the ellipse energy in the angle parameter.
double ellipse_bruteforce(double a, double b, std::size_t m) {
  std::vector<Vec3> p(m);
  std::vector<double> speed(m), s(m + 1, 0.0);
  const double dt = 2.0 * kPi / static_cast<double>(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double t = dt * static_cast<double>(i);
    p[i] = Vec3(a * std::cos(t), b * std::sin(t), 0.0);
    speed[i] = std::hypot(a * std::sin(t), b * std::cos(t));
  }
  // Cumulative arclength by Gauss-Kronrod per cell.
  for (std::size_t i = 0; i < m; ++i) {
    const double t0 = dt * static_cast<double>(i);
    s[i + 1] = s[i] + boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
                          [&](double t) { return std::hypot(a * std::sin(t), b * std::cos(t)); }, t0, t0 + dt, 0, 1e-14);
  }
  const double l = s[m];
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) continue;
      const double ds = std::abs(s[i] - s[j]);
      const double d = std::min(ds, l - ds);
      row += (1.0 / (p[i] - p[j]).squaredNorm() - 1.0 / (d * d)) * speed[j];
    }
    total += row * speed[i];
  }
  return total * dt * dt;
}

}  // namespace

TEST(Energy, CircleMatchesClosedFormOracle) {
  const double oracle = 2.0 * kPi * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                                        [](double w) { return 2.0 * circle_density(w); }, 0.0, kPi, 15, 1e-14);
  EXPECT_NEAR(oracle, 4.0, 1e-10);
  EXPECT_NEAR(mobius_energy(zoo::circle(512)).total, oracle, 1e-3);
}

TEST(Energy, CircleConvergesWithRefinement) {
  double prev = 1.0;
  for (std::size_t n : {16u, 32u, 64u}) {
    const double err = std::abs(mobius_energy(zoo::circle(n)).total - 4.0);
    EXPECT_LT(err, prev / 4.0);
    prev = err;
  }
}

TEST(Energy, EllipseMatchesBruteForce) {
  const double e = mobius_energy(zoo::ellipse(512, 2.0, 1.0)).total;
  const double oracle = ellipse_bruteforce(2.0, 1.0, 4096);
  EXPECT_NEAR(e / oracle, 1.0, 1e-3);
}

TEST(Energy, ScaleAndRigidInvariance) {
  const ArcLengthCurve c = zoo::random_fourier(128, 3, 3);
  const double e = mobius_energy(c).total;
  for (double f : {0.5, 2.0, 10.0}) EXPECT_NEAR(mobius_energy(scaled(c, f)).total, e, 1e-12 * e);
  const Eigen::Matrix3d rot = Eigen::AngleAxisd(1.1, Vec3(0, 1, 1).normalized()).toRotationMatrix();
  EXPECT_NEAR(mobius_energy(rigidly_moved(c, rot, Vec3(4, 5, 6))).total, e, 1e-12 * e);
}

TEST(Energy, LowerBound) {
  for (const auto& c : {zoo::ellipse(128), zoo::trefoil(128), zoo::hairpin(128), zoo::perturbed_circle(128)})
    EXPECT_GE(mobius_energy(c).total, 4.0 - 10.0 / (128.0 * 128.0));
}

TEST(Energy, ChordCollapseIsNonEmbedded) {
  ArcLengthCurve c = zoo::circle(32);
  c.nodes[5] = c.nodes[9];
  try {
    mobius_energy(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonEmbedded);
  }
}

TEST(BallEnergy, FullAndEmptyRestriction) {
  const ArcLengthCurve c = zoo::trefoil(128);
  const double total = mobius_energy(c).total;
  const Vec3 x0 = centroid(c.nodes) + Vec3(0.5, 0, 0);
  EXPECT_NEAR(localized_energy_ball(c, x0, diameter(c.nodes) + 0.5 + 1e-9), total, 1e-12 * total);
  EXPECT_EQ(localized_energy_ball(c, Vec3(100, 0, 0), 1.0), 0.0);
  EXPECT_THROW(localized_energy_ball(c, x0, 0.0), Error);
}

TEST(BallEnergy, CircleMatchesCellOracle) {
  const std::size_t n = 256;
  const ArcLengthCurve c = zoo::circle(n);
  const double value = localized_energy_ball(c, c.nodes[0], 0.5);
  std::vector<long> inside;
  for (long o = -static_cast<long>(n) / 2; o < static_cast<long>(n) / 2; ++o)
    if ((c.nodes[(o + n) % n] - c.nodes[0]).norm() < 0.5) inside.push_back(o);
  EXPECT_NEAR(value / circle_cells_oracle(inside, n), 1.0, 1e-3);
}

TEST(IntrinsicEnergy, Examples) {
  const ArcLengthCurve c = zoo::ellipse(128);
  const double total = mobius_energy(c).total;
  EXPECT_NEAR(localized_energy_intrinsic(c, 5, 0.5 * c.length), total, 1e-12 * total);
  const double h = c.spacing();
  // Below h/2 only the center's diagonal cell remains: its analytic limit |kappa|^2 / 12.
  EXPECT_NEAR(localized_energy_intrinsic(c, 5, 0.4 * h), h * h * c.curvature[5].squaredNorm() / 12.0, 1e-15);
  EXPECT_THROW(localized_energy_intrinsic(c, 0, -1.0), Error);
}

TEST(IntrinsicEnergy, CircleMatchesCellOracle) {
  const std::size_t n = 256;
  const ArcLengthCurve c = zoo::circle(n);
  const long m = 32;  // r = pi/4 = 32 h
  std::vector<long> window;
  for (long o = -m; o <= m; ++o) window.push_back(o);
  EXPECT_NEAR(localized_energy_intrinsic(c, 0, kPi / 4.0) / circle_cells_oracle(window, n), 1.0, 1e-3);
}

TEST(IntrinsicEnergy, MonotoneInRadius) {
  const ArcLengthCurve c = zoo::hairpin(128);
  double prev = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double v = localized_energy_intrinsic(c, 17, 0.5 * c.length * k / 200.0);
    EXPECT_GE(v, prev - 1e-15);
    prev = v;
  }
}

TEST(CutoffEnergy, Examples) {
  const ArcLengthCurve c = zoo::circle(256);
  const double total = mobius_energy(c).total;
  CutoffFunction everywhere{Vec3::Zero(), std::numeric_limits<double>::infinity()};
  EXPECT_NEAR(localized_energy_cutoff(c, everywhere), total, 1e-12 * total);
  EXPECT_EQ(localized_energy_cutoff(c, CutoffFunction{Vec3(50, 0, 0), 1.0}), 0.0);

  for (std::size_t node : {0u, 37u, 200u}) {
    const CutoffFunction phi{c.nodes[node], 1.0};
    const double e1 = localized_energy_ball(c, c.nodes[node], 1.0);
    const double e2 = localized_energy_ball(c, c.nodes[node], 2.0);
    const double ephi = localized_energy_cutoff(c, phi);
    EXPECT_LE(e1, ephi);
    // Grid tolerance: one row of the double sum, h * E / l per unit of density.
    EXPECT_LE(ephi, e2 + 4.0 * c.spacing() * total / c.length);
  }
}

TEST(CutoffEnergy, ProfileShape) {
  EXPECT_EQ(CutoffFunction::profile(0.3), 1.0);
  EXPECT_EQ(CutoffFunction::profile(2.5), 0.0);
  double prev = 1.0;
  for (int k = 0; k <= 100; ++k) {
    const double v = CutoffFunction::profile(1.0 + k / 100.0);
    EXPECT_LE(v, prev);
    EXPECT_GE(v, 0.0);
    prev = v;
  }
}

TEST(SupLocalized, CircleSymmetry) {
  const ArcLengthCurve c = zoo::circle(128);
  for (double r : {0.2, 0.7, 2.0}) {
    const LocalizedValue best = sup_localized(c, r, LocalKind::Intrinsic);
    for (std::size_t i = 0; i < c.size(); i += 9)
      EXPECT_NEAR(localized_energy_intrinsic(c, i, r), best.value, 1e-6);
  }
  const LocalizedValue ball = sup_localized(c, 0.5, LocalKind::BallExtrinsic);
  for (std::size_t i = 0; i < c.size(); i += 9) EXPECT_NEAR(localized_energy_ball(c, c.nodes[i], 0.5), ball.value, 1e-6);
}

TEST(SupLocalized, HairpinArgmax) {
  const ArcLengthCurve c = zoo::hairpin(256, 0.1);
  const double r = 0.3;
  const LocalizedValue best = sup_localized(c, r, LocalKind::Intrinsic);
  // Exhaustive scan oracle.
  double top = -1.0;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double v = localized_energy_intrinsic(c, i, r);
    if (v > top) {
      top = v;
      arg = i;
    }
  }
  EXPECT_EQ(best.node, arg);
  EXPECT_DOUBLE_EQ(best.value, top);
  // The maximizer sits where two far-apart arcs come close: some node outside its
  // intrinsic window lies within the hairpin gap scale.
  double closest = 1e9;
  for (std::size_t j = 0; j < c.size(); ++j)
    if (geodesic_distance(c, arg, j) > r) closest = std::min(closest, (c.nodes[j] - c.nodes[arg]).norm());
  EXPECT_LT(closest, 0.5);
}

TEST(SupLocalized, FullWindowIsTotal) {
  const ArcLengthCurve c = zoo::trefoil(64);
  const double total = mobius_energy(c).total;
  EXPECT_NEAR(sup_localized(c, c.length, LocalKind::Intrinsic).value, total, 1e-12 * total);
}

TEST(ConcentrationRadius, CircleHalfEnergy) {
  const ArcLengthCurve c = zoo::circle(128);
  const double r = concentration_radius(c, 2.0);
  // Dense r-grid oracle.
  double found = 0.0;
  for (int k = 1; k <= 4000; ++k) {
    const double rr = 0.5 * c.length * k / 4000.0;
    if (localized_energy_intrinsic(c, 0, rr) >= 2.0) {
      found = rr;
      break;
    }
  }
  EXPECT_NEAR(r / found, 1.0, 1e-2);
  const double v = sup_localized(c, r, LocalKind::Intrinsic).value;
  EXPECT_GE(v, 2.0 * (1 - 1e-2));
  EXPECT_LE(v, 2.0 * (1 + 1e-2));
}

TEST(ConcentrationRadius, LimitsAndScaling) {
  const ArcLengthCurve c = zoo::ellipse(64);
  const double total = mobius_energy(c).total;
  EXPECT_NEAR(concentration_radius(c, total - 1e-6) / (0.5 * c.length), 1.0, 1e-2);
  const double r = concentration_radius(c, 1.0);
  EXPECT_NEAR(concentration_radius(scaled(c, 3.0), 1.0) / (3.0 * r), 1.0, 1e-2);
  for (double eps : {0.0, -1.0, total, total + 1.0}) {
    try {
      concentration_radius(c, eps);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::EpsilonOutOfRange);
    }
  }
}
