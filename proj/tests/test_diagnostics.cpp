#include <gtest/gtest.h>

#include <cmath>

#include "moebius/diagnostics.hpp"
#include "moebius/energy.hpp"
#include "moebius/zoo.hpp"

using namespace moebius;

TEST(Distortion, CircleAndBound) {
  EXPECT_NEAR(distortion(zoo::circle(256)), kPi / 2.0, 1e-3);
  for (const auto& c : {zoo::ellipse(128), zoo::trefoil(128), zoo::hairpin(128), zoo::random_fourier(128, 1, 3)}) {
    const double d = distortion(c);
    EXPECT_GE(d, 1.0);
    EXPECT_LE(d, distortion_bound(mobius_energy(c).total));
    EXPECT_NEAR(distortion(scaled(c, 7.0)), d, 1e-12 * d);
  }
}

TEST(MThreeHalves, RadiusHairpinAndRigid) {
  const double m1 = m_threehalves(zoo::circle(128, 1.0));
  const double m2 = m_threehalves(zoo::circle(128, 2.0));
  const double m4 = m_threehalves(zoo::circle(128, 4.0));
  EXPECT_GT(m1, m2);
  EXPECT_GT(m2, m4);
  EXPECT_NEAR(m_threehalves(zoo::circle(256, 2.0)) / m2, 1.0, 1e-2);

  const ArcLengthCurve hp = zoo::hairpin(128, 0.1);
  EXPECT_GT(m_threehalves(hp), m_threehalves(zoo::circle(128, hp.length / (2.0 * kPi))));

  const ArcLengthCurve c = zoo::trefoil(128);
  const Eigen::Matrix3d rot = Eigen::AngleAxisd(0.9, Vec3(1, 0, 1).normalized()).toRotationMatrix();
  const double m = m_threehalves(c);
  EXPECT_NEAR(m_threehalves(rigidly_moved(c, rot, Vec3(1, 2, 3))), m, 1e-12 * m);
  EXPECT_THROW(m_threehalves(c, 0.0), Error);
}

TEST(Besov, ConstantsScalingAndRefinement) {
  const std::size_t n = 128;
  const double l = 2.0 * kPi;
  std::vector<double> c(n, 2.0), f(n), f2(2 * n);
  for (std::size_t i = 0; i < n; ++i) f[i] = std::sin(3.0 * l * i / n);
  for (std::size_t i = 0; i < 2 * n; ++i) f2[i] = std::sin(3.0 * l * i / (2 * n));
  BesovParams full{0.5, 2.0, 2.0, 0.5 * l, 0};
  EXPECT_EQ(besov_seminorm(c, l, full), 0.0);
  const double v = besov_seminorm(f, l, full);
  std::vector<double> twice(f);
  for (auto& x : twice) x *= 2.0;
  EXPECT_NEAR(besov_seminorm(twice, l, full), 2.0 * v, 1e-12 * v);
  EXPECT_NEAR(besov_seminorm(f2, l, full) / v, 1.0, 1e-2);
}

TEST(Besov, ParamErrors) {
  std::vector<double> f(32, 1.0);
  for (BesovParams p : {BesovParams{0.0, 2, 2, 1, 0}, BesovParams{1.0, 2, 2, 1, 0}, BesovParams{0.5, 0.5, 2, 1, 0},
                        BesovParams{0.5, 2, 0.9, 1, 0}}) {
    try {
      besov_seminorm(f, 1.0, p);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::ParamError);
    }
  }
}

TEST(Clearance, CircleAndEllipse) {
  const ArcLengthCurve c = zoo::circle(128);
  for (std::size_t i : {0u, 40u}) {
    const ClearanceResult r = osculating_clearance(c, i);
    EXPECT_EQ(r.verdict, Clearance::ContainsCurve);
    EXPECT_NEAR(r.margin, 0.0, 1e-8);
  }
  const ArcLengthCurve e = zoo::ellipse(128);
  const ClearanceResult major = osculating_clearance(e, 0);  // node 0: end of the major axis
  EXPECT_EQ(major.verdict, Clearance::Disjoint);
  EXPECT_GE(major.margin, -1e-8);
  const ClearanceResult minor = osculating_clearance(e, 32);  // quarter turn: minor vertex
  EXPECT_NEAR(e.nodes[32].x(), 0.0, 1e-10);
  EXPECT_EQ(minor.verdict, Clearance::ContainsCurve);
  EXPECT_THROW(osculating_clearance(zoo::trefoil(64), 0), Error);
}

TEST(Clearance, FlatPoint) {
  ArcLengthCurve c = zoo::circle(64);
  c.curvature[3] = Vec3::Zero();
  try {
    osculating_clearance(c, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::FlatPoint);
  }
}

TEST(Diagnose, RoundnessImpliesNearFour) {
  for (const auto& c : {zoo::circle(128), zoo::perturbed_circle(128, 0.001, 3), zoo::ellipse(128), zoo::trefoil(128)}) {
    const DiagnosticsReport r = diagnose(c, true);
    if (r.round) EXPECT_LT(std::abs(mobius_energy(c).total - 4.0), 0.1);
    EXPECT_GE(r.distortion, 1.0);
    EXPECT_GT(r.m_threehalves, 0.0);
    if (c.dim == 2) EXPECT_EQ(r.clearance.size(), c.size());
  }
  EXPECT_TRUE(diagnose(zoo::circle(64)).round);
  EXPECT_FALSE(diagnose(zoo::ellipse(64)).round);
}
