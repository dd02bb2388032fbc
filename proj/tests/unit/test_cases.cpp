#include <gtest/gtest.h>

#include <cmath>

#include "checks.hpp"
#include "dfnvem/cases.hpp"
#include "dfnvem/errors.hpp"

using namespace dfn;

TEST(Cases, NamesRoundTrip) {
  for (const auto& n : case_names()) EXPECT_EQ(make_case(n).name, n);
  EXPECT_THROW(make_case("five-fractures"), ConfigError);
  for (auto f : {MeshFamily::cartesian, MeshFamily::triangular, MeshFamily::random, MeshFamily::coarse})
    EXPECT_EQ(parse_family(family_name(f)), f);
  EXPECT_THROW(parse_family("hexagonal"), ConfigError);
}

TEST(Cases, LevelSizesHalve) {
  const BenchmarkCase c = case_two_fractures();
  EXPECT_DOUBLE_EQ(level_size(c, 1), 0.25);
  EXPECT_DOUBLE_EQ(level_size(c, 3), 0.0625);
  EXPECT_THROW(level_size(c, 0), ConfigError);
}

TEST(Cases, ZetaMustBeASign) {
  EXPECT_NO_THROW(case_two_fractures(-1.0));
  EXPECT_THROW(case_two_fractures(2.0), ConfigError);
}

TEST(Cases, ExactFieldsSatisfyTheStrongEquations) {
  for (const BenchmarkCase& c : {case_single_fracture(), case_two_fractures(1.0), case_two_fractures(-1.0),
                                 case_intersection_flow()}) {
    const ResidualCheck r = strong_residual(c);
    EXPECT_GE(r.samples, 100) << c.name;
    EXPECT_LT(r.divergence, 1e-8) << c.name;
    EXPECT_LT(r.darcy, 1e-8) << c.name;
    EXPECT_LT(r.line_darcy, 1e-8) << c.name;
  }
}

TEST(Cases, SingleFractureClosedForm) {
  const BenchmarkCase c = case_single_fracture();
  EXPECT_EQ(c.exact.p(0, Vec3::Zero()), 0.0);
  const double s = std::sqrt(0.5);
  const double corner = s + 2 * std::sin(std::numbers::pi * s) - 3 * s * s * s;
  EXPECT_NEAR(c.exact.p(0, Vec3(1, s, s)), corner, 1e-14);
  EXPECT_NEAR(c.network.fractures[0].area(), 1.0, 1e-14);
}

TEST(Cases, TwoFracturePressureIsContinuousAndFluxBalancedOnTheTrace) {
  for (double zeta : {1.0, -1.0}) {
    const BenchmarkCase c = case_two_fractures(zeta);
    ASSERT_EQ(c.network.lines.size(), 1u);
    const double e = 1e-9;
    for (double y : {0.1, 0.37, 0.5, 0.9}) {
      const Vec3 x(0, y, 0);
      EXPECT_NEAR(c.exact.p(0, x), c.exact.p(1, x), 1e-14);
      // Flow leaving the trace into each fracture, summed over both sides.
      const double out0 = c.exact.u(0, Vec3(0, y, e)).z() - c.exact.u(0, Vec3(0, y, -e)).z();
      const double out1 = c.exact.u(1, Vec3(e, y, 0)).x() - c.exact.u(1, Vec3(-e, y, 0)).x();
      if (zeta > 0) EXPECT_NEAR(out0 + out1, 0.0, 1e-6);
      else EXPECT_NEAR(out0 + out1, 32 * y * (1 - y), 1e-6);
    }
  }
}

TEST(Cases, IntersectionFlowLineProblem) {
  const BenchmarkCase c = case_intersection_flow();
  const auto& l = c.network.lines[0];
  EXPECT_NEAR(c.exact.p_hat(0, Vec3(0, 0.5, 0)), 1.25, 1e-15);
  EXPECT_NEAR(c.exact.p_hat(0, l.a), 0.0, 1e-12);
  EXPECT_NEAR(c.exact.p_hat(0, l.b), 0.0, 1e-12);
  for (double y : {0.2, 0.6}) {
    const Vec3 x(0, y, 0);
    // -lambda_hat p_hat'' + jumps = f_hat, with the jumps carried by the Robin law on each side.
    const double out = 32 * y * (1 - y);
    EXPECT_NEAR(c.data.f_hat(0, x), 10 * c.network.lambda_hat(0) + out, 1e-12);
    for (int f : {0, 1}) {
      const double robin = c.network.lambda_tilde(0, f) * (c.exact.p_hat(0, x) - c.exact.p(f, x));
      EXPECT_NEAR(2 * robin, out / 2, 1e-12);
    }
  }
}

TEST(Cases, FourFractureNetworkLayout) {
  const BenchmarkCase c = case_four_fractures();
  const auto& net = c.network;
  ASSERT_EQ(net.fractures.size(), 4u);
  EXPECT_EQ(net.lines[check::line_between(net, 0, 1)].k_tilde, 1e-7);
  EXPECT_EQ(net.lines[check::line_between(net, 0, 2)].k_hat, 1e-10);
  EXPECT_EQ(net.lines[check::line_between(net, 0, 3)].k_hat, 1e10);
  ASSERT_EQ(c.data.point_sources.size(), 1u);
  EXPECT_LT((c.data.point_sources[0].x - Vec3(0.5, 0, 0.5)).norm(), 1e-15);
  // The fourth fracture mirrors the third under x -> 1 - x.
  for (const Vec3& v : net.fractures[2].vertices) {
    const Vec3 m(1 - v.x(), v.y(), v.z());
    double best = 1;
    for (const Vec3& w : net.fractures[3].vertices) best = std::min(best, (w - m).norm());
    EXPECT_LT(best, 1e-14);
  }
  EXPECT_EQ(c.model, Model::dc);
}
