#include "overdet/radial.hpp"
#include "overdet/real.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace overdet;
using overdet::testing::error_code_of;

namespace {
constexpr double kPiD = std::numbers::pi;
}

TEST(Radial, ConstantsN2) {
  const RadialSolution r = radial_constants(2);
  EXPECT_DOUBLE_EQ(r.u0_center, 1.0 / 64);
  EXPECT_DOUBLE_EQ(r.c0, 1.0 / 8);
  EXPECT_DOUBLE_EQ(r.v0_center, 1.0 / 8);
  EXPECT_DOUBLE_EQ(r.r_squared0, 0.5);
  EXPECT_DOUBLE_EQ(r.psi0_center, 0.25);
}

TEST(Radial, ConstantsN3N4) {
  const RadialSolution r3 = radial_constants(3);
  EXPECT_DOUBLE_EQ(r3.u0_center, 1.0 / 120);
  EXPECT_DOUBLE_EQ(r3.c0, 1.0 / 15);
  EXPECT_DOUBLE_EQ(r3.v0_center, 1.0 / 10);
  EXPECT_DOUBLE_EQ(r3.r_squared0, 0.6);
  EXPECT_DOUBLE_EQ(radial_constants(4).c0, 1.0 / 24);
  EXPECT_EQ(error_code_of([] { radial_constants(1); }), ErrorCode::BadDimension);
  EXPECT_EQ(error_code_of([] { radial_integrals(0); }), ErrorCode::BadDimension);
}

TEST(Radial, ProfilesSolveTheRadialProblems) {
  for (int n = 2; n <= 6; ++n) {
    const RadialSolution s = radial_constants(n);
    const double k = 1.0 / (8.0 * n * (n + 2));
    EXPECT_NEAR(s.u0(1.0), 0.0, 1e-16);
    EXPECT_NEAR(s.du0(1.0), 0.0, 1e-16);
    EXPECT_NEAR(s.psi0(1.0), 0.0, 1e-16);
    for (int i = 1; i <= 1000; ++i) {
      const double r = i / 1000.0;
      // Hand-differentiated quartic: u0' = 4kr(r^2-1), u0'' = k(12r^2-4).
      const double u1 = 4 * k * r * (r * r - 1), u2 = k * (12 * r * r - 4);
      EXPECT_NEAR(s.du0(r), u1, 1e-15);
      EXPECT_NEAR(-radial_laplacian(u1, u2, r, n), s.v0(r), 1e-14);
      // v0 is quadratic: v0' = -r/n, v0'' = -1/n, so Delta v0 = -1 and Delta^2 u0 = 1.
      EXPECT_NEAR(radial_laplacian(-r / n, -1.0 / n, r, n), -1.0, 1e-12);
      EXPECT_NEAR(s.v0(r) - (s.r_squared0 - r * r) / (2 * n), 0.0, 1e-15);
      EXPECT_NEAR(-radial_laplacian(s.dpsi0(r), -1.0 / n, r, n), 1.0, 1e-12);
    }
    // Library profile against central differences of itself.
    const double h = 1e-5;
    for (double r : {0.2, 0.5, 0.9}) {
      EXPECT_NEAR((s.u0(r + h) - s.u0(r - h)) / (2 * h), s.du0(r), 1e-10);
      EXPECT_NEAR((s.psi0(r + h) - s.psi0(r - h)) / (2 * h), s.dpsi0(r), 1e-10);
    }
  }
}

TEST(Radial, Integrals) {
  const RadialIntegrals i2 = radial_integrals(2);
  EXPECT_NEAR(i2.integral_u0, kPiD / 192, 1e-16);
  EXPECT_NEAR(i2.pucci_serrin_lhs, kPiD / 32, 1e-15);
  EXPECT_NEAR(i2.pucci_serrin_rhs, kPiD / 32, 1e-15);
  const RadialIntegrals i3 = radial_integrals(3);
  EXPECT_NEAR(i3.integral_u0, 4 * kPiD / 1575, 1e-16);
  EXPECT_NEAR(i3.pucci_serrin_lhs, 4 * kPiD / 225, 1e-15);
  for (int n = 2; n <= 8; ++n) {
    const RadialIntegrals i = radial_integrals(n);
    EXPECT_NEAR(i.pucci_serrin_lhs - i.pucci_serrin_rhs, 0.0, 1e-13) << n;
  }
}
