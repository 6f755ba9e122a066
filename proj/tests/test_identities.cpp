#include "overdet/identities.hpp"
#include "overdet/radial.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace overdet;
using overdet::testing::bundle;
using overdet::testing::error_code_of;

namespace {

constexpr double kPiD = std::numbers::pi;

std::vector<Vec2> random_interior_points(const DomainGeometry& g, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vec2> out;
  for (int i = 0; i < count; ++i) out.push_back(g.map(0.7 * std::sqrt(unit(rng)), 2 * kPiD * unit(rng)));
  return out;
}

}  // namespace

TEST(Identities, PucciSerrinOnDisk) {
  const SolutionBundle& b = bundle("disk", 0.0);
  for (Vec2 z : {Vec2{0, 0}, Vec2{0.3, -0.2}, Vec2{-0.6, 0.1}}) {
    const IdentityReport r = pucci_serrin(b, z);
    EXPECT_EQ(r.name, "pucci_serrin");
    EXPECT_NEAR(r.lhs, kPiD / 32, 1e-10);
    EXPECT_NEAR(r.rhs, kPiD / 32, 1e-10);
  }
}

TEST(Identities, MainIdentityOnDisk) {
  const SolutionBundle& b = bundle("disk", 0.0);
  for (double c : {0.125, 0.0}) {
    const IdentityReport r = main_identity(b, {0, 0}, c);
    EXPECT_NEAR(r.lhs, 0.0, 1e-12);
    EXPECT_NEAR(r.rhs, 0.0, 1e-12);
    EXPECT_TRUE(std::isfinite(r.rel_residual));
  }
  const IdentityReport h = harmonic_form(b);
  EXPECT_NEAR(h.lhs, 0.0, 1e-12);
  EXPECT_NEAR(h.rhs, 0.0, 1e-12);
}

TEST(Identities, ZeroFluxOnDisk) {
  const SolutionBundle& b = bundle("disk", 0.0);
  EXPECT_NEAR(zero_flux(b, {0, 0}), 0.0, 1e-12);
  EXPECT_NEAR(zero_flux(b, {0.3, 0}), 0.0, 1e-12);
}

TEST(Identities, Cos2Residuals) {
  const SolutionBundle& b = bundle("cos2", 0.05);
  EXPECT_LE(pucci_serrin(b, b.z).rel_residual, 1e-7);
  const IdentityReport m = main_identity(b, b.z, b.c);
  EXPECT_GT(m.lhs, 0.0);
  EXPECT_GT(m.rhs, 0.0);
  EXPECT_LE(m.rel_residual, 1e-6);
  const IdentityReport h = harmonic_form(b);
  EXPECT_LE(h.rel_residual, 1e-6);
  EXPECT_LE(std::abs(h.lhs - m.lhs), 1e-10);
  EXPECT_LE(std::abs(zero_flux(b, b.z)), 1e-9);
}

TEST(Identities, RhsIndependentOfZAndC) {
  for (const std::string& name : BoundaryShape::preset_names()) {
    const SolutionBundle& b = bundle(name, 0.05);
    const double ref = main_identity(b, b.z, b.c).rhs;
    for (Vec2 z : random_interior_points(b.grid().geometry(), 5, 99)) {
      EXPECT_NEAR(main_identity(b, z, b.c).rhs, ref, 1e-9) << name;
      EXPECT_LE(std::abs(zero_flux(b, z)), 1e-9) << name;
      EXPECT_NEAR(pucci_serrin(b, z).rhs, pucci_serrin(b, b.z).rhs, 1e-9) << name;
    }
    const Real c0 = radial_constants(2).c0;
    for (const Real& c : {Real(0), surface_mean_c(b), c0, Real(1)}) {
      EXPECT_NEAR(main_identity(b, b.z, c).rhs, ref, 1e-9) << name;
    }
    const MainIdentityCheck chk = main_identity_checked(b, centroid(b.grid_ptr()), c0);
    EXPECT_LE(chk.lhs_spread, 1e-10);
    EXPECT_GE(chk.primary.lhs, -1e-10);
  }
}

TEST(Identities, ScaleFloorAndHash) {
  const SolutionBundle& b = bundle("cos2", 0.05);
  const double expected = 1e-12 * 6 * b.grid().geometry().area() * to_double(b.u.sup_norm());
  EXPECT_NEAR(identity_scale_floor(b), expected, 1e-25);
  const IdentityReport a = main_identity(b, b.z, b.c);
  EXPECT_EQ(a.scale_floor, identity_scale_floor(b));
  EXPECT_EQ(a.inputs_hash, main_identity(b, b.z, b.c).inputs_hash);
  EXPECT_NE(a.inputs_hash, main_identity(b, {0.1, 0.1}, b.c).inputs_hash);
  EXPECT_NE(a.inputs_hash, main_identity(b, b.z, 0.2).inputs_hash);
  EXPECT_EQ(a.inputs_hash.size(), 16u);
}

TEST(Identities, ResidualsShrinkWithResolution) {
  // Each doubling shrinks the residual 100-fold unless it is already at roundoff.
  const SolutionBundle& coarse = bundle("cos3", 0.03, 16, 32);
  const SolutionBundle& fine = bundle("cos3", 0.03, 32, 64);
  const auto shrinks = [](double a, double b) { return b <= 1e-13 || a / b >= 100.0; };
  EXPECT_TRUE(shrinks(pucci_serrin(coarse, coarse.z).rel_residual, pucci_serrin(fine, fine.z).rel_residual));
  EXPECT_TRUE(shrinks(main_identity(coarse, coarse.z, coarse.c).rel_residual,
                      main_identity(fine, fine.z, fine.c).rel_residual));
  EXPECT_TRUE(shrinks(harmonic_form(coarse).rel_residual, harmonic_form(fine).rel_residual));
}

TEST(Identities, AnchorMustBeInterior) {
  const SolutionBundle& b = bundle("cos2", 0.05);
  EXPECT_EQ(error_code_of([&] { pucci_serrin(b, {1.5, 0}); }), ErrorCode::NotInterior);
  EXPECT_EQ(error_code_of([&] { main_identity(b, {0, 1.2}, b.c); }), ErrorCode::NotInterior);
}
