#include "overdet/radial.hpp"
#include "overdet/solver.hpp"
#include "oracles/fd_oracle.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace overdet;
using overdet::testing::error_code_of;
using overdet::testing::solved;

namespace {

constexpr double kPiD = std::numbers::pi;

// Richardson extrapolation of a second-order quantity from grids with spacing h1 > h2.
double richardson(double f1, double h1, double f2, double h2) {
  return (h1 * h1 * f2 - h2 * h2 * f1) / (h1 * h1 - h2 * h2);
}

}  // namespace

TEST(Solver, DiskClampedPlateMatchesRadialQuartic) {
  const auto& s = solved("disk", 0.0);
  EXPECT_TRUE(s.u.converged);
  EXPECT_NEAR(to_double(interpolate(s.u.solution, {0, 0})), 1.0 / 64, 1e-10);
  const BoundaryTrace lap = trace(laplacian(s.u.solution));
  for (const Real& v : lap.values) EXPECT_NEAR(to_double(v), 0.125, 1e-10);

  const RadialSolution rad = radial_constants(2);
  for (int k = 0; k < s.grid->size(); ++k) {
    const double r = std::hypot(to_double(s.grid->x(k)), to_double(s.grid->y(k)));
    EXPECT_NEAR(to_double(s.u.solution[k]), rad.u0(r), 1e-10);
  }
}

TEST(Solver, DiskTorsion) {
  const auto& s = solved("disk", 0.0);
  EXPECT_TRUE(s.psi.converged);
  EXPECT_NEAR(to_double(interpolate(s.psi.solution, {0, 0})), 0.25, 1e-10);
  for (const Real& v : normal_derivative(s.psi.solution).values) EXPECT_NEAR(to_double(v), -0.5, 1e-10);
}

TEST(Solver, ReportFields) {
  const auto& s = solved("cos2", 0.05);
  EXPECT_EQ(s.u.problem, "clamped_biharmonic");
  EXPECT_EQ(s.psi.problem, "torsion");
  EXPECT_EQ(s.u.nr, 32);
  EXPECT_EQ(s.u.ntheta, 64);
  EXPECT_LE(s.u.interior_residual, 1e-10);
  EXPECT_EQ(s.u.boundary_residuals.size(), 2u);
  for (const NamedResidual& r : s.u.boundary_residuals) EXPECT_LE(r.value, 1e-10) << r.name;
  EXPECT_GT(s.u.condition_estimate, 1.0);
}

TEST(Solver, Cos2AgainstFiniteDifferenceOracle) {
  const auto& s = solved("cos2", 0.05);
  const fd_oracle::Shape shape{0.05, {{2, 1.0, 0.0}}};
  const fd_oracle::Solution u1 = fd_oracle::clamped(shape, 32, 128), u2 = fd_oracle::clamped(shape, 64, 256);
  const fd_oracle::Solution p1 = fd_oracle::torsion(shape, 32, 128), p2 = fd_oracle::torsion(shape, 64, 256);

  // Frozen qualitative checks from the oracle run.
  EXPECT_NEAR(to_double(s.u.solution.max()), 1.0 / 64, 0.05 / 64);
  EXPECT_NEAR(to_double(s.psi.solution.max()), 0.25, 0.05 * 0.25);
  EXPECT_NEAR(u2.max(), 1.0 / 64, 0.05 / 64);
  EXPECT_NEAR(p2.max(), 0.25, 0.05 * 0.25);
  const TensorGrid& g = *s.grid;
  for (int k = g.ntheta(); k < g.size(); ++k) {
    EXPECT_GT(to_double(s.u.solution[k]), 0.0);
    EXPECT_GT(to_double(s.psi.solution[k]), 0.0);
  }

  // Quantitative agreement with the extrapolated oracle.
  const double h1 = u1.ds, h2 = u2.ds;
  EXPECT_NEAR(to_double(interpolate(s.u.solution, {0, 0})), richardson(u1.center(), h1, u2.center(), h2), 2e-7);
  EXPECT_NEAR(to_double(interpolate(s.psi.solution, {0, 0})), richardson(p1.center(), h1, p2.center(), h2), 2e-6);
  EXPECT_NEAR(to_double(volume_integral(s.u.solution)), richardson(u1.integral(), h1, u2.integral(), h2), 2e-7);
}

TEST(Solver, Linearity) {
  const GridPtr g = TensorGrid::make(build_domain(BoundaryShape::preset("mixed", 0.04)), 24, 48);
  const Field f1 = Field::from_function(g, [](const Real& x, const Real& y) { return 1 + x * y; });
  const Field f2 = Field::from_function(g, [](const Real& x, const Real& y) { return cos(x) - y; });
  const Real a = 0.7, b = -1.3;
  const Field u1 = solve_clamped_biharmonic(g, f1).solution;
  const Field u2 = solve_clamped_biharmonic(g, f2).solution;
  const Field u12 = solve_clamped_biharmonic(g, a * f1 + b * f2).solution;
  EXPECT_LE(to_double((u12 - (a * u1 + b * u2)).sup_norm()), 1e-11);
}

TEST(Solver, PositivityAndUniformBounds) {
  for (const std::string& name : BoundaryShape::preset_names()) {
    for (double eps : {0.02, 0.05}) {
      const auto& s = solved(name, eps);
      EXPECT_GE(to_double(s.u.solution.min()), 0.0) << name;
      EXPECT_GE(to_double(s.psi.solution.min()), 0.0) << name;
      EXPECT_LE(to_double(s.u.solution.sup_norm()), 0.02) << name;
      EXPECT_LE(to_double(s.psi.solution.sup_norm()), 0.3) << name;
    }
  }
}

TEST(Solver, ManufacturedRadialQuartic) {
  const DomainGeometry disk = build_domain(BoundaryShape::disk());
  ManufacturedProblem p{"u0",
                        [](const GridPtr& g) {
                          return Field::from_function(g, [](const Real& x, const Real& y) {
                            const Real q = 1 - x * x - y * y;
                            return q * q / 64;
                          });
                        },
                        [](const GridPtr& g) { return Field::constant(g, 1); }};
  const auto rows = manufactured_convergence(disk, p, {{32, 64}});
  EXPECT_LE(rows[0].sup_error, 1e-10);
}

TEST(Solver, ManufacturedOddQuartic) {
  // u* = (1 - r^2)^2 x, Delta^2 u* = 192 x.
  const DomainGeometry disk = build_domain(BoundaryShape::disk());
  ManufacturedProblem p{"odd",
                        [](const GridPtr& g) {
                          return Field::from_function(g, [](const Real& x, const Real& y) {
                            const Real q = 1 - x * x - y * y;
                            return q * q * x;
                          });
                        },
                        [](const GridPtr& g) {
                          return Field::from_function(g, [](const Real& x, const Real&) { return 192 * x; });
                        }};
  const auto rows = manufactured_convergence(disk, p, {{32, 64}});
  EXPECT_LE(rows[0].sup_error, 1e-8);
}

TEST(Solver, ManufacturedExponentialOnDisk) {
  // u* = (1 - r^2)^2 e^x; Delta^2 u* = e^x (x^4 + 16x^3 + 2x^2y^2 + 78x^2 + 16xy^2 + 112x + y^4 + 46y^2 + 33).
  const DomainGeometry disk = build_domain(BoundaryShape::disk());
  ManufacturedProblem p{"exp",
                        [](const GridPtr& g) {
                          return Field::from_function(g, [](const Real& x, const Real& y) {
                            const Real q = 1 - x * x - y * y;
                            return q * q * exp(x);
                          });
                        },
                        [](const GridPtr& g) {
                          return Field::from_function(g, [](const Real& x, const Real& y) {
                            const Real x2 = x * x, y2 = y * y;
                            return exp(x) * (x2 * x2 + 16 * x2 * x + 2 * x2 * y2 + 78 * x2 + 16 * x * y2 + 112 * x +
                                             y2 * y2 + 46 * y2 + 33);
                          });
                        }};
  const auto rows = manufactured_convergence(disk, p, {{8, 16}, {16, 32}, {32, 64}});
  EXPECT_TRUE(converges_spectrally(rows));
  EXPECT_GT(rows[0].sup_error, 1e-9);  // coarse level is genuinely under-resolved
  EXPECT_LE(rows[2].sup_error, 1e-11);
}

TEST(Solver, ManufacturedLevelFunctionOnCos3) {
  const DomainGeometry g = build_domain(BoundaryShape::preset("cos3", 0.02));
  const auto rows = manufactured_convergence(g, level_function_squared(g), {{16, 32}, {32, 64}});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_TRUE(rows[1].sup_error <= 1e-11 || rows[0].sup_error / rows[1].sup_error >= 100.0);
  EXPECT_TRUE(converges_spectrally(rows));
}

TEST(Solver, ConvergenceCriterionLogic) {
  EXPECT_TRUE(converges_spectrally({{8, 16, 1e-3, 0}, {16, 32, 1e-6, 0}, {32, 64, 1e-14, 0}}));
  EXPECT_FALSE(converges_spectrally({{8, 16, 1e-3, 0}, {16, 32, 1e-4, 0}}));
  // Below the floor, stagnation is accepted.
  EXPECT_TRUE(converges_spectrally({{8, 16, 1e-3, 0}, {16, 32, 1e-12, 0}, {32, 64, 2e-12, 0}}));
}

TEST(Solver, UsageErrors) {
  const GridPtr g = TensorGrid::make(build_domain(BoundaryShape::disk()), 16, 32);
  SolveOptions o;
  o.max_escalations = 1;
  EXPECT_EQ(error_code_of([&] { solve_clamped_biharmonic(g, Field::constant(g, 1), o); }), ErrorCode::UsageError);
  SolveOptions strict;
  strict.tolerance = 1e-60;
  strict.throw_if_unconverged = true;
  EXPECT_EQ(error_code_of([&] { solve_clamped_biharmonic(g, Real(1), strict); }), ErrorCode::Unconverged);
}
