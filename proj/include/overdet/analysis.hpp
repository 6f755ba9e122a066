#pragma once

#include "overdet/discretization.hpp"

#include <cstdint>
#include <optional>

namespace overdet {

/// Planar problems only; the general-dimension formulas live in radial.hpp.
inline constexpr int kDimension = 2;

enum class CChoice {
  SurfaceMean,  // average of Delta u over the boundary
  Radial,       // c0 = 1 / (n (n + 2))
};

struct AnalysisOptions {
  CChoice c_choice = CChoice::SurfaceMean;
  /// Overrides R^2 = 2n v(z). Identities do not depend on it.
  std::optional<Real> r_squared;
  int z_newton_steps = 30;
  double z_gradient_tol = 1e-14;
};

struct SolutionBundle {
  Field u;
  Field psi;
  Field v;  // -Delta u
  Gradient grad_v;
  Hessian hess_v;

  Vec2 z;           // maximizer of v
  int z_iterations = 0;
  Real r_squared;   // R^2
  Real c;           // boundary constant
  CChoice c_choice = CChoice::SurfaceMean;
  Field h;          // v - Q

  BoundaryTrace laplacian_u;  // Delta u on the boundary
  BoundaryTrace dv_dnu;
  BoundaryTrace dh_dnu;

  const TensorGrid& grid() const { return u.grid(); }
  const GridPtr& grid_ptr() const { return u.grid_ptr(); }
};

/// Q = (R^2 - |x - z|^2) / (2n) on the grid.
Field quadratic_q(const GridPtr& grid, Vec2 z, const Real& r_squared);

/// Builds v, its derivatives, z, R^2, c, h and the boundary traces.
/// Throws MaxOnBoundary when v peaks on the boundary ring.
SolutionBundle derive_fields(const Field& u, const Field& psi, const AnalysisOptions& opts = {});

/// Same bundle with a different boundary constant.
SolutionBundle with_c(SolutionBundle bundle, const Real& c);

/// Surface average of Delta u.
Real surface_mean_c(const SolutionBundle& b);

struct DeficitResult {
  Field delta;                     // |D^2 v|^2 - (Delta v)^2 / n
  double min_value = 0.0;
  double hessian_h_residual = 0.0;  // sup |delta - |D^2 h|^2|
};
DeficitResult deficit(const SolutionBundle& b);

struct AuxiliaryQ {
  Field q;
  double laplacian_residual = 0.0;    // sup |Delta q - (|grad v|^2 / 2 + v / n)|
  double bilaplacian_residual = 0.0;  // sup |Delta^2 q - (|D^2 v|^2 - 1/n)|
};
AuxiliaryQ auxiliary_q(const SolutionBundle& b);

/// |grad h(z)|, evaluated on the spectral interpolant.
double gradient_h_at_z(const SolutionBundle& b);

/// Domain centroid, the alternative anchor point.
Vec2 centroid(const GridPtr& grid);

struct MeanValueCheck {
  int disks = 0;
  double max_error = 0.0;  // max |avg_disk h - h(center)|
};
/// Averages h over random interior disks (Gauss-Legendre x trapezoid).
MeanValueCheck mean_value_check(const SolutionBundle& b, int disks, std::uint64_t seed);

/// On the boundary 2n h + 2n Delta u + R^2 = |x - z|^2, so the radii about z can be
/// read off the boundary values of h. Returns the max mismatch over boundary nodes.
double boundary_distance_reconstruction_error(const SolutionBundle& b);

}  // namespace overdet
