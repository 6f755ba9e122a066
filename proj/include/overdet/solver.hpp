#pragma once

#include "overdet/discretization.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace overdet {

struct SolveOptions {
  /// Certification threshold for the recomputed interior and boundary residuals.
  double tolerance = 1e-10;
  /// Iterative-refinement sweeps (double LU, quad-precision residual).
  int max_refinement_steps = 10;
  /// On an uncertified solve, retry at doubled resolution up to this many times.
  int max_escalations = 0;
  /// Throw Unconverged instead of returning an unconverged report.
  bool throw_if_unconverged = false;
};

struct NamedResidual {
  std::string name;
  double value = 0.0;
};

struct SolveReport {
  std::string problem;
  Field solution;
  /// Sup over the interior collocation nodes of the recomputed PDE residual.
  double interior_residual = 0.0;
  std::vector<NamedResidual> boundary_residuals;
  double condition_estimate = 0.0;
  int nr = 0;
  int ntheta = 0;
  int refinement_steps = 0;
  bool converged = false;
};

/// Delta^2 u = rhs in Omega, u = du/dnu = 0 on the boundary.
SolveReport solve_clamped_biharmonic(const GridPtr& grid, const Field& rhs, const SolveOptions& opts = {});
SolveReport solve_clamped_biharmonic(const GridPtr& grid, Real rhs = 1, const SolveOptions& opts = {});

/// -Delta psi = 1 in Omega, psi = 0 on the boundary.
SolveReport solve_torsion(const GridPtr& grid, const SolveOptions& opts = {});

struct ConvergenceRow {
  int nr = 0;
  int ntheta = 0;
  double sup_error = 0.0;
  double interior_residual = 0.0;
};

struct ManufacturedProblem {
  std::string name;
  /// Exact solution sampled on a grid; must vanish to second order on the boundary.
  std::function<Field(const GridPtr&)> exact;
  /// Delta^2 of the exact solution. If empty it is formed by the discrete
  /// operators at the reference resolution and interpolated onto each grid.
  std::function<Field(const GridPtr&)> bilaplacian;
};

/// The default manufactured solution (1 - s^2)^2 in the disk-map coordinates.
ManufacturedProblem level_function_squared(const DomainGeometry& geometry);

/// Solves the manufactured problem at each resolution and reports the sup error.
std::vector<ConvergenceRow> manufactured_convergence(const DomainGeometry& geometry, const ManufacturedProblem& problem,
                                                     const std::vector<std::pair<int, int>>& resolutions,
                                                     std::pair<int, int> reference = {64, 128});

/// True when every doubling reduces the error by `factor` or the finer error is below `floor`.
bool converges_spectrally(const std::vector<ConvergenceRow>& rows, double factor = 100.0, double floor = 1e-11);

}  // namespace overdet
