#pragma once

// Shared fixtures: solved bundles are cached per (shape, eps, grid) for the
// lifetime of a test binary.

#include "overdet/analysis.hpp"
#include "overdet/solver.hpp"

#include <map>
#include <memory>
#include <string>
#include <tuple>

namespace overdet::testing {

struct Solved {
  GridPtr grid;
  SolveReport u;
  SolveReport psi;
  SolutionBundle bundle;
};

inline const Solved& solved(const std::string& preset, double eps, int nr = 32, int ntheta = 64) {
  static std::map<std::tuple<std::string, double, int, int>, std::unique_ptr<Solved>> cache;
  auto& slot = cache[{preset, eps, nr, ntheta}];
  if (!slot) {
    const BoundaryShape shape = preset == "disk" ? BoundaryShape::disk() : BoundaryShape::preset(preset, eps);
    GridPtr grid = TensorGrid::make(build_domain(shape), nr, ntheta);
    SolveReport u = solve_clamped_biharmonic(grid);
    SolveReport psi = solve_torsion(grid);
    SolutionBundle b = derive_fields(u.solution, psi.solution);
    slot = std::make_unique<Solved>(Solved{grid, std::move(u), std::move(psi), std::move(b)});
  }
  return *slot;
}

inline const SolutionBundle& bundle(const std::string& preset, double eps, int nr = 32, int ntheta = 64) {
  return solved(preset, eps, nr, ntheta).bundle;
}

template <class F>
ErrorCode error_code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::CheckFailed;  // sentinel: nothing thrown
}

}  // namespace overdet::testing
