#include "overdet/solver.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <optional>

namespace overdet {

namespace {

enum class Problem { ClampedBiharmonic, Torsion };

using SparseRows = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Matrices of the first-order physical operators d/dx, d/dy, i.e. of dx() and
// dy() on the grid rounded to double. Each row couples one radial line and one ring.
void assemble_first_order(const TensorGrid& g, SparseRows& Dx, SparseRows& Dy) {
  const int P = g.radial_count(), N = g.ntheta(), n = g.size();
  std::vector<Eigen::Triplet<double>> tx_list, ty_list;
  tx_list.reserve(static_cast<std::size_t>(n) * (2 * P + N));
  ty_list.reserve(static_cast<std::size_t>(n) * (2 * P + N));
  const auto& A = g.radial_same();
  const auto& B = g.radial_antipodal();
  const auto& F = g.fourier();
  for (int i = 0; i < P; ++i) {
    for (int l = 0; l < N; ++l) {
      const int row = g.index(i, l);
      const double sx = to_double(g.sx()[row]), sy = to_double(g.sy()[row]);
      const double tx = to_double(g.tx()[row]), ty = to_double(g.ty()[row]);
      for (int j = 0; j < P; ++j) {
        const double a = to_double(A[i * P + j]);
        const double b = to_double(B[i * P + j]);
        tx_list.emplace_back(row, g.index(j, l), sx * a);
        tx_list.emplace_back(row, g.index(j, g.antipode(l)), sx * b);
        ty_list.emplace_back(row, g.index(j, l), sy * a);
        ty_list.emplace_back(row, g.index(j, g.antipode(l)), sy * b);
      }
      for (int m = 0; m < N; ++m) {
        const double f = to_double(F[l * N + m]);
        tx_list.emplace_back(row, g.index(i, m), tx * f);
        ty_list.emplace_back(row, g.index(i, m), ty * f);
      }
    }
  }
  Dx.resize(n, n);
  Dy.resize(n, n);
  Dx.setFromTriplets(tx_list.begin(), tx_list.end());
  Dy.setFromTriplets(ty_list.begin(), ty_list.end());
}

// Columns spanning the Nyquist modes, one per ring, orthonormal.
Eigen::MatrixXd nyquist_basis(const TensorGrid& g) {
  const int N = g.ntheta();
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(g.size(), g.radial_count());
  const double a = 1.0 / std::sqrt(static_cast<double>(N));
  for (int i = 0; i < g.radial_count(); ++i) {
    for (int l = 0; l < N; ++l) E(g.index(i, l), i) = (l % 2) ? -a : a;
  }
  return E;
}

// With F the Nyquist filter, the composed operator is F D F D = F (D D - (D E)(E^T D)).
Eigen::MatrixXd filtered_square(const TensorGrid& g, const SparseRows& D, const Eigen::MatrixXd& E) {
  Eigen::MatrixXd M = Eigen::MatrixXd(D * D);
  const Eigen::MatrixXd DE = D * E;
  const Eigen::MatrixXd ED = E.transpose() * D;
  M.noalias() -= DE * ED;
  const Eigen::MatrixXd EM = E.transpose() * M;
  M.noalias() -= E * EM;
  return M;
}

Eigen::MatrixXd laplacian_matrix(const TensorGrid& g) {
  SparseRows Dx, Dy;
  assemble_first_order(g, Dx, Dy);
  const Eigen::MatrixXd E = nyquist_basis(g);
  Eigen::MatrixXd L = filtered_square(g, Dx, E);
  L += filtered_square(g, Dy, E);
  return L;
}

// Adds the Nyquist projector of the unknown block starting at `col` to the
// rows of rings [first_ring, P). Those rows are otherwise linearly dependent,
// because Delta has no Nyquist output.
void pin_nyquist(const TensorGrid& g, Eigen::MatrixXd& A, int row, int col, int first_ring) {
  const int n = g.size(), rings = g.radial_count() - first_ring;
  const Eigen::MatrixXd E = nyquist_basis(g).rightCols(rings);
  A.block(row, col, n, n).noalias() += E * E.transpose();
}

void add_nyquist(const TensorGrid& g, const std::vector<Real>& x, int col, std::vector<Real>& out, int row,
                 int first_ring) {
  const int N = g.ntheta();
  for (int i = first_ring; i < g.radial_count(); ++i) {
    Real c = 0;
    for (int m = 0; m < N; m += 2) c += x[col + g.index(i, m)] - x[col + g.index(i, m + 1)];
    c /= N;
    for (int l = 0; l < N; ++l) out[row + g.index(i, l)] += (l % 2) ? -c : c;
  }
}

// Unknown layout. Torsion: psi only. Clamped plate: (u, w) with w = Delta u,
// which keeps the conditioning that of Delta rather than of Delta^2.
//   rows [0, n):   Delta u - w = 0 at every node
//   rows [n, 2n):  ring 0: u = 0; ring 1 (angle l): du/ds at boundary node l = 0;
//                  rings >= 2: Delta w + Pi u = rhs
// Torsion rows: ring 0: psi = 0; rings >= 1: -Delta psi + Pi psi = rhs.
// Pi is the per-ring Nyquist projector; it pins that mode of the solution to zero.
int unknowns(Problem problem, const TensorGrid& g) {
  return problem == Problem::ClampedBiharmonic ? 2 * g.size() : g.size();
}

// The collocation system applied in working precision.
std::vector<Real> apply_system(Problem problem, const std::vector<Real>& x, const GridPtr& grid) {
  const TensorGrid& g = *grid;
  const int n = g.size(), N = g.ntheta();
  if (problem == Problem::Torsion) {
    const Field psi(grid, x);
    const Field lap = laplacian(psi);
    std::vector<Real> out(n);
    for (int k = 0; k < n; ++k) out[k] = -lap[k];
    for (int l = 0; l < N; ++l) out[l] = psi[l];
    add_nyquist(g, x, 0, out, 0, 1);
    return out;
  }
  const Field u(grid, std::vector<Real>(x.begin(), x.begin() + n));
  const Field w(grid, std::vector<Real>(x.begin() + n, x.end()));
  const Field lu = laplacian(u);
  const Field lw = laplacian(w);
  const Field us = d_s(u);
  std::vector<Real> out(2 * n);
  for (int k = 0; k < n; ++k) {
    out[k] = lu[k] - w[k];
    out[n + k] = lw[k];
  }
  for (int l = 0; l < N; ++l) {
    out[n + l] = u[l];
    out[n + N + l] = us[l];
  }
  add_nyquist(g, x, 0, out, n, 2);
  return out;
}

Eigen::MatrixXd assemble_system(Problem problem, const TensorGrid& g) {
  const int N = g.ntheta(), P = g.radial_count(), n = g.size();
  Eigen::MatrixXd L = laplacian_matrix(g);
  if (problem == Problem::Torsion) {
    Eigen::MatrixXd A = -L;
    for (int l = 0; l < N; ++l) {
      A.row(l).setZero();
      A(l, l) = 1.0;
    }
    pin_nyquist(g, A, 0, 0, 1);
    return A;
  }
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  A.topLeftCorner(n, n) = L;
  A.topRightCorner(n, n).diagonal().setConstant(-1.0);
  A.bottomRightCorner(n, n) = L;
  for (int l = 0; l < N; ++l) {
    A.row(n + l).setZero();
    A(n + l, l) = 1.0;
    A.row(n + N + l).setZero();
    for (int j = 0; j < P; ++j) {
      A(n + N + l, g.index(j, l)) += to_double(g.radial_same()[j]);
      A(n + N + l, g.index(j, g.antipode(l))) += to_double(g.radial_antipodal()[j]);
    }
  }
  pin_nyquist(g, A, n, 0, 2);
  return A;
}

std::vector<Real> system_rhs(Problem problem, const Field& source) {
  const Field rhs = without_nyquist(source);
  const int n = rhs.size(), N = rhs.grid().ntheta();
  if (problem == Problem::Torsion) {
    std::vector<Real> b(rhs.values().begin(), rhs.values().end());
    for (int l = 0; l < N; ++l) b[l] = 0;
    return b;
  }
  std::vector<Real> b(2 * n, Real(0));
  for (int k = 2 * N; k < n; ++k) b[n + k] = rhs[k];
  return b;
}

SolveReport solve_once(Problem problem, const GridPtr& grid, const Field& source, const SolveOptions& opts) {
  const std::vector<Real> rhs = system_rhs(problem, source);
  const TensorGrid& g = *grid;
  const int n = g.size(), N = g.ntheta();
  const int m = unknowns(problem, g);

  Eigen::MatrixXd A = assemble_system(problem, g);
  Eigen::VectorXd scale(m);
  for (int r = 0; r < m; ++r) {
    const double m = A.row(r).cwiseAbs().maxCoeff();
    scale[r] = m > 0 ? 1.0 / m : 1.0;
    A.row(r) *= scale[r];
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-40) || !lu.matrixLU().allFinite()) throw Error(ErrorCode::SingularSystem, "collocation matrix is numerically singular");
  A.resize(0, 0);

  // Double-precision solve followed by refinement with residuals in Real.
  std::vector<Real> x(m, Real(0));
  std::vector<Real> residual = rhs;
  Eigen::VectorXd r(m);
  int steps = 0;
  Real previous = -1;
  for (int it = 0; it <= opts.max_refinement_steps; ++it) {
    Real rmax = 0;
    for (int k = 0; k < m; ++k) {
      r[k] = to_double(residual[k] * Real(scale[k]));
      rmax = std::max(rmax, Real(abs(residual[k] * Real(scale[k]))));
    }
    if (rmax == 0 || (previous >= 0 && rmax > previous / 2)) break;
    previous = rmax;
    const Eigen::VectorXd dx = lu.solve(r);
    for (int k = 0; k < m; ++k) x[k] += Real(dx[k]);
    steps = it + 1;
    const std::vector<Real> ax = apply_system(problem, x, grid);
    for (int k = 0; k < m; ++k) residual[k] = rhs[k] - ax[k];
  }

  SolveReport rep{problem == Problem::ClampedBiharmonic ? "clamped_biharmonic" : "torsion",
                  Field(grid, std::vector<Real>(x.begin(), x.begin() + n))};
  rep.condition_estimate = 1.0 / rcond;
  rep.nr = g.nr();
  rep.ntheta = g.ntheta();
  rep.refinement_steps = steps;

  // Certification from the returned field with the differentiation operators.
  const Field& u = rep.solution;
  Real interior = 0;
  if (problem == Problem::ClampedBiharmonic) {
    const Field bil = laplacian(laplacian(u));
    for (int k = 2 * N; k < n; ++k) interior = std::max(interior, Real(abs(bil[k] - source[k])));
    Real bu = 0, bn = 0;
    const BoundaryTrace dn = normal_derivative(u);
    for (int l = 0; l < N; ++l) {
      bu = std::max(bu, Real(abs(u[l])));
      bn = std::max(bn, Real(abs(dn.values[l])));
    }
    rep.boundary_residuals = {{"u", to_double(bu)}, {"du/dnu", to_double(bn)}};
  } else {
    const Field lap = laplacian(u);
    for (int k = N; k < n; ++k) interior = std::max(interior, Real(abs(-lap[k] - source[k])));
    Real bu = 0;
    for (int l = 0; l < N; ++l) bu = std::max(bu, Real(abs(u[l])));
    rep.boundary_residuals = {{"psi", to_double(bu)}};
  }
  rep.interior_residual = to_double(interior);
  rep.converged = rep.interior_residual <= opts.tolerance;
  for (const auto& b : rep.boundary_residuals) rep.converged = rep.converged && b.value <= opts.tolerance;
  return rep;
}

SolveReport solve_with_escalation(Problem problem, const GridPtr& grid,
                                  const std::function<Field(const GridPtr&)>& make_rhs, const SolveOptions& opts) {
  GridPtr current = grid;
  for (int attempt = 0;; ++attempt) {
    SolveReport rep = solve_once(problem, current, make_rhs(current), opts);
    if (rep.converged) return rep;
    const int nr = current->nr() * 2, nt = current->ntheta() * 2;
    const bool can_grow = attempt < opts.max_escalations && nr <= TensorGrid::kMaxNr &&
                          nt <= TensorGrid::kMaxNtheta;
    if (!can_grow) {
      if (opts.throw_if_unconverged) {
        throw Error(ErrorCode::Unconverged, rep.problem + " residual " + std::to_string(rep.interior_residual) +
                                                " above tolerance at nr=" + std::to_string(rep.nr));
      }
      return rep;
    }
    current = TensorGrid::make(current->geometry(), nr, nt);
  }
}

}  // namespace

SolveReport solve_clamped_biharmonic(const GridPtr& grid, const Field& rhs, const SolveOptions& opts) {
  require_same_grid(*grid, rhs.grid());
  if (opts.max_escalations > 0) {
    throw Error(ErrorCode::UsageError, "resolution escalation requires a constant right-hand side");
  }
  return solve_with_escalation(Problem::ClampedBiharmonic, grid, [&](const GridPtr&) { return rhs; }, opts);
}

SolveReport solve_clamped_biharmonic(const GridPtr& grid, Real rhs, const SolveOptions& opts) {
  return solve_with_escalation(Problem::ClampedBiharmonic, grid,
                               [&](const GridPtr& g) { return Field::constant(g, rhs); }, opts);
}

SolveReport solve_torsion(const GridPtr& grid, const SolveOptions& opts) {
  return solve_with_escalation(Problem::Torsion, grid, [](const GridPtr& g) { return Field::constant(g, 1); }, opts);
}

ManufacturedProblem level_function_squared(const DomainGeometry&) {
  ManufacturedProblem p;
  p.name = "level_function_squared";
  p.exact = [](const GridPtr& g) {
    return Field::from_polar(g, [](const Real& s, const Real&) {
      const Real phi = 1 - s * s;
      return phi * phi;
    });
  };
  return p;
}

std::vector<ConvergenceRow> manufactured_convergence(const DomainGeometry& geometry, const ManufacturedProblem& problem,
                                                     const std::vector<std::pair<int, int>>& resolutions,
                                                     std::pair<int, int> reference) {
  std::optional<Field> reference_rhs;
  if (!problem.bilaplacian) {
    const GridPtr ref = TensorGrid::make(geometry, reference.first, reference.second);
    reference_rhs = laplacian(laplacian(problem.exact(ref)));
  }
  std::vector<ConvergenceRow> rows;
  for (const auto& [nr, nt] : resolutions) {
    const GridPtr grid = TensorGrid::make(geometry, nr, nt);
    Field rhs = Field::constant(grid, 0);
    if (problem.bilaplacian) {
      rhs = problem.bilaplacian(grid);
    } else {
      std::vector<Real> v(grid->size());
      for (int k = 0; k < grid->size(); ++k) {
        v[k] = PointStencil(reference_rhs->grid(), grid->node(k)).evaluate(*reference_rhs);
      }
      rhs = Field(grid, std::move(v));
    }
    const SolveReport rep = solve_clamped_biharmonic(grid, rhs);
    const Field err = rep.solution - problem.exact(grid);
    rows.push_back({nr, nt, to_double(err.sup_norm()), rep.interior_residual});
  }
  return rows;
}

bool converges_spectrally(const std::vector<ConvergenceRow>& rows, double factor, double floor) {
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const double coarse = rows[k - 1].sup_error, fine = rows[k].sup_error;
    if (fine <= floor) continue;
    if (!(coarse >= factor * fine)) return false;
  }
  return true;
}

}  // namespace overdet
