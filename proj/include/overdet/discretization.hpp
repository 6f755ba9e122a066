#pragma once

#include "overdet/geometry.hpp"
#include "overdet/real.hpp"

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace overdet {

/// Chebyshev x Fourier collocation grid on the mapped disk.
///
/// Radially the grid uses the doubled interval t in [-1, 1] with the parity
/// identification f(-t, theta) = f(t, theta + pi). `nr` counts the Chebyshev-
/// Gauss-Lobatto points of the doubled interval (even, so no node sits on the
/// pole); the nr/2 positive ones are the stored radial nodes, ordered from the
/// boundary (t = 1) inwards. `ntheta` equispaced angles cover [0, 2 pi).
class TensorGrid {
 public:
  static constexpr int kMinNr = 8;
  static constexpr int kMaxNr = 128;
  static constexpr int kMinNtheta = 16;
  static constexpr int kMaxNtheta = 256;

  static std::shared_ptr<const TensorGrid> make(const DomainGeometry& geometry, int nr, int ntheta);

  const DomainGeometry& geometry() const { return geometry_; }
  int nr() const { return nr_; }
  int radial_count() const { return radial_count_; }
  int ntheta() const { return ntheta_; }
  int size() const { return radial_count_ * ntheta_; }
  int index(int i, int l) const { return i * ntheta_ + l; }
  /// Index of the node at the same radius, opposite angle.
  int antipode(int l) const { return (l + ntheta_ / 2) % ntheta_; }

  const Real& s(int i) const { return s_[i]; }
  const Real& theta(int l) const { return theta_[l]; }
  const Real& x(int idx) const { return x_[idx]; }
  const Real& y(int idx) const { return y_[idx]; }
  Vec2 node(int idx) const { return {to_double(x_[idx]), to_double(y_[idx])}; }

  // Differentiation data. Row-major P x P blocks of the folded Chebyshev
  // matrix: same-angle and antipodal-angle contributions.
  const std::vector<Real>& radial_same() const { return radial_same_; }
  const std::vector<Real>& radial_antipodal() const { return radial_antipodal_; }
  /// Row-major ntheta x ntheta Fourier first-derivative matrix.
  const std::vector<Real>& fourier() const { return fourier_; }

  // Chain-rule coefficients at every node: d/dx = sx d/ds + tx d/dtheta, etc.
  const std::vector<Real>& sx() const { return sx_; }
  const std::vector<Real>& sy() const { return sy_; }
  const std::vector<Real>& tx() const { return tx_; }
  const std::vector<Real>& ty() const { return ty_; }

  /// Volume quadrature weight per node (includes the map Jacobian).
  const std::vector<Real>& volume_weights() const { return volume_weights_; }
  /// Boundary quadrature weight per angle: J(theta_l) * 2 pi / ntheta.
  const std::vector<Real>& boundary_weights() const { return boundary_weights_; }
  const std::vector<Real>& normal_x() const { return normal_x_; }
  const std::vector<Real>& normal_y() const { return normal_y_; }

  /// Full doubled-interval Chebyshev nodes t_k = cos(k pi / (nr - 1)), k = 0..nr-1.
  const std::vector<Real>& chebyshev_nodes() const { return cheb_; }

  TensorGrid(const DomainGeometry& geometry, int nr, int ntheta);

 private:
  DomainGeometry geometry_;
  int nr_ = 0;
  int radial_count_ = 0;
  int ntheta_ = 0;
  std::vector<Real> cheb_, s_, theta_, x_, y_;
  std::vector<Real> radial_same_, radial_antipodal_, fourier_;
  std::vector<Real> sx_, sy_, tx_, ty_;
  std::vector<Real> volume_weights_, boundary_weights_, normal_x_, normal_y_;
};

using GridPtr = std::shared_ptr<const TensorGrid>;

/// Nodal values of a scalar function on a TensorGrid.
class Field {
 public:
  Field(GridPtr grid, std::vector<Real> values);

  static Field constant(GridPtr grid, Real value);
  static Field from_function(GridPtr grid, const std::function<Real(const Real&, const Real&)>& f);
  /// Function of the computational coordinates (s, theta).
  static Field from_polar(GridPtr grid, const std::function<Real(const Real&, const Real&)>& f);

  const TensorGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::span<const Real> values() const { return values_; }
  const Real& operator[](int idx) const { return values_[idx]; }
  int size() const { return static_cast<int>(values_.size()); }

  Real max() const;
  Real min() const;
  Real sup_norm() const;
  /// Index of the largest value.
  int argmax() const;

  Field operator-() const;
  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(const Real& a);
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(Field a, const Real& c) { return a *= c; }
  friend Field operator*(const Real& c, Field a) { return a *= c; }
  friend Field operator*(const Field& a, const Field& b);
  Field operator+(const Real& c) const;

 private:
  GridPtr grid_;
  std::vector<Real> values_;
};

/// Values of a function at the ntheta boundary nodes.
struct BoundaryTrace {
  GridPtr grid;
  std::vector<Real> values;
};

void require_same_grid(const TensorGrid& a, const TensorGrid& b);

/// Subtracts the angular Nyquist mode (-1)^l on every ring. dx and dy return
/// fields without it; the Fourier derivative cannot see that mode.
void remove_nyquist(const TensorGrid& g, std::span<Real> values);
Field without_nyquist(const Field& f);

// Differential operators. All act on physical scalar fields.
Field d_s(const Field& f);
Field d_theta(const Field& f);
Field dx(const Field& f);
Field dy(const Field& f);
/// d^{i+j} f / dx^i dy^j, i + j <= 4.
Field differentiate(const Field& f, int i, int j);
Field laplacian(const Field& f);

struct Gradient {
  Field x;
  Field y;
};
Gradient gradient(const Field& f);

/// Hessian entries; xy is d/dx (d/dy f), yx is d/dy (d/dx f).
struct Hessian {
  Field xx;
  Field xy;
  Field yx;
  Field yy;
};
Hessian hessian(const Field& f);

// Quadrature.
Real volume_integral(const Field& f);
BoundaryTrace trace(const Field& f);
/// nu . grad f at the boundary nodes.
BoundaryTrace normal_derivative(const Field& f);
Real boundary_integral(const BoundaryTrace& g);
/// (int |g|^p dS)^{1/p}; p = +inf gives the max over nodes.
Real boundary_lp_norm(const BoundaryTrace& g, double p);
/// Extrema over the whole boundary of the trigonometric interpolant of g.
struct TraceExtrema {
  double min = 0.0;
  double max = 0.0;
  double theta_min = 0.0;
  double theta_max = 0.0;
};
TraceExtrema trace_extrema(const BoundaryTrace& g);

/// Boundary x . nu and (x - z) . nu.
BoundaryTrace support_function(const GridPtr& grid, Vec2 z);

/// Interpolation weights for evaluating any Field on a grid at one point.
class PointStencil {
 public:
  PointStencil(const TensorGrid& grid, Vec2 point);
  Real evaluate(const Field& f) const;

 private:
  const TensorGrid* grid_;
  std::vector<Real> radial_;        // barycentric weights over doubled nodes
  std::vector<Real> angular_;       // trig cardinal weights at theta
  std::vector<Real> angular_pi_;    // ... at theta + pi
};

Real interpolate(const Field& f, Vec2 point);

/// Largest magnitude of the upper-quarter Chebyshev / Fourier coefficients,
/// relative to the largest coefficient. Diagnostic only.
struct ResolutionDiagnostic {
  double radial_tail = 0.0;
  double angular_tail = 0.0;
  bool resolved(double tol = 1e-10) const { return radial_tail < tol && angular_tail < tol; }
};
ResolutionDiagnostic resolution_tail(const Field& f);

/// CSV with columns s,theta,x,y,value at 17 significant digits.
void write_field_csv(const Field& f, const std::string& path);

}  // namespace overdet
