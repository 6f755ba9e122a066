#pragma once

#include "overdet/real.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace overdet {

/// One Fourier term a cos(k theta) + b sin(k theta) of the boundary perturbation.
struct Mode {
  int k = 1;
  double a = 0.0;
  double b = 0.0;
};

/// Value of R(s, theta) = 1 + eps * sum_k s^k (a_k cos k theta + b_k sin k theta)
/// together with its first partial derivatives.
template <class T>
struct MapFactor {
  T R;
  T R_s;
  T R_theta;
};

/// Star-shaped perturbation r(theta) = 1 + eps * rho(theta) of the unit disk,
/// with rho a finite trigonometric polynomial.
class BoundaryShape {
 public:
  BoundaryShape() = default;
  BoundaryShape(double epsilon, std::vector<Mode> modes);

  static BoundaryShape disk() { return {}; }
  /// Named families: disk, cos1, cos2, cos3, mixed.
  static BoundaryShape preset(std::string_view name, double epsilon);
  static std::vector<std::string> preset_names();

  double epsilon() const { return epsilon_; }
  const std::vector<Mode>& modes() const { return modes_; }
  /// max over theta of |rho(theta)|.
  double normalization() const { return normalization_; }
  /// eps * max|rho|, the sup-distance of the boundary from the unit circle.
  double amplitude() const { return epsilon_ * normalization_; }
  int max_mode() const;
  bool is_disk() const { return epsilon_ == 0.0 || modes_.empty(); }

  BoundaryShape with_epsilon(double epsilon) const { return {epsilon, modes_}; }
  /// Shape rotated counter-clockwise by phi: r_new(theta) = r(theta - phi).
  BoundaryShape rotated(double phi) const;

  /// m-th theta derivative of rho.
  template <class T>
  T perturbation(T theta, int m = 0) const;

  /// m-th theta derivative of r = 1 + eps * rho.
  template <class T>
  T radius(T theta, int m = 0) const {
    T value = T(epsilon_) * perturbation(theta, m);
    if (m == 0) value += T(1);
    return value;
  }

  /// Interior extension of r used by the disk map; R(1, theta) = r(theta).
  template <class T>
  MapFactor<T> factor(T s, T theta) const;

 private:
  double epsilon_ = 0.0;
  std::vector<Mode> modes_;
  double normalization_ = 0.0;
};

/// Result of extremizing |x(theta) - p| over the boundary.
struct BoundaryExtremum {
  double value = 0.0;   // the extremal distance
  double theta = 0.0;   // boundary parameter attaining it
  double stationarity = 0.0;  // |d/dtheta |x(theta) - p|^2| at theta
  bool newton_stalled = false;  // true when the dense-scan fallback was used
};

struct Radii {
  BoundaryExtremum inner;  // rho_1
  BoundaryExtremum outer;  // rho_2
  double rho1() const { return inner.value; }
  double rho2() const { return outer.value; }
  double gap() const { return outer.value - inner.value; }
};

/// Sup-norms of theta-derivatives of eps * rho, a computable stand-in for
/// the C^4 distance of the domain map from the identity.
struct ClosenessReport {
  double value = 0.0;             // max over k <= 4
  double derivative_sup[6] = {};  // k = 0..5
  double fifth_derivative = 0.0;  // dominates the Holder seminorm of the 4th
  double mode_cap_value = 0.0;    // eps * max_k k^4 (|a_k| + |b_k|)
  bool exceeds_cap = false;
};

struct ClosenessCaps {
  double derivative_cap = 0.8;  // eps * max(k^4 |coef|)
  double amplitude_cap = 0.05;  // eps * max|rho|
};

/// Geometry of the domain Omega bounded by a BoundaryShape.
///
/// The disk map is x = s R(s, theta) (cos theta, sin theta). R is a polynomial in
/// s e^{i theta}, so the map is smooth through the origin and satisfies
/// Phi(-s, theta) = Phi(s, theta + pi), which the pole treatment relies on.
class DomainGeometry {
 public:
  static constexpr int kCoarseSamples = 512;

  const BoundaryShape& shape() const { return shape_; }

  Vec2 boundary_point(double theta) const;
  /// d x / d theta along the boundary.
  Vec2 tangent(double theta) const;
  /// Outward unit normal.
  Vec2 normal(double theta) const;
  /// Arclength density |dx/dtheta| = sqrt(r^2 + r'^2).
  double jacobian(double theta) const;

  Vec2 map(double s, double theta) const;
  /// (s, theta) with map(s, theta) == x; s may exceed 1 outside Omega.
  std::pair<double, double> inverse_map(Vec2 x) const;
  /// Strict interior test.
  bool contains(Vec2 x) const;

  double area() const { return area_; }
  double perimeter() const { return perimeter_; }

  /// Distance from a strictly interior point to the boundary.
  BoundaryExtremum distance_to_boundary(Vec2 x) const;
  /// Same as distance_to_boundary but accepts points on or near the boundary.
  double distance_unchecked(Vec2 x) const;
  /// Radii of the largest inscribed and smallest circumscribed disks about z.
  Radii radii_about(Vec2 z) const;
  ClosenessReport closeness_proxy(const ClosenessCaps& caps = {}) const;

  friend DomainGeometry build_domain(const BoundaryShape& shape);

 private:
  BoundaryExtremum extremize(Vec2 p, bool maximize) const;

  BoundaryShape shape_;
  std::vector<Vec2> samples_;
  double area_ = 0.0;
  double perimeter_ = 0.0;
};

/// Validates the shape (r > 0, invertible disk map) and precomputes boundary data.
DomainGeometry build_domain(const BoundaryShape& shape);

// ---------------------------------------------------------------------------

template <class T>
T BoundaryShape::perturbation(T theta, int m) const {
  using std::cos;
  using std::sin;
  T sum = 0;
  for (const Mode& mode : modes_) {
    const T k = T(mode.k);
    const T arg = k * theta;
    const T c = cos(arg);
    const T s = sin(arg);
    // d^m/dtheta^m of a cos + b sin cycles with period 4.
    T km = 1;
    for (int i = 0; i < m; ++i) km *= k;
    T term;
    switch (m % 4) {
      case 0: term = T(mode.a) * c + T(mode.b) * s; break;
      case 1: term = -T(mode.a) * s + T(mode.b) * c; break;
      case 2: term = -T(mode.a) * c - T(mode.b) * s; break;
      default: term = T(mode.a) * s - T(mode.b) * c; break;
    }
    sum += km * term;
  }
  return sum;
}

template <class T>
MapFactor<T> BoundaryShape::factor(T s, T theta) const {
  using std::cos;
  using std::sin;
  T R = 1, R_s = 0, R_theta = 0;
  const T eps = T(epsilon_);
  for (const Mode& mode : modes_) {
    const T k = T(mode.k);
    const T c = cos(k * theta);
    const T sn = sin(k * theta);
    T sk1 = 1;  // s^(k-1)
    for (int i = 1; i < mode.k; ++i) sk1 *= s;
    const T sk = sk1 * s;
    const T ang = T(mode.a) * c + T(mode.b) * sn;
    const T dang = k * (-T(mode.a) * sn + T(mode.b) * c);
    R += eps * sk * ang;
    R_s += eps * k * sk1 * ang;
    R_theta += eps * sk * dang;
  }
  return {R, R_s, R_theta};
}

}  // namespace overdet
