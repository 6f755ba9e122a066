#pragma once

namespace overdet {

/// Closed-form clamped-plate and torsion solutions on the unit ball of R^n.
struct RadialSolution {
  int n = 2;
  double c0 = 0.0;          // Delta u0 on the boundary
  double r_squared0 = 0.0;  // R^2 making v0 equal to the quadratic Q
  double u0_center = 0.0;
  double v0_center = 0.0;
  double psi0_center = 0.0;

  double u0(double r) const;
  double du0(double r) const;
  /// v0 = -Delta u0.
  double v0(double r) const;
  double psi0(double r) const;
  double dpsi0(double r) const;
};

RadialSolution radial_constants(int n);

struct RadialIntegrals {
  int n = 2;
  double surface_area = 0.0;  // |S^{n-1}|
  double integral_u0 = 0.0;
  double pucci_serrin_lhs = 0.0;  // (n + 4) int u0
  double pucci_serrin_rhs = 0.0;  // c0^2 |S^{n-1}|
};

RadialIntegrals radial_integrals(int n);

/// Radial Laplacian f'' + (n - 1) f' / r evaluated from the derivative values.
inline double radial_laplacian(double f1, double f2, double r, int n) { return f2 + (n - 1) * f1 / r; }

}  // namespace overdet
