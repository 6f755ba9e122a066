#include "overdet/radial.hpp"

#include "overdet/real.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <numbers>
#include <string>

namespace overdet {

namespace {

void require_dimension(int n) {
  if (n < 2) throw Error(ErrorCode::BadDimension, "dimension must be at least 2, got " + std::to_string(n));
}

}  // namespace

double RadialSolution::u0(double r) const {
  const double t = r * r - 1.0;
  return t * t / (8.0 * n * (n + 2));
}

double RadialSolution::du0(double r) const { return r * (r * r - 1.0) / (2.0 * n * (n + 2)); }

double RadialSolution::v0(double r) const { return (n - (n + 2) * r * r) / (2.0 * n * (n + 2)); }

double RadialSolution::psi0(double r) const { return (1.0 - r * r) / (2.0 * n); }

double RadialSolution::dpsi0(double r) const { return -r / n; }

RadialSolution radial_constants(int n) {
  require_dimension(n);
  RadialSolution s;
  s.n = n;
  s.c0 = 1.0 / (n * (n + 2));
  s.r_squared0 = static_cast<double>(n) / (n + 2);
  s.u0_center = s.u0(0.0);
  s.v0_center = s.v0(0.0);
  s.psi0_center = s.psi0(0.0);
  return s;
}

RadialIntegrals radial_integrals(int n) {
  require_dimension(n);
  const RadialSolution sol = radial_constants(n);
  RadialIntegrals out;
  out.n = n;
  out.surface_area = 2.0 * std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0);
  // The integrand u0(r) r^{n-1} is a polynomial of degree n + 3 on [0, 1].
  using Rule = boost::math::quadrature::gauss<long double, 20>;
  const long double radial = Rule::integrate(
      [&](long double r) {
        const long double t = r * r - 1;
        return t * t / (8.0L * n * (n + 2)) * std::pow(r, static_cast<long double>(n - 1));
      },
      0.0L, 1.0L);
  out.integral_u0 = static_cast<double>(radial * out.surface_area);
  out.pucci_serrin_lhs = (n + 4) * out.integral_u0;
  out.pucci_serrin_rhs = sol.c0 * sol.c0 * out.surface_area;
  return out;
}

}  // namespace overdet
