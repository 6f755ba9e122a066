#include "overdet/analysis.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace overdet {

namespace {

constexpr Real kN = kDimension;

Real squared_norm(const Hessian& H, int k) {
  return H.xx[k] * H.xx[k] + H.xy[k] * H.xy[k] + H.yx[k] * H.yx[k] + H.yy[k] * H.yy[k];
}

// Node maximizing f; exact ties go to the node closest to the origin.
int argmax_closest_to_origin(const Field& f) {
  const TensorGrid& g = f.grid();
  int best = 0;
  for (int k = 1; k < f.size(); ++k) {
    if (f[k] > f[best]) {
      best = k;
    } else if (f[k] == f[best]) {
      const Real rk = g.x(k) * g.x(k) + g.y(k) * g.y(k);
      const Real rb = g.x(best) * g.x(best) + g.y(best) * g.y(best);
      if (rk < rb) best = k;
    }
  }
  return best;
}

}  // namespace

Field quadratic_q(const GridPtr& grid, Vec2 z, const Real& r_squared) {
  const Real zx = z.x, zy = z.y;
  return Field::from_function(grid, [&](const Real& x, const Real& y) {
    const Real dx = x - zx, dy = y - zy;
    return (r_squared - dx * dx - dy * dy) / (2 * kN);
  });
}

Real surface_mean_c(const SolutionBundle& b) {
  const TensorGrid& g = b.grid();
  Real total = 0, length = 0;
  for (int l = 0; l < g.ntheta(); ++l) {
    total += b.laplacian_u.values[l] * g.boundary_weights()[l];
    length += g.boundary_weights()[l];
  }
  return total / length;
}

SolutionBundle derive_fields(const Field& u, const Field& psi, const AnalysisOptions& opts) {
  require_same_grid(u.grid(), psi.grid());
  const GridPtr& grid = u.grid_ptr();
  const DomainGeometry& geom = grid->geometry();

  Field v = -laplacian(u);
  Gradient gv = gradient(v);
  Hessian hv = hessian(v);

  const int start = argmax_closest_to_origin(v);
  if (start < grid->ntheta()) {
    throw Error(ErrorCode::MaxOnBoundary, "maximum of -Delta u lies on the boundary");
  }

  // Newton iteration for grad v = 0 on the spectral interpolant.
  Vec2 z = grid->node(start);
  int iterations = 0;
  for (; iterations < opts.z_newton_steps; ++iterations) {
    const PointStencil st(*grid, z);
    const double gx = to_double(st.evaluate(gv.x)), gy = to_double(st.evaluate(gv.y));
    if (std::hypot(gx, gy) <= opts.z_gradient_tol) break;
    const double a = to_double(st.evaluate(hv.xx)), d = to_double(st.evaluate(hv.yy));
    const double b = 0.5 * to_double(st.evaluate(hv.xy) + st.evaluate(hv.yx));
    const double det = a * d - b * b;
    if (det == 0.0) break;
    const Vec2 step{-(d * gx - b * gy) / det, -(a * gy - b * gx) / det};
    const Vec2 next = z + step;
    if (!geom.contains(next)) throw Error(ErrorCode::MaxOnBoundary, "maximizer of -Delta u left the domain");
    z = next;
    if (step.norm() < 1e-17) {
      ++iterations;
      break;
    }
  }

  SolutionBundle b{u, psi, std::move(v), std::move(gv), std::move(hv), z, iterations, Real(0), Real(0),
                   opts.c_choice, Field::constant(grid, 0), {}, {}, {}};
  b.r_squared = opts.r_squared ? *opts.r_squared : 2 * kN * interpolate(b.v, z);
  b.h = b.v - quadratic_q(grid, z, b.r_squared);
  b.laplacian_u = trace(-b.v);
  b.dv_dnu = normal_derivative(b.v);
  b.dh_dnu = normal_derivative(b.h);
  b.c = opts.c_choice == CChoice::SurfaceMean ? surface_mean_c(b) : 1 / (kN * (kN + 2));
  return b;
}

SolutionBundle with_c(SolutionBundle bundle, const Real& c) {
  bundle.c = c;
  return bundle;
}

DeficitResult deficit(const SolutionBundle& b) {
  const int n = b.v.size();
  const Hessian hh = hessian(b.h);
  std::vector<Real> delta(n);
  Real lowest = 0, mismatch = 0;
  for (int k = 0; k < n; ++k) {
    const Real lap = b.hess_v.xx[k] + b.hess_v.yy[k];
    delta[k] = squared_norm(b.hess_v, k) - lap * lap / kN;
    if (k == 0 || delta[k] < lowest) lowest = delta[k];
    mismatch = std::max(mismatch, Real(abs(delta[k] - squared_norm(hh, k))));
  }
  return {Field(b.grid_ptr(), std::move(delta)), to_double(lowest), to_double(mismatch)};
}

AuxiliaryQ auxiliary_q(const SolutionBundle& b) {
  const Field q = Real(0.25) * (b.v * b.v) - ((kN + 2) / (2 * kN)) * b.u;
  const Field lap_q = laplacian(q);
  const Field bil_q = laplacian(lap_q);
  Real r1 = 0, r2 = 0;
  for (int k = 0; k < q.size(); ++k) {
    const Real grad2 = b.grad_v.x[k] * b.grad_v.x[k] + b.grad_v.y[k] * b.grad_v.y[k];
    r1 = std::max(r1, Real(abs(lap_q[k] - (grad2 / 2 + b.v[k] / kN))));
    r2 = std::max(r2, Real(abs(bil_q[k] - (squared_norm(b.hess_v, k) - 1 / kN))));
  }
  return {q, to_double(r1), to_double(r2)};
}

double gradient_h_at_z(const SolutionBundle& b) {
  const Gradient gh = gradient(b.h);
  const PointStencil st(b.grid(), b.z);
  return std::hypot(to_double(st.evaluate(gh.x)), to_double(st.evaluate(gh.y)));
}

Vec2 centroid(const GridPtr& grid) {
  Real area = 0, mx = 0, my = 0;
  for (int k = 0; k < grid->size(); ++k) {
    const Real& w = grid->volume_weights()[k];
    area += w;
    mx += w * grid->x(k);
    my += w * grid->y(k);
  }
  return {to_double(mx / area), to_double(my / area)};
}

MeanValueCheck mean_value_check(const SolutionBundle& b, int disks, std::uint64_t seed) {
  const DomainGeometry& geom = b.grid().geometry();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  using Rule = boost::math::quadrature::gauss<double, 4>;
  constexpr int kAngles = 32;

  MeanValueCheck out;
  out.disks = disks;
  for (int d = 0; d < disks; ++d) {
    const double s = 0.8 * std::sqrt(unit(rng));
    const double theta = 2 * std::numbers::pi * unit(rng);
    const Vec2 center = geom.map(s, theta);
    const double radius = (0.1 + 0.4 * unit(rng)) * geom.distance_to_boundary(center).value;

    // Average over the disk: (2 / r^2) int_0^r rho * (circle mean at rho) d rho.
    Real total = 0;
    for (std::size_t i = 0; i < Rule::abscissa().size(); ++i) {
      for (int sign : {1, -1}) {
        if (sign < 0 && Rule::abscissa()[i] == 0.0) continue;
        const double t = 0.5 * (1.0 + sign * Rule::abscissa()[i]);
        const double rho = radius * t;
        Real circle = 0;
        for (int a = 0; a < kAngles; ++a) {
          const double phi = 2 * std::numbers::pi * a / kAngles;
          circle += interpolate(b.h, center + Vec2{rho * std::cos(phi), rho * std::sin(phi)});
        }
        total += Real(0.5 * Rule::weights()[i]) * Real(2 * t) * circle / kAngles;
      }
    }
    const Real at_center = interpolate(b.h, center);
    out.max_error = std::max(out.max_error, to_double(abs(total - at_center)));
  }
  return out;
}

double boundary_distance_reconstruction_error(const SolutionBundle& b) {
  const TensorGrid& g = b.grid();
  const Real zx = b.z.x, zy = b.z.y;
  Real worst = 0;
  for (int l = 0; l < g.ntheta(); ++l) {
    const Real dx = g.x(l) - zx, dy = g.y(l) - zy;
    const Real rebuilt = 2 * kN * b.h[l] + 2 * kN * b.laplacian_u.values[l] + b.r_squared;
    worst = std::max(worst, Real(abs(rebuilt - (dx * dx + dy * dy))));
  }
  return to_double(worst);
}

}  // namespace overdet
