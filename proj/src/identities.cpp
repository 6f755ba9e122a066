#include "overdet/identities.hpp"

#include <cstdio>
#include <cstring>

namespace overdet {

namespace {

constexpr Real kN = kDimension;

class Fnv1a {
 public:
  void add(const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
      hash_ ^= p[i];
      hash_ *= 0x100000001b3ULL;
    }
  }
  void add(double x) { add(&x, sizeof x); }
  void add(int x) { add(&x, sizeof x); }
  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash_));
    return buf;
  }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

std::string inputs_hash(const SolutionBundle& b, Vec2 z, const Real& c) {
  Fnv1a h;
  const BoundaryShape& shape = b.grid().geometry().shape();
  h.add(shape.epsilon());
  for (const Mode& m : shape.modes()) {
    h.add(m.k);
    h.add(m.a);
    h.add(m.b);
  }
  h.add(b.grid().nr());
  h.add(b.grid().ntheta());
  h.add(z.x);
  h.add(z.y);
  h.add(to_double(c));
  return h.hex();
}

IdentityReport make_report(std::string name, const SolutionBundle& b, const Real& lhs, const Real& rhs, Vec2 z,
                           const Real& c) {
  IdentityReport r;
  r.name = std::move(name);
  r.lhs = to_double(lhs);
  r.rhs = to_double(rhs);
  const Real diff = abs(lhs - rhs);
  r.abs_residual = to_double(diff);
  r.scale_floor = identity_scale_floor(b);
  const Real scale = std::max({Real(abs(lhs)), Real(abs(rhs)), Real(r.scale_floor)});
  r.rel_residual = to_double(diff / scale);
  r.inputs_hash = inputs_hash(b, z, c);
  return r;
}

void require_interior(const SolutionBundle& b, Vec2 z) {
  if (!b.grid().geometry().contains(z)) throw Error(ErrorCode::NotInterior, "anchor point outside the domain");
}

BoundaryTrace deviation_weight(const SolutionBundle& b, const Real& c) {
  BoundaryTrace w{b.grid_ptr(), b.laplacian_u.values};
  for (Real& x : w.values) x = c * c - x * x;
  return w;
}

}  // namespace

double identity_scale_floor(const SolutionBundle& b) {
  return 1e-12 * (kDimension + 4) * b.grid().geometry().area() * to_double(b.u.sup_norm());
}

IdentityReport pucci_serrin(const SolutionBundle& b, Vec2 z) {
  require_interior(b, z);
  const Real lhs = (kN + 4) * volume_integral(b.u);
  BoundaryTrace g = support_function(b.grid_ptr(), z);
  for (int l = 0; l < b.grid().ntheta(); ++l) g.values[l] *= b.laplacian_u.values[l] * b.laplacian_u.values[l];
  return make_report("pucci_serrin", b, lhs, boundary_integral(g), z, b.c);
}

IdentityReport main_identity(const SolutionBundle& b, Vec2 z, const Real& c) {
  require_interior(b, z);
  const Hessian& H = b.hess_v;
  std::vector<Real> integrand(b.u.size());
  for (int k = 0; k < b.u.size(); ++k) {
    const Real lap = H.xx[k] + H.yy[k];
    const Real norm2 = H.xx[k] * H.xx[k] + H.xy[k] * H.xy[k] + H.yx[k] * H.yx[k] + H.yy[k] * H.yy[k];
    integrand[k] = b.u[k] * (norm2 - lap * lap / kN);
  }
  const Real lhs = volume_integral(Field(b.grid_ptr(), std::move(integrand)));

  BoundaryTrace g = deviation_weight(b, c);
  const BoundaryTrace support = support_function(b.grid_ptr(), z);
  for (int l = 0; l < b.grid().ntheta(); ++l) g.values[l] *= (b.dv_dnu.values[l] + support.values[l] / kN) / 4;
  return make_report("main_identity", b, lhs, boundary_integral(g), z, c);
}

MainIdentityCheck main_identity_checked(const SolutionBundle& b, Vec2 z2, const Real& c2) {
  MainIdentityCheck out{main_identity(b, b.z, b.c), main_identity(b, z2, c2), 0.0};
  out.lhs_spread = std::abs(out.primary.lhs - out.secondary.lhs);
  return out;
}

IdentityReport harmonic_form(const SolutionBundle& b) {
  const Hessian H = hessian(b.h);
  std::vector<Real> integrand(b.u.size());
  for (int k = 0; k < b.u.size(); ++k) {
    integrand[k] = b.u[k] * (H.xx[k] * H.xx[k] + H.xy[k] * H.xy[k] + H.yx[k] * H.yx[k] + H.yy[k] * H.yy[k]);
  }
  const Real lhs = volume_integral(Field(b.grid_ptr(), std::move(integrand)));
  BoundaryTrace g = deviation_weight(b, b.c);
  for (int l = 0; l < b.grid().ntheta(); ++l) g.values[l] *= b.dh_dnu.values[l] / 4;
  return make_report("harmonic_form", b, lhs, boundary_integral(g), b.z, b.c);
}

double zero_flux(const SolutionBundle& b, Vec2 z) {
  BoundaryTrace g = support_function(b.grid_ptr(), z);
  for (int l = 0; l < b.grid().ntheta(); ++l) g.values[l] = b.dv_dnu.values[l] + g.values[l] / kN;
  return to_double(boundary_integral(g));
}

}  // namespace overdet
