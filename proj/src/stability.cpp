#include "overdet/stability.hpp"

#include "overdet/identities.hpp"
#include "overdet/parallel.hpp"
#include "overdet/radial.hpp"

#include <algorithm>
#include <cmath>

namespace overdet {

namespace {

void require_p(double p) {
  if (!(p >= 1.0)) throw Error(ErrorCode::InvalidP, "p must lie in [1, inf]");
}

Real frobenius_sq(const Hessian& H, int k) {
  return H.xx[k] * H.xx[k] + H.xy[k] * H.xy[k] + H.yx[k] * H.yx[k] + H.yy[k] * H.yy[k];
}

BoundaryTrace deviation_trace(const SolutionBundle& b, const Real& c) {
  BoundaryTrace t = b.laplacian_u;
  for (Real& x : t.values) x -= c;
  return t;
}

std::optional<double> safe_ratio(double num, double den) {
  if (!(den > kDegenerate) || !(num > kDegenerate)) return std::nullopt;
  return num / den;
}

}  // namespace

double ExponentTables::sigma(double p, int n) {
  require_p(p);
  if (p < 1.5) return (n + 2) * p / (n * (n + 2 * p - 1));
  return 3.0 / (2.0 * n);
}

double ExponentTables::beta(double p, int n) {
  require_p(p);
  if (std::isinf(p)) return 1.0 / (n + 2);
  if (p <= 3.0) return 1.0 / 3.0;
  return (n + p - 1) / ((n + 2) * p);
}

Real midrange_c(const SolutionBundle& b) {
  const TraceExtrema e = trace_extrema(b.laplacian_u);
  return (Real(e.min) + Real(e.max)) / 2;
}

OscillationBound gap_and_oscillation(const SolutionBundle& b) {
  OscillationBound out;
  const Radii radii = b.grid().geometry().radii_about(b.z);
  out.rho1 = radii.rho1();
  out.rho2 = radii.rho2();
  out.gap = radii.gap();
  out.lhs = out.rho2 * out.rho2 - out.rho1 * out.rho1;
  const TraceExtrema h = trace_extrema(trace(b.h));
  const TraceExtrema dev = trace_extrema(deviation_trace(b, b.c));
  out.oscillation = h.max - h.min;
  out.deviation_inf = std::max(std::abs(dev.min), std::abs(dev.max));
  out.rhs = 2 * kDimension * out.oscillation + 4 * kDimension * out.deviation_inf;
  if (out.lhs > out.rhs + 1e-9) {
    throw Error(ErrorCode::InequalityViolated, "rho2^2 - rho1^2 exceeds the oscillation bound");
  }
  return out;
}

HarmonicData harmonic_data(const SolutionBundle& b) {
  const TensorGrid& g = b.grid();
  const DomainGeometry& geom = g.geometry();
  std::vector<Real> d(g.size(), Real(0));
  for (int k = g.ntheta(); k < g.size(); ++k) d[k] = geom.distance_unchecked(g.node(k));
  Field distance(b.grid_ptr(), std::move(d));
  Gradient gh = gradient(b.h);
  Hessian hh = hessian(b.h);
  std::vector<Real> integrand(g.size());
  for (int k = 0; k < g.size(); ++k) integrand[k] = distance[k] * distance[k] * frobenius_sq(hh, k);
  const Real weighted = volume_integral(Field(b.grid_ptr(), std::move(integrand)));
  return {std::move(distance), std::move(gh), std::move(hh), weighted};
}

ChainQuantities chain_quantities(const SolutionBundle& b, double two_star) {
  return chain_quantities(b, harmonic_data(b), two_star);
}

ChainQuantities chain_quantities(const SolutionBundle& b, const HarmonicData& hd, double two_star) {
  ChainQuantities q;
  q.two_star = two_star;
  q.exponent = two_star / (kDimension + two_star);
  const TraceExtrema e = trace_extrema(trace(b.h));
  q.oscillation = e.max - e.min;

  const GridPtr& grid = b.grid_ptr();
  const Real area = volume_integral(Field::constant(grid, 1));
  const Real mean = volume_integral(b.h) / area;
  std::vector<Real> dev(b.h.size()), grad2(b.h.size());
  for (int k = 0; k < b.h.size(); ++k) {
    dev[k] = pow(abs(b.h[k] - mean), Real(two_star));
    grad2[k] = hd.grad_h.x[k] * hd.grad_h.x[k] + hd.grad_h.y[k] * hd.grad_h.y[k];
  }
  q.mean_deviation = to_double(pow(volume_integral(Field(grid, std::move(dev))), 1 / Real(two_star)));
  q.gradient = to_double(sqrt(volume_integral(Field(grid, std::move(grad2)))));
  q.weighted = to_double(sqrt(hd.weighted_integral));

  const double e1 = q.exponent;
  q.ratio1 = safe_ratio(q.oscillation, std::pow(q.mean_deviation, e1));
  q.ratio2 = safe_ratio(std::pow(q.mean_deviation, e1), std::pow(q.gradient, e1));
  q.ratio3 = safe_ratio(std::pow(q.gradient, e1), std::pow(q.weighted, e1));
  q.gradient_ratio = safe_ratio(q.gradient * q.gradient, q.weighted * q.weighted);
  return q;
}

TraceRatio trace_ratio_with_beta(const SolutionBundle& b, const HarmonicData& hd, double p, double beta) {
  require_p(p);
  if (!(hd.weighted_integral >= kDegenerate)) {
    throw Error(ErrorCode::DegenerateDenominator, "weighted Hessian integral of h vanishes");
  }
  const BoundaryTrace gx = trace(hd.grad_h.x), gy = trace(hd.grad_h.y);
  BoundaryTrace norm{b.grid_ptr(), std::vector<Real>(gx.values.size())};
  for (std::size_t l = 0; l < gx.values.size(); ++l) {
    norm.values[l] = sqrt(gx.values[l] * gx.values[l] + gy.values[l] * gy.values[l]);
  }
  TraceRatio r;
  r.p = p;
  r.beta = beta;
  r.numerator = to_double(boundary_lp_norm(norm, p));
  r.denominator = to_double(pow(hd.weighted_integral, Real(beta)));
  r.ratio = r.numerator / r.denominator;
  return r;
}

TraceRatio trace_ratio(const SolutionBundle& b, double p, double beta_margin) {
  return trace_ratio_with_beta(b, harmonic_data(b), p, ExponentTables::beta(p, kDimension) - beta_margin);
}

PositivityCertificate positivity_certificate(const SolutionBundle& b, double tolerance) {
  const TensorGrid& g = b.grid();
  std::vector<Real> d(g.size(), Real(0));
  for (int k = g.ntheta(); k < g.size(); ++k) d[k] = g.geometry().distance_unchecked(g.node(k));
  return positivity_certificate(b, Field(b.grid_ptr(), std::move(d)), tolerance);
}

PositivityCertificate positivity_certificate(const SolutionBundle& b, const Field& distance, double tolerance) {
  PositivityCertificate c;
  const Hessian hp = hessian(b.psi);
  Real m = 0;
  for (int k = 0; k < b.psi.size(); ++k) m = std::max(m, frobenius_sq(hp, k));
  const Real c_omega = 1 / (2 * (1 + 2 * m));
  Real min_w = 0, eta = -1;
  for (int k = 0; k < b.u.size(); ++k) {
    const Real w = b.u[k] - c_omega * b.psi[k] * b.psi[k];
    if (k == 0 || w < min_w) min_w = w;
    if (distance[k] >= Real(0.01)) {
      const Real ratio = b.u[k] / (distance[k] * distance[k]);
      if (eta < 0 || ratio < eta) eta = ratio;
    }
  }
  c.max_hessian_psi_sq = to_double(m);
  c.c_omega = to_double(c_omega);
  c.min_w = to_double(min_w);
  c.eta = to_double(eta);
  c.min_u = to_double(b.u.min());
  c.min_psi = to_double(b.psi.min());
  if (c.min_w < -tolerance) {
    throw Error(ErrorCode::CertificateViolated, "u - c_Omega psi^2 is negative; shape outside the positivity regime");
  }
  return c;
}

LineFit log_log_fit(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit f;
  f.points = static_cast<int>(x.size());
  if (x.size() < 2) return f;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(x.size());
  f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

namespace {

DomainGeometry admissible_domain(const BoundaryShape& shape, double cap) {
  DomainGeometry geom = build_domain(shape);
  if (shape.amplitude() > cap * (1 + 1e-12)) {
    throw Error(ErrorCode::InadmissibleShape, "eps * max|rho| = " + std::to_string(shape.amplitude()) +
                                                  " exceeds the amplitude cap " + std::to_string(cap));
  }
  return geom;
}

}  // namespace

SweepRecord evaluate_point(const BoundaryShape& shape, const SweepOptions& opts) {
  const DomainGeometry geom = admissible_domain(shape, opts.amplitude_cap);
  const GridPtr grid = TensorGrid::make(geom, opts.nr, opts.ntheta);
  const SolveReport u = solve_clamped_biharmonic(grid, Real(1), opts.solve);
  const SolveReport psi = solve_torsion(grid, opts.solve);
  AnalysisOptions ao;
  ao.c_choice = opts.c_choice;
  const SolutionBundle b = derive_fields(u.solution, psi.solution, ao);

  SweepRecord r;
  r.epsilon = shape.epsilon();
  r.z = b.z;
  r.centroid = centroid(grid);
  const Radii radii = geom.radii_about(b.z);
  r.rho1 = radii.rho1();
  r.rho2 = radii.rho2();
  r.gap = radii.gap();
  r.gap_centroid = geom.radii_about(r.centroid).gap();
  r.c = to_double(b.c);

  const Real c0 = radial_constants(kDimension).c0;
  const BoundaryTrace dev = deviation_trace(b, b.c);
  const BoundaryTrace dev0 = deviation_trace(b, c0);
  for (double p : opts.p_list) {
    r.deviation.push_back(to_double(boundary_lp_norm(dev, p)));
    r.deviation_c0.push_back(to_double(boundary_lp_norm(dev0, p)));
  }
  r.deviation_inf = to_double(boundary_lp_norm(dev, kInfinity));

  const HarmonicData hd = harmonic_data(b);
  r.chain = chain_quantities(b, hd, opts.two_star);
  for (double p : opts.p_list) {
    try {
      const double beta = ExponentTables::beta(p, kDimension) - opts.beta_margin;
      r.trace.push_back(trace_ratio_with_beta(b, hd, p, beta).ratio);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateDenominator) throw;
      r.trace.push_back(std::nullopt);
    }
  }
  try {
    r.trace_inf_exact = trace_ratio_with_beta(b, hd, kInfinity, ExponentTables::beta(kInfinity, kDimension)).ratio;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateDenominator) throw;
  }

  const IdentityReport mi = main_identity(b, b.z, b.c);
  r.identity_lhs = mi.lhs;
  r.identity_residual = std::max({mi.rel_residual, pucci_serrin(b, b.z).rel_residual, harmonic_form(b).rel_residual});
  r.certificate = positivity_certificate(b, hd.distance);
  const ClosenessReport cl = geom.closeness_proxy();
  r.closeness = cl.value;
  r.closeness_flag = cl.exceeds_cap;
  return r;
}

SweepResult stability_sweep(const std::string& family, const BoundaryShape& family_shape,
                            const std::vector<double>& eps_list, const SweepOptions& opts) {
  if (eps_list.empty()) throw Error(ErrorCode::UsageError, "empty eps list");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0)) throw Error(ErrorCode::UsageError, "sweep eps values must be positive");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1])) {
      throw Error(ErrorCode::UsageError, "sweep eps list must be strictly decreasing");
    }
  }
  for (double p : opts.p_list) require_p(p);
  // Validate every shape before spending time on any solve.
  for (double eps : eps_list) admissible_domain(family_shape.with_epsilon(eps), opts.amplitude_cap);

  SweepResult out;
  out.family = family;
  out.options = opts;
  out.records.resize(eps_list.size());
  parallel_for(static_cast<int>(eps_list.size()), [&](int i) {
    out.records[i] = evaluate_point(family_shape.with_epsilon(eps_list[i]), opts);
  });

  std::vector<double> eps, gaps;
  for (const SweepRecord& r : out.records) {
    eps.push_back(r.epsilon);
    gaps.push_back(r.gap);
  }
  out.gap_vs_eps = log_log_fit(eps, gaps);

  for (std::size_t j = 0; j < opts.p_list.size(); ++j) {
    FitResult f;
    f.p = opts.p_list[j];
    f.sigma = ExponentTables::sigma(f.p, kDimension) - opts.sigma_margin;
    std::vector<double> dev_all, kept_dev, kept_gap;
    for (const SweepRecord& r : out.records) {
      const double d = r.deviation[j];
      f.constant = std::max(f.constant, r.gap / (std::pow(d, f.sigma) + r.deviation_inf));
      dev_all.push_back(d);
      if (d >= opts.noise_factor * r.identity_residual) {
        kept_dev.push_back(d);
        kept_gap.push_back(r.gap);
      }
      if (r.trace[j]) f.trace_max = std::max(f.trace_max, *r.trace[j]);
    }
    if (kept_dev.size() < 3) {
      throw Error(ErrorCode::NoiseFloor, "fewer than 3 sweep points above the noise floor");
    }
    f.gap_vs_deviation = log_log_fit(kept_dev, kept_gap);
    f.deviation_vs_eps = log_log_fit(eps, dev_all);
    out.fits.push_back(f);
  }

  for (const SweepRecord& r : out.records) {
    if (r.trace_inf_exact) out.trace_inf_exact_max = std::max(out.trace_inf_exact_max, *r.trace_inf_exact);
  }
  for (int k = 0; k < 4; ++k) {
    double lo = kInfinity, hi = 0.0;
    for (const SweepRecord& r : out.records) {
      const std::optional<double> v =
          k == 0 ? r.chain.ratio1 : k == 1 ? r.chain.ratio2 : k == 2 ? r.chain.ratio3 : r.chain.gradient_ratio;
      if (!v) continue;
      lo = std::min(lo, *v);
      hi = std::max(hi, *v);
    }
    out.chain_max[k] = hi;
    out.chain_spread[k] = hi > 0.0 ? hi / lo : 0.0;
  }
  return out;
}

}  // namespace overdet
