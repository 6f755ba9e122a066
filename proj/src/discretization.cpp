#include "overdet/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

namespace overdet {

namespace {

bool finite(const Real& x) { return boost::multiprecision::isfinite(x); }

// Solves A x = b in place (row-major, n x n) by Gaussian elimination with
// partial pivoting. Used only for the small radial weight system.
std::vector<Real> dense_solve(std::vector<Real> a, std::vector<Real> b, int n) {
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i) {
      if (abs(a[i * n + k]) > abs(a[piv * n + k])) piv = i;
    }
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
      std::swap(b[k], b[piv]);
    }
    for (int i = k + 1; i < n; ++i) {
      const Real m = a[i * n + k] / a[k * n + k];
      for (int j = k; j < n; ++j) a[i * n + j] -= m * a[k * n + j];
      b[i] -= m * b[k];
    }
  }
  std::vector<Real> x(n);
  for (int i = n - 1; i >= 0; --i) {
    Real acc = b[i];
    for (int j = i + 1; j < n; ++j) acc -= a[i * n + j] * x[j];
    x[i] = acc / a[i * n + i];
  }
  return x;
}

// Integral over [0, 1] of the Chebyshev polynomial T_n, n odd.
Real chebyshev_half_integral(int n) {
  if (n == 1) return Real(1) / 2;
  auto t_at_zero = [](int k) -> Real {
    switch (((k % 4) + 4) % 4) {
      case 0: return 1;
      case 2: return -1;
      default: return 0;
    }
  };
  const Real np1 = n + 1, nm1 = n - 1;
  return (1 - t_at_zero(n + 1)) / (2 * np1) - (1 - t_at_zero(n - 1)) / (2 * nm1);
}

}  // namespace

// ---------------------------------------------------------------------------
// TensorGrid

std::shared_ptr<const TensorGrid> TensorGrid::make(const DomainGeometry& geometry, int nr, int ntheta) {
  return std::make_shared<const TensorGrid>(geometry, nr, ntheta);
}

TensorGrid::TensorGrid(const DomainGeometry& geometry, int nr, int ntheta)
    : geometry_(geometry), nr_(nr), radial_count_(nr / 2), ntheta_(ntheta) {
  if (nr % 2 != 0 || nr < kMinNr || nr > kMaxNr) {
    throw Error(ErrorCode::InvalidGrid, "nr must be even and within [8, 128]");
  }
  if (ntheta % 2 != 0 || ntheta < kMinNtheta || ntheta > kMaxNtheta) {
    throw Error(ErrorCode::InvalidGrid, "ntheta must be even and within [16, 256]");
  }
  if (ntheta < 4 * geometry.shape().max_mode()) {
    throw Error(ErrorCode::InvalidGrid, "ntheta must be at least 4x the highest shape mode");
  }

  const int M = nr - 1;
  const int P = radial_count_;
  const int N = ntheta;
  const Real pi = kPi;

  // Chebyshev-Gauss-Lobatto nodes on the doubled interval.
  cheb_.resize(nr);
  for (int k = 0; k < nr; ++k) cheb_[k] = cos(pi * k / M);
  s_.assign(cheb_.begin(), cheb_.begin() + P);

  // Chebyshev differentiation matrix (difference form via sines for accuracy).
  std::vector<Real> D(nr * nr, Real(0));
  auto c = [&](int k) { return (k == 0 || k == M) ? Real(2) : Real(1); };
  for (int i = 0; i < nr; ++i) {
    Real diag = 0;
    for (int j = 0; j < nr; ++j) {
      if (i == j) continue;
      const Real diff = -2 * sin(pi * (i + j) / (2 * M)) * sin(pi * (i - j) / (2 * M));
      const Real sign = ((i + j) % 2 == 0) ? 1 : -1;
      D[i * nr + j] = c(i) / c(j) * sign / diff;
      diag -= D[i * nr + j];
    }
    D[i * nr + i] = diag;
  }
  radial_same_.resize(P * P);
  radial_antipodal_.resize(P * P);
  for (int i = 0; i < P; ++i) {
    for (int j = 0; j < P; ++j) {
      radial_same_[i * P + j] = D[i * nr + j];
      radial_antipodal_[i * P + j] = D[i * nr + (M - j)];
    }
  }

  theta_.resize(N);
  for (int l = 0; l < N; ++l) theta_[l] = 2 * pi * l / N;
  const Real h = 2 * pi / N;
  fourier_.assign(N * N, Real(0));
  for (int l = 0; l < N; ++l) {
    for (int m = 0; m < N; ++m) {
      if (l == m) continue;
      const int d = l - m;
      const Real sign = (((d % 2) + 2) % 2 == 0) ? 1 : -1;
      fourier_[l * N + m] = sign / (2 * tan(d * h / 2));
    }
  }

  // Radial weights integrating odd polynomials of degree <= M over [0, 1].
  std::vector<Real> vand(P * P), rhs(P);
  for (int m = 0; m < P; ++m) {
    const int n = 2 * m + 1;
    for (int i = 0; i < P; ++i) vand[m * P + i] = cos(pi * Real(n) * i / M);
    rhs[m] = chebyshev_half_integral(n);
  }
  const std::vector<Real> radial_w = dense_solve(vand, rhs, P);

  const BoundaryShape& shape = geometry.shape();
  const int n = P * N;
  x_.resize(n);
  y_.resize(n);
  sx_.resize(n);
  sy_.resize(n);
  tx_.resize(n);
  ty_.resize(n);
  volume_weights_.resize(n);
  for (int i = 0; i < P; ++i) {
    const Real s = s_[i];
    for (int l = 0; l < N; ++l) {
      const Real th = theta_[l];
      const Real ct = cos(th), st = sin(th);
      const MapFactor<Real> f = shape.factor(s, th);
      const Real rho = s * f.R;
      const Real rho_s = f.R + s * f.R_s;
      const int idx = index(i, l);
      x_[idx] = rho * ct;
      y_[idx] = rho * st;
      sx_[idx] = (f.R_theta * st + f.R * ct) / (f.R * rho_s);
      sy_[idx] = (f.R * st - f.R_theta * ct) / (f.R * rho_s);
      tx_[idx] = -st / rho;
      ty_[idx] = ct / rho;
      volume_weights_[idx] = radial_w[i] * h * rho * rho_s;
    }
  }

  boundary_weights_.resize(N);
  normal_x_.resize(N);
  normal_y_.resize(N);
  for (int l = 0; l < N; ++l) {
    const Real th = theta_[l];
    const Real r = shape.radius(th);
    const Real dr = shape.radius(th, 1);
    const Real J = sqrt(r * r + dr * dr);
    boundary_weights_[l] = J * h;
    normal_x_[l] = (r * cos(th) + dr * sin(th)) / J;
    normal_y_[l] = (r * sin(th) - dr * cos(th)) / J;
  }
}

// ---------------------------------------------------------------------------
// Field

Field::Field(GridPtr grid, std::vector<Real> values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw Error(ErrorCode::GridMismatch, "field without grid");
  if (static_cast<int>(values_.size()) != grid_->size()) {
    throw Error(ErrorCode::GridMismatch, "value count does not match grid size");
  }
  for (const Real& v : values_) {
    if (!finite(v)) throw Error(ErrorCode::NonFiniteField, "field contains NaN or Inf");
  }
}

Field Field::constant(GridPtr grid, Real value) {
  const int n = grid->size();
  return Field(std::move(grid), std::vector<Real>(n, value));
}

Field Field::from_function(GridPtr grid, const std::function<Real(const Real&, const Real&)>& f) {
  std::vector<Real> v(grid->size());
  for (int k = 0; k < grid->size(); ++k) v[k] = f(grid->x(k), grid->y(k));
  return Field(std::move(grid), std::move(v));
}

Field Field::from_polar(GridPtr grid, const std::function<Real(const Real&, const Real&)>& f) {
  std::vector<Real> v(grid->size());
  for (int i = 0; i < grid->radial_count(); ++i) {
    for (int l = 0; l < grid->ntheta(); ++l) v[grid->index(i, l)] = f(grid->s(i), grid->theta(l));
  }
  return Field(std::move(grid), std::move(v));
}

Real Field::max() const { return *std::max_element(values_.begin(), values_.end()); }
Real Field::min() const { return *std::min_element(values_.begin(), values_.end()); }

Real Field::sup_norm() const {
  Real m = 0;
  for (const Real& v : values_) m = std::max(m, Real(abs(v)));
  return m;
}

int Field::argmax() const {
  return static_cast<int>(std::max_element(values_.begin(), values_.end()) - values_.begin());
}

Field Field::operator-() const {
  Field out = *this;
  for (Real& v : out.values_) v = -v;
  return out;
}

Field& Field::operator+=(const Field& o) {
  require_same_grid(*grid_, *o.grid_);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
  return *this;
}

Field& Field::operator-=(const Field& o) {
  require_same_grid(*grid_, *o.grid_);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
  return *this;
}

Field& Field::operator*=(const Real& a) {
  for (Real& v : values_) v *= a;
  return *this;
}

Field operator*(const Field& a, const Field& b) {
  require_same_grid(*a.grid_, *b.grid_);
  Field out = a;
  for (std::size_t k = 0; k < out.values_.size(); ++k) out.values_[k] *= b.values_[k];
  return out;
}

Field Field::operator+(const Real& c) const {
  Field out = *this;
  for (Real& v : out.values_) v += c;
  return out;
}

void require_same_grid(const TensorGrid& a, const TensorGrid& b) {
  if (&a != &b) throw Error(ErrorCode::GridMismatch, "fields live on different grids");
}

// ---------------------------------------------------------------------------
// Differentiation

Field d_s(const Field& f) {
  const TensorGrid& g = f.grid();
  const int P = g.radial_count(), N = g.ntheta(), half = N / 2;
  const Real* A = g.radial_same().data();
  const Real* B = g.radial_antipodal().data();
  const Real* F = f.values().data();
  std::vector<Real> out(g.size(), Real(0));
  for (int i = 0; i < P; ++i) {
    Real* row = out.data() + i * N;
    for (int j = 0; j < P; ++j) {
      const Real a = A[i * P + j];
      const Real b = B[i * P + j];
      const Real* src = F + j * N;
      for (int l = 0; l < half; ++l) row[l] += a * src[l] + b * src[l + half];
      for (int l = half; l < N; ++l) row[l] += a * src[l] + b * src[l - half];
    }
  }
  return Field(f.grid_ptr(), std::move(out));
}

Field d_theta(const Field& f) {
  const TensorGrid& g = f.grid();
  const int P = g.radial_count(), N = g.ntheta();
  const Real* D = g.fourier().data();
  const Real* F = f.values().data();
  std::vector<Real> out(g.size(), Real(0));
  for (int i = 0; i < P; ++i) {
    const Real* src = F + i * N;
    for (int l = 0; l < N; ++l) {
      const Real* drow = D + l * N;
      Real acc = 0;
      for (int m = 0; m < N; ++m) acc += drow[m] * src[m];
      out[i * N + l] = acc;
    }
  }
  return Field(f.grid_ptr(), std::move(out));
}

void remove_nyquist(const TensorGrid& g, std::span<Real> values) {
  const int N = g.ntheta();
  for (int i = 0; i < g.radial_count(); ++i) {
    Real* ring = values.data() + i * N;
    Real c = 0;
    for (int l = 0; l < N; l += 2) c += ring[l] - ring[l + 1];
    c /= N;
    for (int l = 0; l < N; l += 2) {
      ring[l] -= c;
      ring[l + 1] += c;
    }
  }
}

Field without_nyquist(const Field& f) {
  std::vector<Real> v(f.values().begin(), f.values().end());
  remove_nyquist(f.grid(), v);
  return Field(f.grid_ptr(), std::move(v));
}

namespace {

// The products with the metric coefficients are the only step that creates
// Nyquist content; it is dropped, as the first-derivative Fourier matrix does.
Field combine(const Field& fs, const Field& ft, const std::vector<Real>& cs, const std::vector<Real>& ct) {
  std::vector<Real> out(fs.size());
  for (int k = 0; k < fs.size(); ++k) out[k] = cs[k] * fs[k] + ct[k] * ft[k];
  remove_nyquist(fs.grid(), out);
  return Field(fs.grid_ptr(), std::move(out));
}

}  // namespace

Gradient gradient(const Field& f) {
  const Field fs = d_s(f);
  const Field ft = d_theta(f);
  const TensorGrid& g = f.grid();
  return {combine(fs, ft, g.sx(), g.tx()), combine(fs, ft, g.sy(), g.ty())};
}

Field dx(const Field& f) {
  const TensorGrid& g = f.grid();
  return combine(d_s(f), d_theta(f), g.sx(), g.tx());
}

Field dy(const Field& f) {
  const TensorGrid& g = f.grid();
  return combine(d_s(f), d_theta(f), g.sy(), g.ty());
}

Field differentiate(const Field& f, int i, int j) {
  if (i < 0 || j < 0 || i + j > 4) {
    throw Error(ErrorCode::OrderTooHigh, "multi-index order must satisfy i + j <= 4");
  }
  Field out = f;
  for (int k = 0; k < j; ++k) out = dy(out);
  for (int k = 0; k < i; ++k) out = dx(out);
  return out;
}

Field laplacian(const Field& f) {
  const Gradient g = gradient(f);
  return dx(g.x) + dy(g.y);
}

Hessian hessian(const Field& f) {
  const Gradient g = gradient(f);
  const Gradient gx = gradient(g.x);
  const Gradient gy = gradient(g.y);
  return {gx.x, gy.x, gx.y, gy.y};
}

// ---------------------------------------------------------------------------
// Quadrature

Real volume_integral(const Field& f) {
  const auto& w = f.grid().volume_weights();
  Real acc = 0;
  for (int k = 0; k < f.size(); ++k) acc += w[k] * f[k];
  return acc;
}

BoundaryTrace trace(const Field& f) {
  const int N = f.grid().ntheta();
  return {f.grid_ptr(), std::vector<Real>(f.values().begin(), f.values().begin() + N)};
}

BoundaryTrace normal_derivative(const Field& f) {
  const Gradient g = gradient(f);
  const TensorGrid& grid = f.grid();
  const int N = grid.ntheta();
  std::vector<Real> out(N);
  for (int l = 0; l < N; ++l) out[l] = grid.normal_x()[l] * g.x[l] + grid.normal_y()[l] * g.y[l];
  return {f.grid_ptr(), std::move(out)};
}

Real boundary_integral(const BoundaryTrace& g) {
  const auto& w = g.grid->boundary_weights();
  if (g.values.size() != w.size()) throw Error(ErrorCode::GridMismatch, "trace length mismatch");
  Real acc = 0;
  for (std::size_t l = 0; l < w.size(); ++l) acc += w[l] * g.values[l];
  return acc;
}

Real boundary_lp_norm(const BoundaryTrace& g, double p) {
  if (!(p >= 1.0)) throw Error(ErrorCode::InvalidP, "p must lie in [1, inf]");
  if (std::isinf(p)) {
    Real m = 0;
    for (const Real& v : g.values) m = std::max(m, Real(abs(v)));
    return m;
  }
  const auto& w = g.grid->boundary_weights();
  if (g.values.size() != w.size()) throw Error(ErrorCode::GridMismatch, "trace length mismatch");
  Real acc = 0;
  const Real pp = p;
  for (std::size_t l = 0; l < w.size(); ++l) {
    const Real a = abs(g.values[l]);
    if (a > 0) acc += w[l] * pow(a, pp);
  }
  return acc > 0 ? Real(pow(acc, 1 / pp)) : Real(0);
}

BoundaryTrace support_function(const GridPtr& grid, Vec2 z) {
  const int N = grid->ntheta();
  std::vector<Real> out(N);
  for (int l = 0; l < N; ++l) {
    out[l] = (grid->x(l) - Real(z.x)) * grid->normal_x()[l] + (grid->y(l) - Real(z.y)) * grid->normal_y()[l];
  }
  return {grid, std::move(out)};
}

TraceExtrema trace_extrema(const BoundaryTrace& g) {
  const int N = static_cast<int>(g.values.size());
  const int K = N / 2;
  // Real trigonometric coefficients; the Nyquist cosine carries half weight.
  std::vector<double> a(K + 1, 0.0), b(K + 1, 0.0);
  for (int k = 0; k <= K; ++k) {
    Real ak = 0, bk = 0;
    for (int l = 0; l < N; ++l) {
      const Real arg = 2 * kPi * Real(k) * Real(l) / Real(N);
      ak += g.values[l] * cos(arg);
      bk += g.values[l] * sin(arg);
    }
    const double w = (k == 0 || k == K) ? 1.0 / N : 2.0 / N;
    a[k] = to_double(ak) * w;
    b[k] = (k == K) ? 0.0 : to_double(bk) * w;
  }
  // Value and first two derivatives at theta.
  auto eval = [&](double t, double& f1, double& f2) {
    double f = 0.0;
    f1 = f2 = 0.0;
    for (int k = 0; k <= K; ++k) {
      const double c = std::cos(k * t), s = std::sin(k * t);
      f += a[k] * c + b[k] * s;
      f1 += k * (-a[k] * s + b[k] * c);
      f2 -= double(k) * k * (a[k] * c + b[k] * s);
    }
    return f;
  };
  const int samples = 16 * N;
  const double h = 2 * std::numbers::pi / samples;
  double d1, d2;
  int imin = 0, imax = 0;
  std::vector<double> vals(samples);
  for (int i = 0; i < samples; ++i) {
    vals[i] = eval(i * h, d1, d2);
    if (vals[i] < vals[imin]) imin = i;
    if (vals[i] > vals[imax]) imax = i;
  }
  auto polish = [&](int i, bool maximize) {
    double t = i * h;
    double best_t = t, best = vals[i];
    for (int it = 0; it < 20; ++it) {
      eval(t, d1, d2);
      if (d2 == 0.0) break;
      const double step = std::clamp(-d1 / d2, -h, h);
      t += step;
      const double f = eval(t, d1, d2);
      if (maximize ? f > best : f < best) {
        best = f;
        best_t = t;
      }
      if (std::abs(step) < 1e-15) break;
    }
    return std::pair{best, best_t};
  };
  const auto [lo, tlo] = polish(imin, false);
  const auto [hi, thi] = polish(imax, true);
  return {lo, hi, tlo, thi};
}

// ---------------------------------------------------------------------------
// Interpolation

namespace {

std::vector<Real> trig_cardinals(const TensorGrid& g, const Real& theta) {
  const int N = g.ntheta();
  std::vector<Real> c(N);
  for (int l = 0; l < N; ++l) {
    const Real d = theta - g.theta(l);
    const Real half = d / 2;
    const Real t = tan(half);
    if (abs(sin(half)) < Real(1e-30)) {
      c[l] = 1;
    } else {
      c[l] = sin(N * half) / (N * t);
    }
  }
  return c;
}

}  // namespace

PointStencil::PointStencil(const TensorGrid& grid, Vec2 point) : grid_(&grid) {
  const auto [s_d, theta_d] = grid.geometry().inverse_map(point);
  if (s_d > 1.0 + 1e-12) throw Error(ErrorCode::NotInterior, "interpolation point outside the domain");
  const Real s = s_d;
  const Real theta = theta_d;
  angular_ = trig_cardinals(grid, theta);
  angular_pi_ = trig_cardinals(grid, theta + kPi);

  const auto& t = grid.chebyshev_nodes();
  const int nr = grid.nr();
  radial_.assign(nr, Real(0));
  for (int k = 0; k < nr; ++k) {
    if (s == t[k]) {
      radial_[k] = 1;
      return;
    }
  }
  Real total = 0;
  for (int k = 0; k < nr; ++k) {
    Real lam = (k % 2 == 0) ? 1 : -1;
    if (k == 0 || k == nr - 1) lam /= 2;
    radial_[k] = lam / (s - t[k]);
    total += radial_[k];
  }
  for (Real& w : radial_) w /= total;
}

Real PointStencil::evaluate(const Field& f) const {
  require_same_grid(*grid_, f.grid());
  const int nr = grid_->nr(), P = grid_->radial_count(), N = grid_->ntheta();
  const int M = nr - 1;
  Real acc = 0;
  for (int k = 0; k < nr; ++k) {
    if (radial_[k] == 0) continue;
    const bool positive = k < P;
    const int row = positive ? k : M - k;
    const std::vector<Real>& w = positive ? angular_ : angular_pi_;
    Real line = 0;
    for (int l = 0; l < N; ++l) line += w[l] * f[row * N + l];
    acc += radial_[k] * line;
  }
  return acc;
}

Real interpolate(const Field& f, Vec2 point) { return PointStencil(f.grid(), point).evaluate(f); }

// ---------------------------------------------------------------------------
// Diagnostics and export

ResolutionDiagnostic resolution_tail(const Field& f) {
  const TensorGrid& g = f.grid();
  const int nr = g.nr(), P = g.radial_count(), N = g.ntheta(), M = nr - 1;
  const double pi = std::numbers::pi;
  std::vector<double> cheb(nr, 0.0), four(N / 2 + 1, 0.0);
  std::vector<double> line(nr);
  for (int l = 0; l < N / 2; ++l) {
    for (int k = 0; k < nr; ++k) {
      line[k] = k < P ? to_double(f[k * N + l]) : to_double(f[(M - k) * N + g.antipode(l)]);
    }
    for (int j = 0; j < nr; ++j) {
      double acc = 0.0;
      for (int k = 0; k < nr; ++k) {
        const double w = (k == 0 || k == M) ? 0.5 : 1.0;
        acc += w * line[k] * std::cos(pi * j * k / M);
      }
      cheb[j] = std::max(cheb[j], std::abs(acc) * 2.0 / M);
    }
  }
  for (int i = 0; i < P; ++i) {
    for (int k = 0; k <= N / 2; ++k) {
      double re = 0.0, im = 0.0;
      for (int l = 0; l < N; ++l) {
        const double v = to_double(f[i * N + l]);
        re += v * std::cos(2 * pi * k * l / N);
        im -= v * std::sin(2 * pi * k * l / N);
      }
      four[k] = std::max(four[k], std::hypot(re, im) / N);
    }
  }
  auto tail = [](const std::vector<double>& c, std::size_t from) {
    const double lead = *std::max_element(c.begin(), c.end());
    if (lead == 0.0) return 0.0;
    double t = 0.0;
    for (std::size_t j = from; j < c.size(); ++j) t = std::max(t, c[j]);
    return t / lead;
  };
  return {tail(cheb, 3 * cheb.size() / 4), tail(four, 3 * four.size() / 4)};
}

void write_field_csv(const Field& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path);
  const TensorGrid& g = f.grid();
  out << "s,theta,x,y,value\n";
  char buf[256];
  for (int i = 0; i < g.radial_count(); ++i) {
    for (int l = 0; l < g.ntheta(); ++l) {
      const int idx = g.index(i, l);
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", to_double(g.s(i)),
                    to_double(g.theta(l)), to_double(g.x(idx)), to_double(g.y(idx)), to_double(f[idx]));
      out << buf;
    }
  }
}

}  // namespace overdet
