#include "overdet/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace overdet {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kDenseCheck = 4096;
constexpr int kMaxNewton = 20;
constexpr double kStationarityTol = 1e-12;

double wrap_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0) t += kTwoPi;
  return t;
}

}  // namespace

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonStarShaped: return "NonStarShaped";
    case ErrorCode::EmptyShape: return "EmptyShape";
    case ErrorCode::NotInterior: return "NotInterior";
    case ErrorCode::OrderTooHigh: return "OrderTooHigh";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::InvalidP: return "InvalidP";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::NonFiniteField: return "NonFiniteField";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::Unconverged: return "Unconverged";
    case ErrorCode::MaxOnBoundary: return "MaxOnBoundary";
    case ErrorCode::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorCode::CertificateViolated: return "CertificateViolated";
    case ErrorCode::InequalityViolated: return "InequalityViolated";
    case ErrorCode::NoiseFloor: return "NoiseFloor";
    case ErrorCode::BadDimension: return "BadDimension";
    case ErrorCode::InadmissibleShape: return "InadmissibleShape";
    case ErrorCode::UsageError: return "UsageError";
    case ErrorCode::CheckFailed: return "CheckFailed";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

BoundaryShape::BoundaryShape(double epsilon, std::vector<Mode> modes)
    : epsilon_(epsilon), modes_(std::move(modes)) {
  if (!std::isfinite(epsilon_) || epsilon_ < 0.0) {
    throw Error(ErrorCode::InadmissibleShape, "epsilon must be finite and >= 0");
  }
  for (const Mode& m : modes_) {
    if (m.k < 1) throw Error(ErrorCode::InadmissibleShape, "mode index k must be >= 1");
    if (!std::isfinite(m.a) || !std::isfinite(m.b)) {
      throw Error(ErrorCode::InadmissibleShape, "mode coefficients must be finite");
    }
  }
  double mx = 0.0;
  for (int i = 0; i < kDenseCheck; ++i) {
    const double theta = kTwoPi * i / kDenseCheck;
    mx = std::max(mx, std::abs(perturbation(theta)));
  }
  normalization_ = mx;
}

BoundaryShape BoundaryShape::preset(std::string_view name, double epsilon) {
  if (name == "disk") return disk();
  if (name == "cos1") return {epsilon, {{1, 1.0, 0.0}}};
  if (name == "cos2") return {epsilon, {{2, 1.0, 0.0}}};
  if (name == "cos3") return {epsilon, {{3, 1.0, 0.0}}};
  if (name == "mixed") return {epsilon, {{2, 0.6, 0.0}, {3, 0.0, 0.4}}};
  throw Error(ErrorCode::UsageError, "unknown shape preset '" + std::string(name) + "'");
}

std::vector<std::string> BoundaryShape::preset_names() {
  return {"cos2", "cos3", "cos1", "mixed"};
}

int BoundaryShape::max_mode() const {
  int k = 0;
  for (const Mode& m : modes_) k = std::max(k, m.k);
  return k;
}

BoundaryShape BoundaryShape::rotated(double phi) const {
  std::vector<Mode> out;
  out.reserve(modes_.size());
  for (const Mode& m : modes_) {
    const double c = std::cos(m.k * phi);
    const double s = std::sin(m.k * phi);
    out.push_back({m.k, m.a * c - m.b * s, m.a * s + m.b * c});
  }
  return {epsilon_, std::move(out)};
}

DomainGeometry build_domain(const BoundaryShape& shape) {
  if (shape.epsilon() > 0.0 && shape.modes().empty()) {
    throw Error(ErrorCode::EmptyShape, "epsilon > 0 requires at least one mode");
  }
  for (int i = 0; i < kDenseCheck; ++i) {
    const double theta = kTwoPi * i / kDenseCheck;
    if (!(shape.radius(theta) > 0.0)) {
      throw Error(ErrorCode::NonStarShaped,
                  "r(theta) <= 0 at theta = " + std::to_string(theta));
    }
  }
  // The interior map must be monotone in s: d/ds [s R(s, theta)] > 0.
  for (int j = 0; j <= 64; ++j) {
    const double s = j / 64.0;
    for (int i = 0; i < 256; ++i) {
      const double theta = kTwoPi * i / 256;
      const auto f = shape.factor(s, theta);
      if (!(f.R + s * f.R_s > 0.0) || !(f.R > 0.0)) {
        throw Error(ErrorCode::NonStarShaped, "disk map is not invertible for this shape");
      }
    }
  }

  DomainGeometry g;
  g.shape_ = shape;
  g.samples_.resize(DomainGeometry::kCoarseSamples);
  for (int i = 0; i < DomainGeometry::kCoarseSamples; ++i) {
    g.samples_[i] = g.boundary_point(kTwoPi * i / DomainGeometry::kCoarseSamples);
  }
  // Polar area formula, exact for a trigonometric polynomial.
  double sq = 0.0;
  for (const Mode& m : shape.modes()) sq += m.a * m.a + m.b * m.b;
  g.area_ = std::numbers::pi * (1.0 + 0.5 * shape.epsilon() * shape.epsilon() * sq);
  double per = 0.0;
  for (int i = 0; i < kDenseCheck; ++i) per += g.jacobian(kTwoPi * i / kDenseCheck);
  g.perimeter_ = per * kTwoPi / kDenseCheck;
  return g;
}

Vec2 DomainGeometry::boundary_point(double theta) const {
  const double r = shape_.radius(theta);
  return {r * std::cos(theta), r * std::sin(theta)};
}

Vec2 DomainGeometry::tangent(double theta) const {
  const double r = shape_.radius(theta);
  const double dr = shape_.radius(theta, 1);
  const double c = std::cos(theta), s = std::sin(theta);
  return {dr * c - r * s, dr * s + r * c};
}

Vec2 DomainGeometry::normal(double theta) const {
  const Vec2 t = tangent(theta);
  const double len = t.norm();
  return {t.y / len, -t.x / len};
}

double DomainGeometry::jacobian(double theta) const {
  return std::hypot(shape_.radius(theta), shape_.radius(theta, 1));
}

Vec2 DomainGeometry::map(double s, double theta) const {
  const double rho = s * shape_.factor(s, theta).R;
  return {rho * std::cos(theta), rho * std::sin(theta)};
}

std::pair<double, double> DomainGeometry::inverse_map(Vec2 x) const {
  const double rho = x.norm();
  if (rho == 0.0) return {0.0, 0.0};
  const double theta = wrap_angle(std::atan2(x.y, x.x));
  double s = rho / shape_.radius(theta);
  for (int it = 0; it < 50; ++it) {
    const auto f = shape_.factor(s, theta);
    const double res = s * f.R - rho;
    const double step = res / (f.R + s * f.R_s);
    s -= step;
    if (std::abs(step) < 1e-16 * std::max(1.0, s)) break;
  }
  return {s, theta};
}

bool DomainGeometry::contains(Vec2 x) const {
  const double rho = x.norm();
  if (rho == 0.0) return true;
  const double theta = std::atan2(x.y, x.x);
  return rho < shape_.radius(theta);
}

BoundaryExtremum DomainGeometry::extremize(Vec2 p, bool maximize) const {
  const int n = kCoarseSamples;
  const double sign = maximize ? -1.0 : 1.0;
  auto objective = [&](int i) { return sign * (samples_[i] - p).dot(samples_[i] - p); };

  // Local minima of the signed objective on the coarse ring are Newton seeds.
  std::vector<int> seeds;
  for (int i = 0; i < n; ++i) {
    const double f = objective(i);
    if (f <= objective((i + n - 1) % n) && f <= objective((i + 1) % n)) seeds.push_back(i);
  }
  std::sort(seeds.begin(), seeds.end(),
            [&](int a, int b) { return objective(a) < objective(b); });
  if (seeds.size() > 4) seeds.resize(4);

  auto derivs = [&](double theta, double& g, double& g1, double& g2) {
    const double r = shape_.radius(theta);
    const double r1 = shape_.radius(theta, 1);
    const double r2 = shape_.radius(theta, 2);
    const double c = std::cos(theta), s = std::sin(theta);
    const Vec2 x{r * c, r * s};
    const Vec2 x1{r1 * c - r * s, r1 * s + r * c};
    const Vec2 x2{(r2 - r) * c - 2 * r1 * s, (r2 - r) * s + 2 * r1 * c};
    const Vec2 d = x - p;
    g = d.dot(d);
    g1 = 2 * d.dot(x1);
    g2 = 2 * (x1.dot(x1) + d.dot(x2));
  };

  const double h = kTwoPi / n;
  BoundaryExtremum best;
  bool have = false;
  for (int seed : seeds) {
    double theta = h * seed;
    double g = 0, g1 = 0, g2 = 0;
    bool ok = false;
    for (int it = 0; it <= kMaxNewton; ++it) {
      derivs(theta, g, g1, g2);
      if (std::abs(g1) <= kStationarityTol) {
        ok = true;
        break;
      }
      if (it == kMaxNewton || sign * g2 <= 0.0) break;
      double step = g1 / g2;
      step = std::clamp(step, -2 * h, 2 * h);
      theta -= step;
    }
    const double value = std::sqrt(g);
    if (ok && (!have || sign * value < sign * best.value)) {
      best = {value, wrap_angle(theta), std::abs(g1), false};
      have = true;
    }
  }
  if (!have) {
    // Dense-scan fallback.
    constexpr int kDense = 1 << 16;
    double bt = 0.0, bg = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kDense; ++i) {
      const double theta = kTwoPi * i / kDense;
      const Vec2 d = boundary_point(theta) - p;
      const double f = sign * d.dot(d);
      if (f < bg) {
        bg = f;
        bt = theta;
      }
    }
    double g = 0, g1 = 0, g2 = 0;
    derivs(bt, g, g1, g2);
    best = {std::sqrt(g), bt, std::abs(g1), true};
  }
  return best;
}

BoundaryExtremum DomainGeometry::distance_to_boundary(Vec2 x) const {
  if (!contains(x)) throw Error(ErrorCode::NotInterior, "point is not strictly inside the domain");
  return extremize(x, false);
}

double DomainGeometry::distance_unchecked(Vec2 x) const { return extremize(x, false).value; }

Radii DomainGeometry::radii_about(Vec2 z) const {
  if (!contains(z)) throw Error(ErrorCode::NotInterior, "center is not strictly inside the domain");
  return {extremize(z, false), extremize(z, true)};
}

ClosenessReport DomainGeometry::closeness_proxy(const ClosenessCaps& caps) const {
  ClosenessReport rep;
  constexpr int kSamples = 8192;
  for (int k = 0; k <= 5; ++k) {
    double mx = 0.0;
    for (int i = 0; i < kSamples; ++i) {
      const double theta = kTwoPi * i / kSamples;
      mx = std::max(mx, std::abs(shape_.epsilon() * shape_.perturbation(theta, k)));
    }
    rep.derivative_sup[k] = mx;
  }
  rep.value = *std::max_element(rep.derivative_sup, rep.derivative_sup + 5);
  rep.fifth_derivative = rep.derivative_sup[5];
  double mode_cap = 0.0;
  for (const Mode& m : shape_.modes()) {
    const double k4 = std::pow(static_cast<double>(m.k), 4);
    mode_cap = std::max(mode_cap, k4 * std::max(std::abs(m.a), std::abs(m.b)));
  }
  rep.mode_cap_value = shape_.epsilon() * mode_cap;
  rep.exceeds_cap = rep.mode_cap_value > caps.derivative_cap * (1 + 1e-12) ||
                    shape_.amplitude() > caps.amplitude_cap * (1 + 1e-12);
  return rep;
}

}  // namespace overdet
