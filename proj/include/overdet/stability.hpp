#pragma once

#include "overdet/analysis.hpp"
#include "overdet/solver.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace overdet {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Stability exponents. p ranges over [1, inf]; kInfinity stands for p = inf.
struct ExponentTables {
  /// (n+2)p / (n(n+2p-1)) for p < 3/2, 3/(2n) otherwise.
  static double sigma(double p, int n);
  /// 1/3 for p <= 3, (n+p-1)/((n+2)p) for 3 < p < inf, 1/(n+2) at p = inf.
  static double beta(double p, int n);
};

/// rho_2^2 - rho_1^2 about z against 2n osc h + 4n |Delta u - c|_inf. Both sides
/// use boundary extrema of the interpolants, not just node values.
struct OscillationBound {
  double rho1 = 0.0;
  double rho2 = 0.0;
  double gap = 0.0;         // rho_2 - rho_1
  double lhs = 0.0;         // rho_2^2 - rho_1^2
  double oscillation = 0.0; // max h - min h on the boundary
  double deviation_inf = 0.0;  // max |Delta u - c| on the boundary
  double rhs = 0.0;
};
/// Throws InequalityViolated if lhs exceeds rhs by more than 1e-9.
OscillationBound gap_and_oscillation(const SolutionBundle& b);

/// L^inf-midrange of Delta u on the boundary, the c minimizing the sup deviation.
Real midrange_c(const SolutionBundle& b);

/// Distance field and derivatives of h shared by the chain and trace measurements.
struct HarmonicData {
  Field distance;  // d to the boundary at each node
  Gradient grad_h;
  Hessian hess_h;
  Real weighted_integral;  // int d^2 |D^2 h|^2
};
HarmonicData harmonic_data(const SolutionBundle& b);

/// Values below this are treated as zero when forming ratios.
inline constexpr double kDegenerate = 1e-14;

struct ChainQuantities {
  double two_star = 10.0;
  double exponent = 0.0;      // 2* / (n + 2*)
  double oscillation = 0.0;   // max h - min h on the boundary
  double mean_deviation = 0.0;  // |h - h_Omega|_{L^{2*}}
  double gradient = 0.0;      // |grad h|_{L^2}
  double weighted = 0.0;      // |d D^2 h|_{L^2}
  // Successive ratios of the chain; empty when a denominator vanishes.
  std::optional<double> ratio1;  // osc h / A^e
  std::optional<double> ratio2;  // (A / B)^e
  std::optional<double> ratio3;  // (B / W)^e
  std::optional<double> gradient_ratio;  // B^2 / W^2
};
ChainQuantities chain_quantities(const SolutionBundle& b, double two_star = 10.0);
ChainQuantities chain_quantities(const SolutionBundle& b, const HarmonicData& hd, double two_star = 10.0);

struct TraceRatio {
  double p = 2.0;
  double beta = 0.0;
  double numerator = 0.0;    // |grad h|_{L^p(boundary)}
  double denominator = 0.0;  // (int d^2 |D^2 h|^2)^beta
  double ratio = 0.0;
};
/// Uses beta = beta(p) - margin. Throws DegenerateDenominator when the weighted
/// integral is below kDegenerate.
TraceRatio trace_ratio(const SolutionBundle& b, double p, double beta_margin = 0.02);
TraceRatio trace_ratio_with_beta(const SolutionBundle& b, const HarmonicData& hd, double p, double beta);

struct PositivityCertificate {
  double max_hessian_psi_sq = 0.0;  // max |D^2 psi|^2
  double c_omega = 0.0;             // 1 / (2 (1 + 2 max |D^2 psi|^2))
  double min_w = 0.0;               // min (u - c_omega psi^2)
  double eta = 0.0;                 // min u / d^2 over nodes with d >= 0.01
  double min_u = 0.0;
  double min_psi = 0.0;
};
/// Throws CertificateViolated when min w < -tolerance.
PositivityCertificate positivity_certificate(const SolutionBundle& b, double tolerance = 1e-9);
PositivityCertificate positivity_certificate(const SolutionBundle& b, const Field& distance, double tolerance = 1e-9);

struct SweepOptions {
  int nr = 32;
  int ntheta = 64;
  std::vector<double> p_list{2.0, kInfinity};
  double two_star = 10.0;
  double sigma_margin = 0.02;
  double beta_margin = 0.02;
  double noise_factor = 1e3;
  double amplitude_cap = 0.05;
  CChoice c_choice = CChoice::SurfaceMean;
  SolveOptions solve;
};

/// One sweep point.
struct SweepRecord {
  double epsilon = 0.0;
  Vec2 z;
  Vec2 centroid;
  double rho1 = 0.0;
  double rho2 = 0.0;
  double gap = 0.0;
  double gap_centroid = 0.0;  // rho_2 - rho_1 about the centroid
  double c = 0.0;
  std::vector<double> deviation;     // |Delta u - c|_{L^p}, per p
  std::vector<double> deviation_c0;  // same with c = c0
  double deviation_inf = 0.0;        // |Delta u - c|_{L^inf}
  ChainQuantities chain;
  std::vector<std::optional<double>> trace;  // per p, beta = beta_p - margin
  std::optional<double> trace_inf_exact;     // p = inf, beta = 1/(n+2)
  double identity_lhs = 0.0;
  double identity_residual = 0.0;  // max rel residual of the boundary identities
  PositivityCertificate certificate;
  double closeness = 0.0;
  bool closeness_flag = false;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  int points = 0;
};

struct FitResult {
  double p = 2.0;
  double sigma = 0.0;     // exponent used in the boundedness constant
  double constant = 0.0;  // max gap / (dev_p^sigma + dev_inf)
  LineFit gap_vs_deviation;  // log gap against log |Delta u - c|_p above the noise floor
  LineFit deviation_vs_eps;  // log |Delta u - c|_p against log eps
  double trace_max = 0.0;    // max trace ratio across eps
};

struct SweepResult {
  std::string family;
  SweepOptions options;
  std::vector<SweepRecord> records;
  std::vector<FitResult> fits;  // per p
  LineFit gap_vs_eps;
  double trace_inf_exact_max = 0.0;
  // max over eps of each chain ratio, and max/min across the sweep
  double chain_max[4] = {};
  double chain_spread[4] = {};
};

/// Least-squares line through (log x, log y).
LineFit log_log_fit(const std::vector<double>& x, const std::vector<double>& y);

/// Builds the shape, solves both problems and evaluates every stability quantity.
SweepRecord evaluate_point(const BoundaryShape& shape, const SweepOptions& opts);

/// Runs a decreasing eps list on a shape family. All shapes are validated before
/// any solve; points run concurrently with results ordered by eps index.
SweepResult stability_sweep(const std::string& family, const BoundaryShape& family_shape,
                            const std::vector<double>& eps_list, const SweepOptions& opts = {});

}  // namespace overdet
