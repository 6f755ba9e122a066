#pragma once

#include "overdet/identities.hpp"
#include "overdet/stability.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace overdet {

using Json = nlohmann::ordered_json;

/// Settings shared by all subcommands. Loaded from a JSON file, then
/// overridden by command-line flags.
struct RunConfig {
  std::string shape_spec = "disk";  // preset name, "disk", or path to a shape file
  double epsilon = 0.05;            // amplitude for preset shapes
  int nr = 32;
  int ntheta = 64;
  double solve_tolerance = 1e-10;
  CChoice c_choice = CChoice::SurfaceMean;
  double two_star = 10.0;
  double sigma_margin = 0.02;
  double beta_margin = 0.02;
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 20240601;

  /// Throws UsageError on out-of-range values.
  void validate() const;
};

RunConfig load_run_config(const std::filesystem::path& path);
void apply_config_json(RunConfig& cfg, const Json& j);

/// {"epsilon": e, "modes": [{"k": k, "a": a, "b": b}]}
BoundaryShape parse_shape_json(const Json& j);
BoundaryShape load_shape_file(const std::filesystem::path& path);
Json shape_to_json(const BoundaryShape& shape);
/// Preset name, "disk", or shape file path.
BoundaryShape resolve_shape(const std::string& spec, double epsilon);

/// Doubles printed with 17 significant digits; keys keep insertion order.
std::string dump_json(const Json& j);
std::string format_double(double x);
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// Parses "0.04,0.02" or "2,inf".
std::vector<double> parse_number_list(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);
std::string format_p(double p);

Json to_json(const SolveReport& r);
Json to_json(const IdentityReport& r);
Json to_json(const SweepRecord& r, const std::vector<double>& p_list);

/// z, R2, c, sup_h, sup_grad_h, min_deficit, q_residuals.
Json bundle_summary(const SolutionBundle& b);

/// Full verification of one shape: identities, auxiliary checks, certificate.
struct VerifyResult {
  std::vector<IdentityReport> identities;
  Json summary;  // every measured quantity
  std::vector<std::string> failures;
};
VerifyResult verify_shape(const BoundaryShape& shape, const RunConfig& cfg);

/// sweep.csv, fits.json, plotdata/*.dat and summary.txt under dir.
void write_sweep_outputs(const SweepResult& result, const std::filesystem::path& dir);
std::string sweep_csv(const SweepResult& result);
Json sweep_fits_json(const SweepResult& result);

Json radial_table(const std::vector<int>& dims);

/// Default sweep configuration used for goldens and acceptance.
inline const std::vector<double> kGoldenEps{0.04, 0.02, 0.01, 0.005};
inline const std::vector<double> kGoldenP{1.0, 2.0, 3.0, 10.0, kInfinity};

/// Sweep options behind the golden sweeps: default grid, every p in kGoldenP.
SweepOptions golden_sweep_options();
/// Golden entries measured from one family sweep.
Json sweep_goldens(const SweepResult& sweep);

/// Golden values: a flat map of name -> {value, rel_tol, abs_tol}.
Json compute_goldens();
/// Names of entries that differ from the golden file beyond tolerance.
std::vector<std::string> compare_goldens(const Json& golden, const Json& current);

/// Canonical golden file location inside the source tree.
std::filesystem::path default_golden_path();

}  // namespace overdet
