// overdet_lab: solve, verify and sweep the clamped-plate overdetermined problem.

#include "overdet/cli_io.hpp"
#include "overdet/radial.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

using namespace overdet;

namespace {

constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;

// Flags shared by the shape-based subcommands; unset flags fall back to the config file.
struct CommonFlags {
  std::string config;
  std::string shape;
  double eps = -1.0;
  int nr = 0;
  int ntheta = 0;
  double tolerance = 0.0;
  std::string c_choice;
  std::string out;
  long long seed = -1;

  void add_to(CLI::App* app, bool with_shape = true) {
    app->add_option("--config", config, "RunConfig JSON file");
    if (with_shape) {
      app->add_option("--shape", shape, "disk, preset name, shape file or inline JSON");
      app->add_option("--eps", eps, "amplitude for preset shapes");
    }
    app->add_option("--nr", nr, "radial collocation count (even, 8..128)");
    app->add_option("--ntheta", ntheta, "angular collocation count (even, 16..256)");
    app->add_option("--tolerance", tolerance, "solver certification tolerance");
    app->add_option("--c", c_choice, "boundary constant: mean or c0");
    app->add_option("--out", out, "output directory");
    app->add_option("--seed", seed, "seed for randomized spot checks");
  }

  RunConfig resolve() const {
    RunConfig cfg = config.empty() ? RunConfig{} : load_run_config(config);
    Json j = Json::object();
    if (!shape.empty()) j["shape"] = shape;
    if (eps >= 0.0) j["epsilon"] = eps;
    if (nr) j["nr"] = nr;
    if (ntheta) j["ntheta"] = ntheta;
    if (tolerance) j["tolerance"] = tolerance;
    if (!c_choice.empty()) j["c_choice"] = c_choice;
    if (!out.empty()) j["out_dir"] = out;
    if (seed >= 0) j["seed"] = static_cast<std::uint64_t>(seed);
    apply_config_json(cfg, j);
    cfg.validate();
    return cfg;
  }
};

int report_failures(const std::vector<std::string>& failures) {
  if (failures.empty()) return 0;
  std::cerr << "failed checks:\n";
  for (const std::string& f : failures) std::cerr << "  " << f << "\n";
  return kCheckFailed;
}

int run_solve(const RunConfig& cfg) {
  const BoundaryShape shape = resolve_shape(cfg.shape_spec, cfg.epsilon);
  const GridPtr grid = TensorGrid::make(build_domain(shape), cfg.nr, cfg.ntheta);
  SolveOptions so;
  so.tolerance = cfg.solve_tolerance;
  const SolveReport u = solve_clamped_biharmonic(grid, Real(1), so);
  const SolveReport psi = solve_torsion(grid, so);

  std::filesystem::create_directories(cfg.out_dir);
  write_field_csv(u.solution, (cfg.out_dir / "u.csv").string());
  write_field_csv(psi.solution, (cfg.out_dir / "psi.csv").string());
  write_text(cfg.out_dir / "solve_report.json",
             dump_json({{"shape", shape_to_json(shape)}, {"reports", {to_json(u), to_json(psi)}}}));

  std::ostringstream s;
  for (const SolveReport* r : {&u, &psi}) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-18s interior %.3e  cond %.3e  steps %d  %s\n", r->problem.c_str(),
                  r->interior_residual, r->condition_estimate, r->refinement_steps,
                  r->converged ? "certified" : "NOT certified");
    s << buf;
  }
  write_text(cfg.out_dir / "summary.txt", s.str());
  std::cout << s.str();

  std::vector<std::string> failures;
  if (!u.converged) failures.push_back("clamped solve not certified");
  if (!psi.converged) failures.push_back("torsion solve not certified");
  return report_failures(failures);
}

int run_verify(const RunConfig& cfg) {
  const BoundaryShape shape = resolve_shape(cfg.shape_spec, cfg.epsilon);
  const VerifyResult v = verify_shape(shape, cfg);

  Json ids = Json::array();
  for (const IdentityReport& r : v.identities) ids.push_back(to_json(r));
  write_text(cfg.out_dir / "identities.json", dump_json(ids));
  write_text(cfg.out_dir / "bundle.json", dump_json(v.summary["bundle"]));
  write_text(cfg.out_dir / "verify.json", dump_json(v.summary));

  std::ostringstream s;
  char buf[256];
  s << "identity                       lhs                     rhs                     rel residual\n";
  for (const IdentityReport& r : v.identities) {
    std::snprintf(buf, sizeof buf, "%-28s %23.16e %23.16e %10.3e\n", r.name.c_str(), r.lhs, r.rhs, r.rel_residual);
    s << buf;
  }
  s << "\ncheck                        value        bound        status\n";
  for (const Json& c : v.summary["checks"]) {
    const char* status = c["pass"].get<bool>() ? "ok" : (c["enforced"].get<bool>() ? "FAIL" : "skipped");
    std::snprintf(buf, sizeof buf, "%-28s %12.4e %s %10.3e  %s\n", c["name"].get<std::string>().c_str(),
                  c["value"].get<double>(), c["kind"] == "max" ? "<=" : ">=", c["bound"].get<double>(), status);
    s << buf;
  }
  write_text(cfg.out_dir / "summary.txt", s.str());
  std::cout << s.str();
  return report_failures(v.failures);
}

int run_sweep(const RunConfig& cfg, const std::string& family, const std::string& eps_text,
              const std::string& p_text) {
  SweepOptions o;
  o.nr = cfg.nr;
  o.ntheta = cfg.ntheta;
  o.p_list = parse_number_list(p_text);
  o.two_star = cfg.two_star;
  o.sigma_margin = cfg.sigma_margin;
  o.beta_margin = cfg.beta_margin;
  o.c_choice = cfg.c_choice;
  o.solve.tolerance = cfg.solve_tolerance;
  const std::vector<double> eps = parse_number_list(eps_text);

  // A shape file supplies the mode pattern; its epsilon is replaced by each sweep value.
  const BoundaryShape base = resolve_shape(family, 1.0);
  const std::string name = std::filesystem::exists(family) ? std::filesystem::path(family).stem().string() : family;
  const SweepResult result = stability_sweep(name, base, eps, o);
  write_sweep_outputs(result, cfg.out_dir);
  std::cout << read_text(cfg.out_dir / "summary.txt");
  return 0;
}

int run_convergence(const RunConfig& cfg, const std::string& nr_text) {
  const BoundaryShape shape = resolve_shape(cfg.shape_spec, cfg.epsilon);
  const DomainGeometry geom = build_domain(shape);
  std::vector<std::pair<int, int>> levels;
  for (int nr : parse_int_list(nr_text)) levels.emplace_back(nr, 2 * nr);
  const std::vector<ConvergenceRow> rows = manufactured_convergence(geom, level_function_squared(geom), levels);

  std::string csv = "nr,ntheta,sup_error,interior_residual\n";
  std::ostringstream s;
  s << "   nr  ntheta   sup error    residual\n";
  for (const ConvergenceRow& r : rows) {
    csv += std::to_string(r.nr) + "," + std::to_string(r.ntheta) + "," + format_double(r.sup_error) + "," +
           format_double(r.interior_residual) + "\n";
    char buf[128];
    std::snprintf(buf, sizeof buf, "%5d  %6d  %10.3e  %10.3e\n", r.nr, r.ntheta, r.sup_error, r.interior_residual);
    s << buf;
  }
  const bool ok = converges_spectrally(rows);
  s << (ok ? "spectral convergence: ok\n" : "spectral convergence: FAIL\n");
  write_text(cfg.out_dir / "convergence.csv", csv);
  write_text(cfg.out_dir / "summary.txt", s.str());
  std::cout << s.str();
  return ok ? 0 : kCheckFailed;
}

int run_radial(const std::string& dims_text, const std::string& out) {
  const Json table = radial_table(parse_int_list(dims_text));
  std::printf("%3s %22s %22s %22s %22s %22s\n", "n", "c0", "R2", "u0(0)", "psi0(0)", "int u0");
  for (const Json& row : table) {
    std::printf("%3d %22.17g %22.17g %22.17g %22.17g %22.17g\n", row["n"].get<int>(), row["c0"].get<double>(),
                row["R2"].get<double>(), row["u0_center"].get<double>(), row["psi0_center"].get<double>(),
                row["integral_u0"].get<double>());
  }
  if (!out.empty()) write_text(std::filesystem::path(out) / "radial.json", dump_json(table));
  return 0;
}

int run_goldens(bool write, bool check, const std::string& file) {
  if (write == check) throw Error(ErrorCode::UsageError, "goldens needs exactly one of --write or --check");
  const std::filesystem::path path = file.empty() ? default_golden_path() : std::filesystem::path(file);
  const Json current = compute_goldens();
  if (write) {
    write_text(path, dump_json(current));
    std::cout << "wrote " << current.size() << " golden values to " << path.string() << "\n";
    return 0;
  }
  const std::vector<std::string> bad = compare_goldens(Json::parse(read_text(path)), current);
  std::cout << current.size() - std::min(current.size(), bad.size()) << " of " << current.size()
            << " golden values match\n";
  return report_failures(bad);
}

bool is_input_error(ErrorCode c) {
  switch (c) {
    case ErrorCode::UsageError:
    case ErrorCode::InadmissibleShape:
    case ErrorCode::NonStarShaped:
    case ErrorCode::EmptyShape:
    case ErrorCode::InvalidP:
    case ErrorCode::InvalidGrid:
    case ErrorCode::BadDimension:
    case ErrorCode::OrderTooHigh:
      return true;
    default:
      return false;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"overdet_lab: clamped-plate overdetermined problem laboratory"};
  app.require_subcommand(1);

  CommonFlags solve_f, verify_f, sweep_f, conv_f;
  CLI::App* solve = app.add_subcommand("solve", "solve the clamped plate and torsion problems");
  solve_f.add_to(solve);
  CLI::App* verify = app.add_subcommand("verify", "check the integral identities on one shape");
  verify_f.add_to(verify);

  CLI::App* sweep = app.add_subcommand("sweep", "stability sweep over a shape family");
  sweep_f.add_to(sweep, false);
  std::string family, eps_text = "0.04,0.02,0.01,0.005", p_text = "2,inf";
  double two_star = 0.0, sigma_margin = -1.0, beta_margin = -1.0;
  sweep->add_option("--family", family, "preset name or shape file")->required();
  sweep->add_option("--eps", eps_text, "decreasing amplitude list");
  sweep->add_option("--p", p_text, "exponent list, inf allowed");
  sweep->add_option("--two-star", two_star, "Sobolev exponent 2*");
  sweep->add_option("--sigma-margin", sigma_margin, "subtracted from sigma_p");
  sweep->add_option("--beta-margin", beta_margin, "subtracted from beta_p");

  CLI::App* conv = app.add_subcommand("convergence", "manufactured-solution convergence study");
  conv_f.add_to(conv);
  std::string nr_list = "8,16,32";
  conv->add_option("--levels", nr_list, "nr values; ntheta = 2 nr");

  CLI::App* radial = app.add_subcommand("radial", "closed-form constants on the unit ball");
  std::string dims = "2,3", radial_out;
  radial->add_option("--n", dims, "dimension list");
  radial->add_option("--out", radial_out, "output directory");

  CLI::App* goldens = app.add_subcommand("goldens", "write or check golden values");
  bool write = false, check = false;
  std::string golden_file;
  goldens->add_flag("--write", write, "recompute and store");
  goldens->add_flag("--check", check, "recompute and compare");
  goldens->add_option("--file", golden_file, "golden file path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*solve) return run_solve(solve_f.resolve());
    if (*verify) return run_verify(verify_f.resolve());
    if (*sweep) {
      RunConfig cfg = sweep_f.resolve();
      if (two_star > 0.0) cfg.two_star = two_star;
      if (sigma_margin >= 0.0) cfg.sigma_margin = sigma_margin;
      if (beta_margin >= 0.0) cfg.beta_margin = beta_margin;
      cfg.validate();
      return run_sweep(cfg, family, eps_text, p_text);
    }
    if (*conv) return run_convergence(conv_f.resolve(), nr_list);
    if (*radial) return run_radial(dims, radial_out);
    if (*goldens) return run_goldens(write, check, golden_file);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return is_input_error(e.code()) ? kUsage : kCheckFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCheckFailed;
  }
  return kUsage;
}
