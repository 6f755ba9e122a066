#include "overdet/cli_io.hpp"

#include "overdet/radial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#ifndef OVERDET_SOURCE_DIR
#define OVERDET_SOURCE_DIR "."
#endif

namespace overdet {

namespace {

[[noreturn]] void usage(const std::string& what) { throw Error(ErrorCode::UsageError, what); }

void dump_value(const Json& j, int depth, std::string& out) {
  const std::string pad(2 * depth + 2, ' ');
  const std::string close_pad(2 * depth, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        dump_value(it.value(), depth + 1, out);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      const bool flat = std::none_of(j.begin(), j.end(), [](const Json& e) { return e.is_structured(); });
      out += flat ? "[" : "[\n";
      bool first = true;
      for (const Json& e : j) {
        if (!first) out += flat ? ", " : ",\n";
        first = false;
        if (!flat) out += pad;
        dump_value(e, depth + 1, out);
      }
      out += flat ? "]" : "\n" + close_pad + "]";
      return;
    }
    case Json::value_t::number_float:
      out += std::isfinite(j.get<double>()) ? format_double(j.get<double>()) : "null";
      return;
    default:
      out += j.dump();
  }
}

Json fit_json(const LineFit& f) { return {{"slope", f.slope}, {"intercept", f.intercept}, {"points", f.points}}; }

Json opt_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::string opt_csv(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

const char* c_choice_name(CChoice c) { return c == CChoice::SurfaceMean ? "mean" : "c0"; }

CChoice parse_c_choice(const std::string& s) {
  if (s == "mean") return CChoice::SurfaceMean;
  if (s == "c0") return CChoice::Radial;
  usage("c-choice must be mean or c0, got " + s);
}

struct Check {
  std::string name;
  double value;
  double bound;
  bool upper;  // value <= bound, else value >= bound
  bool enforced = true;
};

}  // namespace

// ----------------------------------------------------------------------------
// Configuration

void RunConfig::validate() const {
  if (nr < TensorGrid::kMinNr || nr > TensorGrid::kMaxNr || nr % 2 != 0) {
    usage("nr must be even and within [8, 128]");
  }
  if (ntheta < TensorGrid::kMinNtheta || ntheta > TensorGrid::kMaxNtheta || ntheta % 2 != 0) {
    usage("ntheta must be even and within [16, 256]");
  }
  if (!(solve_tolerance > 0.0)) usage("tolerance must be positive");
  if (!(two_star > 0.0)) usage("two_star must be positive");
  if (!(sigma_margin >= 0.0) || !(beta_margin >= 0.0)) usage("margins must be non-negative");
  if (!(epsilon >= 0.0)) usage("epsilon must be non-negative");
}

void apply_config_json(RunConfig& cfg, const Json& j) {
  if (!j.is_object()) usage("config must be a JSON object");
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& key = it.key();
      const Json& v = it.value();
      if (key == "shape") {
        cfg.shape_spec = v.is_string() ? v.get<std::string>() : v.dump();
      } else if (key == "epsilon") {
        cfg.epsilon = v.get<double>();
      } else if (key == "nr") {
        cfg.nr = v.get<int>();
      } else if (key == "ntheta") {
        cfg.ntheta = v.get<int>();
      } else if (key == "tolerance") {
        cfg.solve_tolerance = v.get<double>();
      } else if (key == "c_choice") {
        cfg.c_choice = parse_c_choice(v.get<std::string>());
      } else if (key == "two_star") {
        cfg.two_star = v.get<double>();
      } else if (key == "sigma_margin") {
        cfg.sigma_margin = v.get<double>();
      } else if (key == "beta_margin") {
        cfg.beta_margin = v.get<double>();
      } else if (key == "out_dir") {
        cfg.out_dir = v.get<std::string>();
      } else if (key == "seed") {
        cfg.seed = v.get<std::uint64_t>();
      } else {
        usage("unknown config key " + key);
      }
    }
  } catch (const Json::exception& e) {
    usage(std::string("bad config value: ") + e.what());
  }
}

RunConfig load_run_config(const std::filesystem::path& path) {
  RunConfig cfg;
  Json j;
  try {
    j = Json::parse(read_text(path));
  } catch (const Json::exception& e) {
    usage("cannot parse " + path.string() + ": " + e.what());
  }
  apply_config_json(cfg, j);
  cfg.validate();
  return cfg;
}

BoundaryShape parse_shape_json(const Json& j) {
  try {
    const double eps = j.at("epsilon").get<double>();
    std::vector<Mode> modes;
    for (const Json& m : j.at("modes")) {
      modes.push_back({m.at("k").get<int>(), m.value("a", 0.0), m.value("b", 0.0)});
    }
    return BoundaryShape(eps, std::move(modes));
  } catch (const Json::exception& e) {
    usage(std::string("bad shape JSON: ") + e.what());
  }
}

BoundaryShape load_shape_file(const std::filesystem::path& path) {
  try {
    return parse_shape_json(Json::parse(read_text(path)));
  } catch (const Json::parse_error& e) {
    usage("cannot parse " + path.string() + ": " + e.what());
  }
}

Json shape_to_json(const BoundaryShape& shape) {
  Json modes = Json::array();
  for (const Mode& m : shape.modes()) modes.push_back({{"k", m.k}, {"a", m.a}, {"b", m.b}});
  return {{"epsilon", shape.epsilon()}, {"modes", modes}};
}

BoundaryShape resolve_shape(const std::string& spec, double epsilon) {
  if (spec == "disk") return BoundaryShape::disk();
  const std::vector<std::string> names = BoundaryShape::preset_names();
  if (std::find(names.begin(), names.end(), spec) != names.end()) return BoundaryShape::preset(spec, epsilon);
  if (!spec.empty() && spec.front() == '{') {
    try {
      return parse_shape_json(Json::parse(spec));
    } catch (const Json::parse_error& e) {
      usage(std::string("bad inline shape: ") + e.what());
    }
  }
  if (std::filesystem::exists(spec)) return load_shape_file(spec);
  usage("shape must be disk, a preset name or a shape file: " + spec);
}

// ----------------------------------------------------------------------------
// Serialization

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x == 0.0 ? 0.0 : x);
  return buf;
}

std::string dump_json(const Json& j) {
  std::string out;
  dump_value(j, 0, out);
  out += "\n";
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "inf" || item == "infinity") {
      out.push_back(kInfinity);
      continue;
    }
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      usage("not a number: '" + item + "'");
    }
  }
  if (out.empty()) usage("empty list");
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (double x : parse_number_list(text)) {
    if (x != std::floor(x) || !std::isfinite(x)) usage("not an integer: " + format_double(x));
    out.push_back(static_cast<int>(x));
  }
  return out;
}

std::string format_p(double p) { return std::isinf(p) ? "inf" : format_double(p); }

Json to_json(const SolveReport& r) {
  Json bc = Json::object();
  for (const NamedResidual& n : r.boundary_residuals) bc[n.name] = n.value;
  return {{"problem", r.problem},
          {"nr", r.nr},
          {"ntheta", r.ntheta},
          {"converged", r.converged},
          {"interior_residual", r.interior_residual},
          {"boundary_residuals", bc},
          {"condition_estimate", r.condition_estimate},
          {"refinement_steps", r.refinement_steps},
          {"max_value", to_double(r.solution.max())}};
}

Json to_json(const IdentityReport& r) {
  return {{"name", r.name},
          {"lhs", r.lhs},
          {"rhs", r.rhs},
          {"abs_residual", r.abs_residual},
          {"rel_residual", r.rel_residual},
          {"scale_floor", r.scale_floor},
          {"inputs_hash", r.inputs_hash}};
}

Json to_json(const SweepRecord& r, const std::vector<double>& p_list) {
  Json dev = Json::object(), dev0 = Json::object(), trace = Json::object();
  for (std::size_t j = 0; j < p_list.size(); ++j) {
    dev[format_p(p_list[j])] = r.deviation[j];
    dev0[format_p(p_list[j])] = r.deviation_c0[j];
    trace[format_p(p_list[j])] = opt_json(r.trace[j]);
  }
  return {{"epsilon", r.epsilon},
          {"z", {r.z.x, r.z.y}},
          {"rho1", r.rho1},
          {"rho2", r.rho2},
          {"gap", r.gap},
          {"c", r.c},
          {"deviation", dev},
          {"deviation_c0", dev0},
          {"deviation_inf", r.deviation_inf},
          {"chain",
           {{"ratio1", opt_json(r.chain.ratio1)},
            {"ratio2", opt_json(r.chain.ratio2)},
            {"ratio3", opt_json(r.chain.ratio3)},
            {"gradient_ratio", opt_json(r.chain.gradient_ratio)}}},
          {"trace", trace},
          {"trace_inf_exact", opt_json(r.trace_inf_exact)}};
}

Json bundle_summary(const SolutionBundle& b) {
  const Gradient gh = gradient(b.h);
  Real sup_grad = 0;
  for (int k = 0; k < b.h.size(); ++k) {
    sup_grad = std::max(sup_grad, Real(sqrt(gh.x[k] * gh.x[k] + gh.y[k] * gh.y[k])));
  }
  const DeficitResult d = deficit(b);
  const AuxiliaryQ q = auxiliary_q(b);
  return {{"z", {b.z.x, b.z.y}},
          {"R2", to_double(b.r_squared)},
          {"c", to_double(b.c)},
          {"c_choice", c_choice_name(b.c_choice)},
          {"sup_h", to_double(b.h.sup_norm())},
          {"sup_grad_h", to_double(sup_grad)},
          {"min_deficit", d.min_value},
          {"q_residuals", {{"laplacian", q.laplacian_residual}, {"bilaplacian", q.bilaplacian_residual}}}};
}

// ----------------------------------------------------------------------------
// verify

VerifyResult verify_shape(const BoundaryShape& shape, const RunConfig& cfg) {
  cfg.validate();
  const DomainGeometry geom = build_domain(shape);
  const GridPtr grid = TensorGrid::make(geom, cfg.nr, cfg.ntheta);
  SolveOptions so;
  so.tolerance = cfg.solve_tolerance;
  const SolveReport ru = solve_clamped_biharmonic(grid, Real(1), so);
  const SolveReport rpsi = solve_torsion(grid, so);
  AnalysisOptions ao;
  ao.c_choice = cfg.c_choice;
  const SolutionBundle b = derive_fields(ru.solution, rpsi.solution, ao);

  VerifyResult out;
  const IdentityReport ps = pucci_serrin(b, b.z);
  const IdentityReport mi = main_identity(b, b.z, b.c);
  const IdentityReport hf = harmonic_form(b);
  out.identities = {ps, mi, hf};

  // Right-hand side of the main identity at random interior z and alternative c.
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double rhs_z_spread = 0.0, flux = std::abs(zero_flux(b, b.z));
  for (int i = 0; i < 5; ++i) {
    const Vec2 z = geom.map(0.5 * std::sqrt(unit(rng)), 2 * std::numbers::pi * unit(rng));
    IdentityReport r = main_identity(b, z, b.c);
    r.name += "@random_z";
    rhs_z_spread = std::max(rhs_z_spread, std::abs(r.rhs - mi.rhs));
    flux = std::max(flux, std::abs(zero_flux(b, z)));
    out.identities.push_back(r);
  }
  const Real c0 = radial_constants(kDimension).c0;
  double rhs_c_spread = 0.0;
  for (const Real& c : {Real(0), surface_mean_c(b), c0}) {
    rhs_c_spread = std::max(rhs_c_spread, std::abs(main_identity(b, b.z, c).rhs - mi.rhs));
  }

  const DeficitResult def = deficit(b);
  const AuxiliaryQ q = auxiliary_q(b);
  const double lap_h = to_double(laplacian(b.h).sup_norm());
  const double grad_h_z = gradient_h_at_z(b);
  const MeanValueCheck mv = mean_value_check(b, 20, cfg.seed);

  const bool positivity_regime = shape.amplitude() <= 0.05 + 1e-15;
  PositivityCertificate cert;
  bool cert_ok = true;
  try {
    cert = positivity_certificate(b, 1e-9);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::CertificateViolated) throw;
    cert_ok = false;
  }

  std::vector<Check> checks{
      {"clamped_interior_residual", ru.interior_residual, cfg.solve_tolerance, true},
      {"torsion_interior_residual", rpsi.interior_residual, cfg.solve_tolerance, true},
      {"pucci_serrin_rel", ps.rel_residual, 1e-7, true},
      {"main_identity_rel", mi.rel_residual, 1e-6, true},
      {"main_identity_lhs", mi.lhs, -1e-10, false},
      {"main_rhs_z_spread", rhs_z_spread, 1e-9, true},
      {"main_rhs_c_spread", rhs_c_spread, 1e-9, true},
      {"harmonic_form_rel", hf.rel_residual, 1e-6, true},
      {"harmonic_lhs_difference", std::abs(mi.lhs - hf.lhs), 1e-10, true},
      {"q_laplacian_residual", q.laplacian_residual, 1e-8, true},
      {"q_bilaplacian_residual", q.bilaplacian_residual, 1e-8, true},
      {"zero_flux", flux, 1e-9, true},
      {"laplacian_h_sup", lap_h, 1e-8, true},
      {"grad_h_at_z", grad_h_z, 1e-8, true},
      {"mean_value_error", mv.max_error, 1e-7, true},
      {"deficit_min", def.min_value, -1e-10, false},
      {"min_u", cert_ok ? cert.min_u : -1.0, -1e-10, false, positivity_regime},
      {"min_w", cert_ok ? cert.min_w : -1.0, -1e-9, false, positivity_regime},
      {"eta", cert_ok ? cert.eta : 0.0, 0.005, false, positivity_regime},
      {"z_norm", b.z.norm(), 0.5, true},
  };
  if (!ru.converged) out.failures.push_back("clamped solve not certified");
  if (!rpsi.converged) out.failures.push_back("torsion solve not certified");

  Json checks_json = Json::array();
  for (const Check& c : checks) {
    const bool pass = c.upper ? c.value <= c.bound : c.value >= c.bound;
    checks_json.push_back({{"name", c.name},
                           {"value", c.value},
                           {"bound", c.bound},
                           {"kind", c.upper ? "max" : "min"},
                           {"enforced", c.enforced},
                           {"pass", pass}});
    if (!pass && c.enforced) out.failures.push_back(c.name + " = " + format_double(c.value));
  }

  Json ids = Json::array();
  for (const IdentityReport& r : out.identities) ids.push_back(to_json(r));
  out.summary = {{"shape", shape_to_json(shape)},
                 {"nr", cfg.nr},
                 {"ntheta", cfg.ntheta},
                 {"solve", {to_json(ru), to_json(rpsi)}},
                 {"bundle", bundle_summary(b)},
                 {"identities", ids},
                 {"certificate",
                  {{"c_omega", cert.c_omega},
                   {"max_hessian_psi_sq", cert.max_hessian_psi_sq},
                   {"min_w", cert.min_w},
                   {"eta", cert.eta},
                   {"min_u", cert.min_u},
                   {"min_psi", cert.min_psi}}},
                 {"checks", checks_json}};
  return out;
}

// ----------------------------------------------------------------------------
// sweep

std::string sweep_csv(const SweepResult& result) {
  const std::vector<double>& ps = result.options.p_list;
  std::string out = "epsilon,z_x,z_y,centroid_x,centroid_y,rho1,rho2,gap,gap_centroid,c";
  for (double p : ps) out += ",dev_p" + format_p(p);
  for (double p : ps) out += ",dev_c0_p" + format_p(p);
  out += ",dev_inf,osc_h,mean_dev_h,grad_h_l2,weighted_hess_h,chain_ratio1,chain_ratio2,chain_ratio3,gradient_ratio";
  for (double p : ps) out += ",trace_p" + format_p(p);
  out += ",trace_inf_exact,identity_lhs,identity_residual,c_omega,min_w,eta,min_u,closeness,closeness_flag\n";

  for (const SweepRecord& r : result.records) {
    std::vector<std::string> cols{format_double(r.epsilon),    format_double(r.z.x),      format_double(r.z.y),
                                  format_double(r.centroid.x), format_double(r.centroid.y), format_double(r.rho1),
                                  format_double(r.rho2),       format_double(r.gap),      format_double(r.gap_centroid),
                                  format_double(r.c)};
    for (double d : r.deviation) cols.push_back(format_double(d));
    for (double d : r.deviation_c0) cols.push_back(format_double(d));
    cols.push_back(format_double(r.deviation_inf));
    cols.push_back(format_double(r.chain.oscillation));
    cols.push_back(format_double(r.chain.mean_deviation));
    cols.push_back(format_double(r.chain.gradient));
    cols.push_back(format_double(r.chain.weighted));
    cols.push_back(opt_csv(r.chain.ratio1));
    cols.push_back(opt_csv(r.chain.ratio2));
    cols.push_back(opt_csv(r.chain.ratio3));
    cols.push_back(opt_csv(r.chain.gradient_ratio));
    for (const auto& t : r.trace) cols.push_back(opt_csv(t));
    cols.push_back(opt_csv(r.trace_inf_exact));
    cols.push_back(format_double(r.identity_lhs));
    cols.push_back(format_double(r.identity_residual));
    cols.push_back(format_double(r.certificate.c_omega));
    cols.push_back(format_double(r.certificate.min_w));
    cols.push_back(format_double(r.certificate.eta));
    cols.push_back(format_double(r.certificate.min_u));
    cols.push_back(format_double(r.closeness));
    cols.push_back(r.closeness_flag ? "1" : "0");
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i > 0) out += ',';
      out += cols[i];
    }
    out += '\n';
  }
  return out;
}

Json sweep_fits_json(const SweepResult& result) {
  const SweepOptions& o = result.options;
  Json eps = Json::array();
  for (const SweepRecord& r : result.records) eps.push_back(r.epsilon);
  Json fits = Json::array();
  for (const FitResult& f : result.fits) {
    fits.push_back({{"p", format_p(f.p)},
                    {"sigma", f.sigma},
                    {"beta", ExponentTables::beta(f.p, kDimension) - o.beta_margin},
                    {"constant", f.constant},
                    {"gap_vs_deviation", fit_json(f.gap_vs_deviation)},
                    {"deviation_vs_eps", fit_json(f.deviation_vs_eps)},
                    {"trace_max", f.trace_max}});
  }
  const char* names[4] = {"ratio1", "ratio2", "ratio3", "gradient_ratio"};
  Json chain_max = Json::object(), chain_spread = Json::object();
  for (int k = 0; k < 4; ++k) {
    chain_max[names[k]] = result.chain_max[k];
    chain_spread[names[k]] = result.chain_spread[k];
  }
  return {{"family", result.family},
          {"options",
           {{"nr", o.nr},
            {"ntheta", o.ntheta},
            {"two_star", o.two_star},
            {"sigma_margin", o.sigma_margin},
            {"beta_margin", o.beta_margin},
            {"noise_factor", o.noise_factor},
            {"c_choice", c_choice_name(o.c_choice)}}},
          {"epsilon", eps},
          {"gap_vs_eps", fit_json(result.gap_vs_eps)},
          {"fits", fits},
          {"trace_inf_exact_max", result.trace_inf_exact_max},
          {"chain_max", chain_max},
          {"chain_spread", chain_spread}};
}

namespace {

std::string dat_series(const std::string& x_name, const std::string& y_name, const std::vector<double>& x,
                       const std::vector<double>& y) {
  std::string out = "# log10(" + x_name + ") log10(" + y_name + ")\n";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    out += format_double(std::log10(x[i])) + " " + format_double(std::log10(y[i])) + "\n";
  }
  return out;
}

std::string sweep_summary_text(const SweepResult& result) {
  std::ostringstream s;
  char buf[256];
  s << "sweep family " << result.family << ", grid " << result.options.nr << " x " << result.options.ntheta << "\n\n";
  s << "     eps          gap       dev_inf    ratio1    ratio2    ratio3   grad_ratio\n";
  for (const SweepRecord& r : result.records) {
    std::snprintf(buf, sizeof buf, "%9.5f  %11.4e  %11.4e  %8.4f  %8.4f  %8.4f  %8.4f\n", r.epsilon, r.gap,
                  r.deviation_inf, r.chain.ratio1.value_or(NAN), r.chain.ratio2.value_or(NAN),
                  r.chain.ratio3.value_or(NAN), r.chain.gradient_ratio.value_or(NAN));
    s << buf;
  }
  std::snprintf(buf, sizeof buf, "\ngap vs eps slope %.4f\n\n", result.gap_vs_eps.slope);
  s << buf;
  s << "  p       sigma    C          slope(gap,dev)  slope(dev,eps)  trace max\n";
  for (const FitResult& f : result.fits) {
    std::snprintf(buf, sizeof buf, "  %-6s  %.4f  %9.4f  %14.4f  %14.4f  %9.4f\n", format_p(f.p).c_str(), f.sigma,
                  f.constant, f.gap_vs_deviation.slope, f.deviation_vs_eps.slope, f.trace_max);
    s << buf;
  }
  std::snprintf(buf, sizeof buf, "\ntrace ratio at p = inf, beta = 1/(n+2): max %.4f\n", result.trace_inf_exact_max);
  s << buf;
  bool flagged = false;
  for (const SweepRecord& r : result.records) flagged = flagged || r.closeness_flag;
  if (flagged) s << "note: some shapes exceed the closeness cap (flag only)\n";
  return s.str();
}

}  // namespace

void write_sweep_outputs(const SweepResult& result, const std::filesystem::path& dir) {
  write_text(dir / "sweep.csv", sweep_csv(result));
  write_text(dir / "fits.json", dump_json(sweep_fits_json(result)));

  std::vector<double> eps, gap, dev_inf;
  for (const SweepRecord& r : result.records) {
    eps.push_back(r.epsilon);
    gap.push_back(r.gap);
    dev_inf.push_back(r.deviation_inf);
  }
  const std::filesystem::path plot = dir / "plotdata";
  write_text(plot / "gap_vs_eps.dat", dat_series("eps", "gap", eps, gap));
  write_text(plot / "gap_vs_dev_inf.dat", dat_series("dev_inf", "gap", dev_inf, gap));
  const std::vector<double>& ps = result.options.p_list;
  for (std::size_t j = 0; j < ps.size(); ++j) {
    std::vector<double> dev, trace;
    for (const SweepRecord& r : result.records) {
      dev.push_back(r.deviation[j]);
      trace.push_back(r.trace[j].value_or(NAN));
    }
    const std::string tag = "p" + format_p(ps[j]);
    write_text(plot / ("dev_" + tag + "_vs_eps.dat"), dat_series("eps", "dev_" + tag, eps, dev));
    write_text(plot / ("gap_vs_dev_" + tag + ".dat"), dat_series("dev_" + tag, "gap", dev, gap));
    write_text(plot / ("trace_" + tag + "_vs_eps.dat"), dat_series("eps", "trace_" + tag, eps, trace));
  }
  write_text(dir / "summary.txt", sweep_summary_text(result));
}

// ----------------------------------------------------------------------------
// radial and goldens

Json radial_table(const std::vector<int>& dims) {
  Json rows = Json::array();
  for (int n : dims) {
    const RadialSolution r = radial_constants(n);
    const RadialIntegrals i = radial_integrals(n);
    rows.push_back({{"n", n},
                    {"c0", r.c0},
                    {"R2", r.r_squared0},
                    {"u0_center", r.u0_center},
                    {"v0_center", r.v0_center},
                    {"psi0_center", r.psi0_center},
                    {"surface_area", i.surface_area},
                    {"integral_u0", i.integral_u0},
                    {"pucci_serrin_lhs", i.pucci_serrin_lhs},
                    {"pucci_serrin_rhs", i.pucci_serrin_rhs}});
  }
  return rows;
}

namespace {

void put(Json& g, const std::string& name, double value, double rel_tol, double abs_tol = 0.0) {
  g[name] = {{"value", value}, {"rel_tol", rel_tol}, {"abs_tol", abs_tol}};
}

}  // namespace

Json sweep_goldens(const SweepResult& s) {
  Json g = Json::object();
  const std::string pre = "sweep." + s.family + ".";
  const char* names[4] = {"ratio1", "ratio2", "ratio3", "gradient_ratio"};
  for (int k = 0; k < 4; ++k) put(g, pre + "chain_max." + names[k], s.chain_max[k], 1e-6);
  for (const FitResult& f : s.fits) {
    const std::string p = format_p(f.p);
    put(g, pre + "trace_max.p" + p, f.trace_max, 1e-6);
    put(g, pre + "constant.p" + p, f.constant, 1e-6);
    put(g, pre + "slope_gap_vs_dev.p" + p, f.gap_vs_deviation.slope, 1e-6);
  }
  put(g, pre + "trace_inf_exact_max", s.trace_inf_exact_max, 1e-6);
  put(g, pre + "slope_gap_vs_eps", s.gap_vs_eps.slope, 1e-6);
  return g;
}

SweepOptions golden_sweep_options() {
  SweepOptions o;
  o.p_list = kGoldenP;
  return o;
}

Json compute_goldens() {
  Json g = Json::object();
  for (const Json& row : radial_table({2, 3, 4})) {
    const std::string pre = "radial.n" + std::to_string(row["n"].get<int>()) + ".";
    for (const char* key : {"c0", "R2", "u0_center", "psi0_center", "integral_u0"}) {
      put(g, pre + key, row[key].get<double>(), 1e-12);
    }
  }

  const GridPtr disk = TensorGrid::make(build_domain(BoundaryShape::disk()), 32, 64);
  const Field u = solve_clamped_biharmonic(disk).solution;
  const Field psi = solve_torsion(disk).solution;
  put(g, "disk.u_center", to_double(interpolate(u, {0, 0})), 1e-9);
  put(g, "disk.psi_center", to_double(interpolate(psi, {0, 0})), 1e-9);
  put(g, "disk.integral_u", to_double(volume_integral(u)), 1e-9);

  for (const std::string& family : BoundaryShape::preset_names()) {
    const SweepResult s = stability_sweep(family, BoundaryShape::preset(family, 1.0), kGoldenEps,
                                          golden_sweep_options());
    g.update(sweep_goldens(s));
  }
  return g;
}

std::vector<std::string> compare_goldens(const Json& golden, const Json& current) {
  std::vector<std::string> bad;
  for (auto it = golden.begin(); it != golden.end(); ++it) {
    if (!current.contains(it.key())) {
      bad.push_back(it.key() + " missing");
      continue;
    }
    const Json& e = it.value();
    const double want = e.at("value").get<double>();
    const double got = current.at(it.key()).at("value").get<double>();
    const double tol = e.value("abs_tol", 0.0) + e.value("rel_tol", 0.0) * std::abs(want);
    if (!(std::abs(got - want) <= tol)) {
      bad.push_back(it.key() + ": " + format_double(got) + " vs golden " + format_double(want));
    }
  }
  for (auto it = current.begin(); it != current.end(); ++it) {
    if (!golden.contains(it.key())) bad.push_back(it.key() + " not in golden file");
  }
  return bad;
}

std::filesystem::path default_golden_path() {
  return std::filesystem::path(OVERDET_SOURCE_DIR) / "tests" / "golden" / "goldens.json";
}

}  // namespace overdet
