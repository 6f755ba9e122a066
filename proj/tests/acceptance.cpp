// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
// Writes every measured quantity to acceptance_report.json, or to the path given as argv[1].

#include "overdet/cli_io.hpp"
#include "overdet/radial.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

using namespace overdet;

namespace {

constexpr double kPiD = std::numbers::pi;
// Preset checks run one grid level above the default: cos 3 theta at eps = 0.05
// needs it for the sixth-derivative residual of q.
constexpr int kVerifyNr = 48;
constexpr int kVerifyNtheta = 96;
constexpr double kPresetEps = 0.05;
// Identity residuals bottom out near quad-precision roundoff amplified by the
// differentiation matrices; below this a doubling cannot gain another 100x.
constexpr double kResidualFloor = 1e-12;

Json report = Json::object();
int failures = 0;

// Collects the sub-checks of one criterion.
class Criterion {
 public:
  Criterion(int number, std::string title) : number_(number), title_(std::move(title)) {}

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass_ = false;
      failed_.push_back(what);
    }
    ++count_;
  }
  void le(const std::string& what, double value, double bound) {
    record(what, value);
    check(value <= bound, what + " = " + format_double(value) + " > " + format_double(bound));
  }
  void ge(const std::string& what, double value, double bound) {
    record(what, value);
    check(value >= bound, what + " = " + format_double(value) + " < " + format_double(bound));
  }
  void record(const std::string& what, double value) { values_[what] = value; }

  ~Criterion() {
    std::printf("[%s] criterion %2d: %s (%d checks)\n", pass_ ? "PASS" : "FAIL", number_, title_.c_str(), count_);
    for (const std::string& f : failed_) std::printf("         %s\n", f.c_str());
    if (!pass_) ++failures;
    report["criterion_" + std::to_string(number_)] = {{"title", title_}, {"pass", pass_}, {"values", values_}};
    std::fflush(stdout);
  }

 private:
  int number_;
  std::string title_;
  bool pass_ = true;
  int count_ = 0;
  std::vector<std::string> failed_;
  Json values_ = Json::object();
};

struct Case {
  GridPtr grid;
  SolveReport u;
  SolveReport psi;
  SolutionBundle b;
};

Case solve_case(const BoundaryShape& shape, int nr, int ntheta) {
  GridPtr g = TensorGrid::make(build_domain(shape), nr, ntheta);
  SolveReport u = solve_clamped_biharmonic(g);
  SolveReport psi = solve_torsion(g);
  SolutionBundle b = derive_fields(u.solution, psi.solution);
  return {g, std::move(u), std::move(psi), std::move(b)};
}

std::vector<Vec2> random_points(const DomainGeometry& g, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vec2> out;
  for (int i = 0; i < count; ++i) out.push_back(g.map(0.7 * std::sqrt(unit(rng)), 2 * kPiD * unit(rng)));
  return out;
}

double golden(const Json& g, const std::string& key) {
  if (!g.contains(key)) return std::nan("");
  return g[key]["value"].get<double>();
}

bool within_20(double value, double ref) { return std::isfinite(value) && std::abs(value - ref) <= 0.2 * std::abs(ref); }

ManufacturedProblem exponential_on_disk() {
  // u* = (1 - r^2)^2 e^x with Delta^2 u* from computer algebra.
  return {"exp_quartic",
          [](const GridPtr& g) {
            return Field::from_function(g, [](const Real& x, const Real& y) {
              const Real q = 1 - x * x - y * y;
              return q * q * exp(x);
            });
          },
          [](const GridPtr& g) {
            return Field::from_function(g, [](const Real& x, const Real& y) {
              const Real x2 = x * x, y2 = y * y;
              return exp(x) *
                     (x2 * x2 + 16 * x2 * x + 2 * x2 * y2 + 78 * x2 + 16 * x * y2 + 112 * x + y2 * y2 + 46 * y2 + 33);
            });
          }};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string report_path = argc > 1 ? argv[1] : "acceptance_report.json";
  const Json gold = Json::parse(read_text(default_golden_path()));
  const std::vector<std::string> presets = BoundaryShape::preset_names();

  // 1. Radial exactness on the disk at the default grid.
  const Case disk = solve_case(BoundaryShape::disk(), 32, 64);
  {
    Criterion c(1, "radial exactness on the unit disk at (32, 64)");
    c.le("|u(0) - 1/64|", std::abs(to_double(interpolate(disk.u.solution, {0, 0})) - 1.0 / 64), 1e-10);
    double lap = 0.0;
    for (const Real& v : disk.b.laplacian_u.values) lap = std::max(lap, std::abs(to_double(v) - 0.125));
    c.le("max |Delta u - 1/8| on boundary", lap, 1e-10);
    c.le("|psi(0) - 1/4|", std::abs(to_double(interpolate(disk.psi.solution, {0, 0})) - 0.25), 1e-10);
  }

  std::map<std::string, Case> cases;
  for (const std::string& name : presets) {
    cases.emplace(name, solve_case(BoundaryShape::preset(name, kPresetEps), kVerifyNr, kVerifyNtheta));
  }

  // 2. Pucci-Serrin.
  {
    Criterion c(2, "Pucci-Serrin identity");
    const IdentityReport d = pucci_serrin(disk.b, {0, 0});
    c.le("disk |lhs - pi/32|", std::abs(d.lhs - kPiD / 32), 1e-10);
    c.le("disk |rhs - pi/32|", std::abs(d.rhs - kPiD / 32), 1e-10);
    for (const auto& [name, k] : cases) c.le(name + " rel_residual", pucci_serrin(k.b, k.b.z).rel_residual, 1e-7);
    for (const std::string& name : {std::string("cos3"), std::string("mixed")}) {
      double prev = -1.0;
      for (int nr : {8, 16, 32}) {
        const Case k = solve_case(BoundaryShape::preset(name, kPresetEps), nr, 2 * nr);
        const double r = pucci_serrin(k.b, k.b.z).rel_residual;
        c.record(name + " rel_residual at nr " + std::to_string(nr), r);
        if (prev >= 0.0) {
          c.check(r <= kResidualFloor || prev / r >= 100.0,
                  name + " doubling to nr " + std::to_string(nr) + " shrank only " + format_double(prev / r));
        }
        prev = r;
      }
    }
  }

  // 3. Main identity.
  {
    Criterion c(3, "main identity");
    const Real c0 = radial_constants(kDimension).c0;
    for (const auto& [name, k] : cases) {
      const IdentityReport m = main_identity(k.b, k.b.z, k.b.c);
      c.le(name + " rel_residual", m.rel_residual, 1e-6);
      c.ge(name + " lhs", m.lhs, -1e-10);
      double zs = 0.0, cs = 0.0;
      for (Vec2 z : random_points(k.grid->geometry(), 5, 2024)) {
        zs = std::max(zs, std::abs(main_identity(k.b, z, k.b.c).rhs - m.rhs));
      }
      for (const Real& cc : {Real(0), surface_mean_c(k.b), c0}) {
        cs = std::max(cs, std::abs(main_identity(k.b, k.b.z, cc).rhs - m.rhs));
      }
      c.le(name + " rhs spread over random z", zs, 1e-9);
      c.le(name + " rhs spread over c", cs, 1e-9);
    }
  }

  // 4. Auxiliary identities and zero flux.
  {
    Criterion c(4, "auxiliary identities for q and zero flux");
    for (const auto& [name, k] : cases) {
      const AuxiliaryQ q = auxiliary_q(k.b);
      c.le(name + " Delta q residual", q.laplacian_residual, 1e-8);
      c.le(name + " Delta^2 q residual", q.bilaplacian_residual, 1e-8);
      c.le(name + " zero flux", std::abs(zero_flux(k.b, k.b.z)), 1e-9);
    }
  }

  // 5. Harmonic form.
  {
    Criterion c(5, "harmonic-form equivalence");
    for (const auto& [name, k] : cases) {
      const IdentityReport m = main_identity(k.b, k.b.z, k.b.c), h = harmonic_form(k.b);
      c.le(name + " |lhs main - lhs harmonic|", std::abs(m.lhs - h.lhs), 1e-10);
      c.le(name + " sup |Delta h|", to_double(laplacian(k.b.h).sup_norm()), 1e-8);
      c.le(name + " |grad h(z)|", gradient_h_at_z(k.b), 1e-8);
    }
  }

  // 6. Positivity regime.
  {
    Criterion c(6, "positivity regime");
    for (const auto& [name, k] : cases) {
      const PositivityCertificate p = positivity_certificate(k.b, 1e300);
      c.ge(name + " min u", p.min_u, -1e-10);
      c.ge(name + " min (u - c_Omega psi^2)", p.min_w, -1e-9);
      c.ge(name + " eta", p.eta, 0.005);
      c.le(name + " |z|", k.b.z.norm(), 0.5 - 1e-12);
    }
  }

  // 7-9 share the preset sweeps.
  std::map<std::string, SweepResult> sweeps;
  for (const std::string& name : presets) {
    sweeps.emplace(name, stability_sweep(name, BoundaryShape::preset(name, 1.0), kGoldenEps, golden_sweep_options()));
  }

  {
    Criterion c(7, "chain of inequalities bounded across sweeps");
    const char* names[4] = {"ratio1", "ratio2", "ratio3", "gradient_ratio"};
    for (const auto& [name, s] : sweeps) {
      for (int k = 0; k < 4; ++k) {
        const std::string key = name + " " + names[k];
        c.le(key + " max/min", s.chain_spread[k], 10.0);
        const double g = golden(gold, "sweep." + name + ".chain_max." + names[k]);
        c.record(key + " golden", g);
        c.le(key + " max / golden", s.chain_max[k] / g, 1.2);
      }
    }
  }

  {
    Criterion c(8, "nonlinear trace inequality");
    for (const auto& [name, s] : sweeps) {
      for (const FitResult& f : s.fits) {
        const std::string key = name + " p=" + format_p(f.p);
        c.record(key + " trace max", f.trace_max);
        c.check(std::isfinite(f.trace_max) && f.trace_max > 0.0, key + " trace ratio not finite");
        for (const SweepRecord& r : s.records) {
          const std::size_t j = &f - s.fits.data();
          c.check(r.trace[j].has_value(), key + " degenerate at eps " + format_double(r.epsilon));
        }
        const double g = golden(gold, "sweep." + name + ".trace_max.p" + format_p(f.p));
        c.check(within_20(f.trace_max, g), key + " trace max " + format_double(f.trace_max) + " vs golden " +
                                               format_double(g));
      }
      c.record(name + " exact beta at p=inf", s.trace_inf_exact_max);
      const double g = golden(gold, "sweep." + name + ".trace_inf_exact_max");
      c.check(within_20(s.trace_inf_exact_max, g), name + " exact-beta trace max off golden");
    }
  }

  {
    Criterion c(9, "stability estimate on the cos 2 theta and cos theta families");
    const SweepResult& s2 = sweeps.at("cos2");
    for (const FitResult& f : s2.fits) {
      if (!(f.p == 1.0 || f.p == 2.0 || std::isinf(f.p))) continue;
      const std::string key = "cos2 C(p=" + format_p(f.p) + ")";
      c.record(key, f.constant);
      const double g = golden(gold, "sweep.cos2.constant.p" + format_p(f.p));
      c.check(within_20(f.constant, g), key + " = " + format_double(f.constant) + " vs golden " + format_double(g));
      if (std::isinf(f.p)) c.ge("cos2 slope gap vs dev_inf", f.gap_vs_deviation.slope, 0.75);
    }
    const SweepResult& s1 = sweeps.at("cos1");
    c.le("cos1 |slope(gap, eps) - 2|", std::abs(s1.gap_vs_eps.slope - 2.0), 0.15);
    for (const FitResult& f : s1.fits) {
      c.le("cos1 |slope(dev_p" + format_p(f.p) + ", eps) - 2|", std::abs(f.deviation_vs_eps.slope - 2.0), 0.15);
    }
  }

  {
    Criterion c(10, "exponent tables");
    struct Row {
      double p;
      int n;
      double sigma, beta;
    };
    const Row rows[] = {
        {1, 2, 2.0 / 3, 1.0 / 3},  {1.5, 2, 0.75, 1.0 / 3},    {2, 2, 0.75, 1.0 / 3},       {3, 2, 0.75, 1.0 / 3},
        {10, 2, 0.75, 0.275},      {kInfinity, 2, 0.75, 0.25}, {1, 3, 5.0 / 12, 1.0 / 3},   {1.5, 3, 0.5, 1.0 / 3},
        {2, 3, 0.5, 1.0 / 3},      {3, 3, 0.5, 1.0 / 3},       {10, 3, 0.5, 0.24},          {kInfinity, 3, 0.5, 0.2},
        {1, 4, 0.3, 1.0 / 3},      {1.5, 4, 0.375, 1.0 / 3},   {2, 4, 0.375, 1.0 / 3},      {3, 4, 0.375, 1.0 / 3},
        {10, 4, 0.375, 13.0 / 60}, {kInfinity, 4, 0.375, 1.0 / 6},
    };
    for (const Row& r : rows) {
      const std::string key = "p=" + format_p(r.p) + " n=" + std::to_string(r.n);
      c.le(key + " sigma error", std::abs(ExponentTables::sigma(r.p, r.n) - r.sigma), 1e-15);
      c.le(key + " beta error", std::abs(ExponentTables::beta(r.p, r.n) - r.beta), 1e-15);
    }
    c.check(ExponentTables::sigma(1.0, 3) == 5.0 / 12, "sigma_1(n=3) != 5/12");
    for (int n : {2, 3, 4}) {
      const double below = (n + 2) * 1.5 / (n * (n + 2 * 1.5 - 1));  // left-branch formula at p = 3/2
      c.check(below == 3.0 / (2 * n) && ExponentTables::sigma(1.5, n) == below, "sigma junction at 3/2");
      const double above = (n + 3.0 - 1) / ((n + 2) * 3.0);  // right-branch formula at p = 3
      c.check(std::abs(above - 1.0 / 3) <= 1e-16 && ExponentTables::beta(3.0, n) == 1.0 / 3, "beta junction at 3");
    }
  }

  {
    Criterion c(11, "manufactured convergence");
    const std::vector<std::pair<int, int>> levels{{8, 16}, {16, 32}, {32, 64}};
    const DomainGeometry dg = build_domain(BoundaryShape::disk());
    const DomainGeometry g3 = build_domain(BoundaryShape::preset("cos3", 0.02));
    const auto disk_rows = manufactured_convergence(dg, exponential_on_disk(), levels);
    const auto cos3_rows = manufactured_convergence(g3, level_function_squared(g3), levels);
    for (const auto* rows : {&disk_rows, &cos3_rows}) {
      const std::string tag = rows == &disk_rows ? "disk" : "cos3";
      for (const ConvergenceRow& r : *rows) c.record(tag + " error at nr " + std::to_string(r.nr), r.sup_error);
      c.check(converges_spectrally(*rows, 100.0, 1e-11), tag + " error does not drop 100x per doubling");
    }
  }

  {
    Criterion c(12, "determinism");
    // Recompute with a different thread count and compare serialized outputs byte for byte.
    const char* prev = std::getenv("OVERDET_LAB_THREADS");
    const std::string saved = prev ? prev : "";
    setenv("OVERDET_LAB_THREADS", prev && std::string(prev) == "0" ? "4" : "0", 1);
    const SweepResult again =
        stability_sweep("cos2", BoundaryShape::preset("cos2", 1.0), kGoldenEps, golden_sweep_options());
    if (prev) setenv("OVERDET_LAB_THREADS", saved.c_str(), 1); else unsetenv("OVERDET_LAB_THREADS");
    c.check(sweep_csv(again) == sweep_csv(sweeps.at("cos2")), "sweep.csv differs between runs");
    c.check(dump_json(sweep_fits_json(again)) == dump_json(sweep_fits_json(sweeps.at("cos2"))),
            "fits.json differs between runs");

    RunConfig cfg;
    const BoundaryShape shape = BoundaryShape::preset("mixed", 0.03);
    c.check(dump_json(verify_shape(shape, cfg).summary) == dump_json(verify_shape(shape, cfg).summary),
            "verify output differs between runs");
  }

  write_text(report_path, dump_json(report));
  std::printf("%s: %d of 12 criteria failed\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}
