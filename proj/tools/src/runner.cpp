#include "zerores/cli/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <ostream>
#include <sstream>

#include <boost/version.hpp>
#include <Eigen/Core>

#include "zerores/bounds.hpp"
#include "zerores/errors.hpp"
#include "zerores/threebody.hpp"
#include "zerores/twobody.hpp"

#ifndef ZERORES_VERSION
#define ZERORES_VERSION "0.0.0"
#endif

namespace zerores::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string fmt(std::int64_t value) { return std::to_string(value); }

void Table::add(std::vector<std::string> row) {
  if (row.size() != columns.size()) {
    throw std::logic_error("row width does not match the header of " + name);
  }
  rows.push_back(std::move(row));
}

std::string Table::csv() const {
  std::string out;
  const auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(columns);
  for (const auto& r : rows) line(r);
  return out;
}

namespace {

std::string radius_column(double r) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "I_R@%g", r);
  return buf;
}

PairPotential two_body_potential(const ExperimentConfig& cfg) {
  const TwoBodySpec& t = *cfg.twobody;
  const PairPotential raw = cfg.pair_potentials()[t.pair];
  if (raw.strength() <= 0.0) throw DomainError("two-body potential has zero depth");
  return jacobi_scaled(raw, cfg.masses, t.pair);
}

struct TwoBodySetup {
  PairPotential potential;
  QuadratureRule grid;
  ThresholdResult threshold;
  PairPotential at_threshold;
  ResonanceData resonance;
};

TwoBodySetup two_body_setup(const ExperimentConfig& cfg, std::ostream& log) {
  const TwoBodySpec& t = *cfg.twobody;
  const PairPotential p = two_body_potential(cfg);
  const QuadratureRule grid = radial_grid(p, t.nodes, t.r_max);
  for (const std::string& w : build_bs_matrix(p, 0.0, grid).warnings) log << "warning: " << w << '\n';
  ThresholdOptions topt;
  topt.tolerance = t.tolerance;
  const ThresholdResult th = coupling_threshold(p, grid, topt);
  const PairPotential at = p.with_coupling(p.coupling() * th.lambda_cr);
  ResonanceOptions ropt;
  ropt.gap_min = t.gap_min;
  ResonanceData rd = resonance_function(at, grid, ropt);
  return {p, grid, th, at, std::move(rd)};
}

std::vector<Table> twobody_threshold(const ExperimentConfig& cfg, std::ostream& log) {
  const TwoBodySpec& t = *cfg.twobody;
  const TwoBodySetup s = two_body_setup(cfg, log);
  const PotentialSpec& spec = (*cfg.potentials)[static_cast<int>(t.pair)];

  Table th{"threshold",
           {"pair", "shape", "depth", "range", "nodes", "r_max", "lambda_cr", "lambda_shooting",
            "mu_max", "gap", "a", "rho0_est"},
           {}};
  th.add({std::string(to_string(t.pair)), std::string(to_string(spec.shape)), fmt(spec.depth),
          fmt(spec.range), fmt(std::int64_t{t.nodes}), fmt(s.grid.b), fmt(s.threshold.lambda_cr),
          fmt(s.threshold.lambda_shooting), fmt(s.threshold.mu_max), fmt(s.threshold.gap),
          fmt(s.resonance.a), fmt(s.resonance.rho0_est)});

  Table bind{"binding",
             {"excess", "coupling", "kappa", "energy", "kappa_shooting", "kappa_a_over_excess"},
             {}};
  BindingOptions bopt;
  bopt.tolerance = t.tolerance;
  for (double eps : t.binding_excess) {
    const double coupling = s.threshold.lambda_cr * (1.0 + eps);
    const auto b = binding_energy(s.potential.with_coupling(coupling), s.grid, bopt);
    if (!b) throw ConsistencyError("no bound state above the computed threshold");
    bind.add({fmt(eps), fmt(coupling), fmt(b->kappa), fmt(b->energy), fmt(b->kappa_shooting),
              fmt(b->kappa * s.resonance.a / eps)});
  }
  return {th, bind};
}

std::vector<Table> mu_curve_experiment(const ExperimentConfig& cfg, const RunOptions& opt,
                                       std::ostream& log) {
  const TwoBodySpec& t = *cfg.twobody;
  const TwoBodySetup s = two_body_setup(cfg, log);
  MuCurveOptions mopt;
  mopt.window = t.fit_window;
  mopt.rho0 = s.resonance.rho0_est;
  mopt.threads = opt.threads;
  const MuCurve curve = mu_curve(s.at_threshold, t.k_samples, s.grid, mopt);
  if (curve.fit_count < 2) throw RangeError("fewer than two k samples inside the fit window");

  Table samples{"mu_curve", {"k", "mu", "gap"}, {}};
  for (const MuSample& m : curve.samples) samples.add({fmt(m.k), fmt(m.mu), fmt(m.gap)});
  Table fit{"mu_fit",
            {"window_lo", "window_hi", "fit_count", "slope", "intercept", "residual",
             "slope_at_zero", "a", "slope_rel_error"},
            {}};
  fit.add({fmt(curve.window.lo), fmt(curve.window.hi), fmt(std::int64_t{curve.fit_count}),
           fmt(curve.slope), fmt(curve.intercept), fmt(curve.residual), fmt(curve.slope_at_zero),
           fmt(s.resonance.a), fmt(-curve.slope / s.resonance.a - 1.0)});
  return {samples, fit};
}

std::vector<Table> wk_experiment(const ExperimentConfig& cfg, const RunOptions& opt,
                                 std::ostream& log) {
  const TwoBodySpec& t = *cfg.twobody;
  const TwoBodySetup s = two_body_setup(cfg, log);
  for (double k : t.wk_samples) {
    if (k >= s.resonance.rho0_est) {
      throw RangeError("wk sample k = " + fmt(k) + " lies beyond rho0_est = " +
                       fmt(s.resonance.rho0_est));
    }
  }
  WDecomposition wd;
  try {
    wd = w_decomposition(s.resonance, s.at_threshold, t.wk_samples, opt.threads);
  } catch (const SingularityError& e) {
    throw SingularityError(std::string(e.what()) + "; smallest trustworthy k ~ " +
                               fmt(e.smallest_trustworthy_k()),
                           e.smallest_trustworthy_k());
  }
  Table out{"wk_decomp", {"k", "mu", "gap", "norm_W", "norm_Z", "norm_W_ak"}, {}};
  for (const WSample& w : wd.samples) {
    out.add({fmt(w.k), fmt(w.mu), fmt(w.gap), fmt(w.norm_w), fmt(w.norm_z),
             fmt(w.norm_w * s.resonance.a * w.k)});
  }
  return {out};
}

std::vector<Table> lemma3_experiment(const ExperimentConfig& cfg, const RunOptions& opt) {
  const BoundsSpec& b = *cfg.bounds;
  const DivergenceReport r = divergence_report(b.profile, b.eps0, b.z_samples, opt.threads);
  Table samples{"lemma3", {"z", "J", "lower_bound"}, {}};
  for (const auto& s : r.samples) samples.add({fmt(s.z), fmt(s.j), fmt(s.lower_bound)});
  Table fit{"lemma3_fit",
            {"slope", "intercept", "r_squared", "expected_slope", "slope_rel_error", "radius",
             "eps", "min_margin", "increasing"},
            {}};
  fit.add({fmt(r.slope), fmt(r.intercept), fmt(r.r_squared), fmt(r.expected_slope),
           fmt(r.slope / r.expected_slope - 1.0), fmt(r.radius), fmt(r.eps), fmt(r.min_margin),
           r.increasing ? "1" : "0"});
  return {samples, fit};
}

std::vector<Table> green_experiment(const ExperimentConfig& cfg, const RunOptions& opt) {
  const BoundsSpec& b = *cfg.bounds;
  const GreenReport r = green_report(b.xi, opt.threads);
  Table samples{"green_bound", {"xi", "G0", "bound", "sharp_bound"}, {}};
  for (const auto& s : r.samples) {
    samples.add({fmt(s.xi), fmt(s.g0), fmt(s.bound), fmt(s.sharp_bound)});
  }
  const double expected = 256.0 / 9.0;
  Table identity{"green_identity",
                 {"identity", "expected", "rel_error", "samples", "violations",
                  "sharp_violations"},
                 {}};
  identity.add({fmt(r.identity), fmt(expected), fmt(r.identity / expected - 1.0),
                fmt(static_cast<std::int64_t>(r.samples.size())),
                fmt(std::int64_t{r.violations}), fmt(std::int64_t{r.sharp_violations})});
  return {samples, identity};
}

std::vector<Table> zabyv_experiment(const ExperimentConfig& cfg, std::uint64_t seed) {
  const ZabyvSpec& z = cfg.bounds->zabyv;
  Table out{"zabyv",
            {"r0", "delta", "seed", "samples", "min_ratio", "violations", "worst_x",
             "worst_x_prime"},
            {}};
  std::uint64_t cell = 0;
  for (double r0 : z.r0) {
    for (double delta : z.delta) {
      const std::uint64_t s = seed + cell++;
      const ZabyvResult r = zabyv_check(r0, delta, z.samples, s);
      out.add({fmt(r0), fmt(delta), std::to_string(s), fmt(r.samples), fmt(r.min_ratio),
               fmt(r.violations), fmt(r.worst_x), fmt(r.worst_x_prime)});
    }
  }
  return {out};
}

// ---------------------------------------------------------------- three-body

json recipe_json(const BasisRecipe& r, const MassConfig& m) {
  json arr = json::array();
  for (Pair p : r.arrangements) arr.push_back(std::string(to_string(p)));
  return {{"masses", {m.m1, m.m2, m.m3}},
          {"pair", {r.pair.lo, r.pair.hi, r.pair.count}},
          {"spectator", {r.spectator.lo, r.spectator.hi, r.spectator.count}},
          {"arrangements", arr},
          {"stride", r.stride}};
}

// The basis is cached as text next to the outputs, keyed by a hash of the
// recipe and masses.
GaussianBasis cached_basis(const ExperimentConfig& cfg, const fs::path& out_dir,
                           std::ostream& log) {
  const BasisRecipe& recipe = cfg.threebody->basis;
  const json key = recipe_json(recipe, cfg.masses);
  const fs::path path = out_dir / "cache" / ("basis-" + hex64(config_hash(key)) + ".json");
  std::error_code ec;
  if (fs::exists(path, ec)) {
    try {
      std::ifstream in(path);
      const json doc = json::parse(in);
      if (doc.at("recipe") == key) {
        std::vector<Eigen::Matrix2d> forms;
        for (const auto& f : doc.at("forms")) {
          Eigen::Matrix2d a;
          a << f.at(0).get<double>(), f.at(1).get<double>(), f.at(1).get<double>(),
              f.at(2).get<double>();
          forms.push_back(a);
        }
        GaussianBasis b = make_basis(std::move(forms));
        b.duplicates_removed = doc.at("duplicates_removed").get<int>();
        log << "basis: loaded " << b.size() << " forms from " << path.string() << '\n';
        return b;
      }
    } catch (const std::exception& e) {
      log << "warning: ignoring unreadable basis cache " << path.string() << " (" << e.what()
          << ")\n";
    }
  }
  GaussianBasis basis = make_basis(cfg.masses, recipe);
  json forms = json::array();
  for (const auto& a : basis.forms) forms.push_back({a(0, 0), a(0, 1), a(1, 1)});
  fs::create_directories(path.parent_path(), ec);
  std::ofstream o(path);
  if (o) {
    o << json{{"recipe", key}, {"duplicates_removed", basis.duplicates_removed}, {"forms", forms}}
             .dump(1)
      << '\n';
  }
  log << "basis: built " << basis.size() << " forms (" << basis.duplicates_removed
      << " duplicates removed)\n";
  return basis;
}

struct ThreeBodySetup {
  Subthresholds sub;
  std::unique_ptr<VariationalProblem> problem;
  double lambda = 0.0;
  std::optional<Boundary> eps;
  Boundary theta0;
};

ThreeBodySetup three_body_setup(const ExperimentConfig& cfg, const RunOptions& opt,
                                const fs::path& out_dir, std::ostream& log) {
  const ThreeBodySpec& t = *cfg.threebody;
  const PairPotentials pots = cfg.pair_potentials();
  ThreeBodySetup s;
  s.sub = two_body_subthresholds(cfg.masses, pots, t.nodes);
  GenEigOptions gopt;
  gopt.prune = t.prune;
  gopt.prune_cutoff = t.prune_cutoff;
  s.problem = std::make_unique<VariationalProblem>(cached_basis(cfg, out_dir, log), cfg.masses,
                                                   pots, s.sub.lambda12, gopt, opt.threads);
  s.lambda = t.lambda.fraction ? t.lambda.value * s.sub.lambda_cr : t.lambda.value;
  s.eps = empirical_epsilon(*s.problem, std::min(s.sub.theta_cr, s.sub.lambda_cr), t.tol_bind);
  s.theta0 = find_theta0(*s.problem, s.lambda, 0.0, s.sub.theta_cr, t.tol_bind);
  log << "threebody: Theta_cr = " << fmt(s.sub.theta_cr) << ", Theta_0 = " << fmt(s.theta0.value())
      << ", basis " << s.problem->basis().size() << ", cond(S) = " << fmt(s.problem->condition())
      << '\n';
  return s;
}

std::vector<double> resolve_thetas(const ThetaGrid& g, const ThreeBodySetup& s) {
  std::vector<double> out;
  for (double e : g.entries) {
    switch (g.mode) {
      case ThetaGrid::Mode::values: out.push_back(e); break;
      case ThetaGrid::Mode::fractions: out.push_back(e * s.sub.theta_cr); break;
      case ThetaGrid::Mode::approach:
        out.push_back(s.theta0.above + (s.sub.theta_cr - s.theta0.above) * std::exp2(-e));
        break;
    }
  }
  return out;
}

std::vector<std::string> scan_columns(const std::vector<double>& radii, const char* first,
                                      bool with_delta) {
  std::vector<std::string> cols{first, "lambda"};
  if (with_delta) cols.push_back("theta_minus_theta0");
  cols.push_back("E_gr");
  for (double r : radii) cols.push_back(radius_column(r));
  for (const char* c : {"xi2_moment", "basis_n", "cond_S"}) cols.emplace_back(c);
  return cols;
}

std::vector<std::string> scan_row(const ScanRecord& r, std::optional<double> theta0) {
  std::vector<std::string> row{fmt(r.theta), fmt(r.lambda)};
  if (theta0) row.push_back(fmt(r.theta - *theta0));
  row.push_back(fmt(r.energy));
  for (double v : r.inside) row.push_back(fmt(v));
  row.push_back(fmt(r.xi2));
  row.push_back(fmt(std::int64_t{r.basis_n}));
  row.push_back(fmt(r.cond_s));
  return row;
}

std::vector<Table> threebody_scan(const ExperimentConfig& cfg, const RunOptions& opt,
                                  const fs::path& out_dir, std::ostream& log) {
  const ThreeBodySpec& t = *cfg.threebody;
  const ThreeBodySetup s = three_body_setup(cfg, opt, out_dir, log);
  const std::vector<double> thetas = resolve_thetas(t.theta_grid, s);
  for (double th : thetas) {
    if (th < 0.0 || th > 1.5 * s.sub.theta_cr) {
      log << "warning: Theta = " << fmt(th) << " outside [0, 1.5 Theta_cr]\n";
    }
  }
  ScanOptions so;
  so.radii = t.radii;
  so.threads = opt.threads;
  const std::vector<ScanRecord> records = theta_scan(*s.problem, thetas, s.lambda, so);

  Table scan{"threebody_scan", scan_columns(t.radii, "theta", false), {}};
  for (const auto& r : records) scan.add(scan_row(r, std::nullopt));

  const double efimov = s.problem->energy(s.sub.theta_cr, 0.3 * s.sub.lambda_cr);
  Table summary{"threebody_summary",
                {"lambda12_cr", "theta_cr", "lambda_cr", "epsilon", "lambda", "theta0",
                 "theta0_below", "theta0_above", "E_efimov", "tol_bind", "basis_n", "cond_S"},
                {}};
  summary.add({fmt(s.sub.lambda12), fmt(s.sub.theta_cr), fmt(s.sub.lambda_cr),
               s.eps ? fmt(s.eps->below) : fmt(std::min(s.sub.theta_cr, s.sub.lambda_cr)),
               fmt(s.lambda), fmt(s.theta0.value()), fmt(s.theta0.below), fmt(s.theta0.above),
               fmt(efimov), fmt(t.tol_bind),
               fmt(static_cast<std::int64_t>(s.problem->basis().size())),
               fmt(s.problem->condition())});
  return {scan, summary};
}

std::vector<Table> spreading_experiment(const ExperimentConfig& cfg, const RunOptions& opt,
                                        const fs::path& out_dir, std::ostream& log) {
  const ThreeBodySpec& t = *cfg.threebody;
  const ThreeBodySetup s = three_body_setup(cfg, opt, out_dir, log);
  std::vector<double> thetas = resolve_thetas(t.theta_grid, s);
  std::sort(thetas.begin(), thetas.end(), std::greater<>());
  for (double th : thetas) {
    if (th <= s.theta0.below) {
      throw RangeError("spreading scan point Theta = " + fmt(th) + " is not above Theta_0");
    }
  }
  ScanOptions so;
  so.radii = t.radii;
  so.threads = opt.threads;
  const std::vector<ScanRecord> records = theta_scan(*s.problem, thetas, s.lambda, so);

  Table scan{"spreading", scan_columns(t.radii, "theta", true), {}};
  for (const auto& r : records) scan.add(scan_row(r, s.theta0.value()));

  Table summary{"spreading_summary",
                {"theta0", "radius", "I_first", "I_last", "I_ratio", "I_monotone", "xi2_first",
                 "xi2_last", "xi2_monotone"},
                {}};
  for (std::size_t ri = 0; ri < t.radii.size(); ++ri) {
    bool i_mono = true;
    bool x_mono = true;
    for (std::size_t i = 1; i < records.size(); ++i) {
      if (!(records[i].inside[ri] < records[i - 1].inside[ri])) i_mono = false;
      if (!(records[i].xi2 > records[i - 1].xi2)) x_mono = false;
    }
    const ScanRecord& first = records.front();
    const ScanRecord& last = records.back();
    summary.add({fmt(s.theta0.value()), fmt(t.radii[ri]), fmt(first.inside[ri]),
                 fmt(last.inside[ri]), fmt(last.inside[ri] / first.inside[ri]),
                 i_mono ? "1" : "0", fmt(first.xi2), fmt(last.xi2), x_mono ? "1" : "0"});
  }
  return {scan, summary};
}

std::string compiler_id() {
#if defined(__clang__)
  return "clang " __clang_version__;
#elif defined(__GNUC__)
  return "gcc " __VERSION__;
#else
  return "unknown";
#endif
}

}  // namespace

std::vector<Table> compute(const std::string& experiment, const ExperimentConfig& config,
                           const RunOptions& options, std::ostream& log) {
  const fs::path out_dir = options.out_dir.empty() ? fs::path(config.output_dir)
                                                   : fs::path(options.out_dir);
  const std::uint64_t seed = options.seed.value_or(config.seed);
  if (experiment == "twobody-threshold") return twobody_threshold(config, log);
  if (experiment == "mu-curve") return mu_curve_experiment(config, options, log);
  if (experiment == "wk-decomp") return wk_experiment(config, options, log);
  if (experiment == "lemma3") return lemma3_experiment(config, options);
  if (experiment == "green-bound") return green_experiment(config, options);
  if (experiment == "zabyv") return zabyv_experiment(config, seed);
  if (experiment == "threebody-scan") return threebody_scan(config, options, out_dir, log);
  if (experiment == "spreading") return spreading_experiment(config, options, out_dir, log);
  throw ConfigError("unknown experiment '" + experiment + "'");
}

int validate(const std::string& config_path, const std::string& experiment, std::ostream& out) {
  const ParseResult r = load_config(config_path, experiment);
  for (const Issue& i : r.issues) out << format_issue(i) << '\n';
  return r.ok() ? kExitOk : kExitInput;
}

int run(const std::string& experiment, const std::string& config_path, const RunOptions& options,
        std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  if (!is_experiment(experiment)) {
    err << "error: unknown experiment '" << experiment << "'\n";
    return kExitInput;
  }
  if (options.threads < 1) {
    err << "error: --threads must be at least 1\n";
    return kExitInput;
  }
  const ParseResult parsed = load_config(config_path, experiment);
  for (const Issue& i : parsed.issues) err << format_issue(i) << '\n';
  if (!parsed.ok()) return kExitInput;
  const ExperimentConfig& cfg = *parsed.config;

  std::vector<Table> tables;
  try {
    tables = compute(experiment, cfg, options, err);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const fs::path dir = options.out_dir.empty() ? fs::path(cfg.output_dir) : fs::path(options.out_dir);
  std::vector<fs::path> written;
  const auto cleanup = [&] {
    std::error_code ec;
    for (const auto& p : written) fs::remove(p, ec);
  };
  try {
    fs::create_directories(dir);
    for (const Table& t : tables) {
      const fs::path csv = dir / (t.name + ".csv");
      const fs::path manifest = dir / (t.name + ".manifest.json");
      const json m{
          {"tool", "zerores"},
          {"version", ZERORES_VERSION},
          {"experiment", experiment},
          {"config_path", config_path},
          {"config_hash", hex64(config_hash(cfg.source))},
          {"seed", options.seed.value_or(cfg.seed)},
          {"threads", options.threads},
          {"wall_time_s", wall},
          {"csv", csv.filename().string()},
          {"columns", t.columns},
          {"rows", t.rows.size()},
          {"libraries",
           {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                          std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION)},
            {"boost", BOOST_LIB_VERSION},
            {"compiler", compiler_id()}}}};
      for (const auto& [path, text] :
           {std::pair{csv, t.csv()}, std::pair{manifest, m.dump(2) + "\n"}}) {
        written.push_back(path);
        std::ofstream f(path, std::ios::binary);
        f << text;
        if (!f) throw std::runtime_error("cannot write " + path.string());
      }
      out << csv.string() << '\n';
    }
  } catch (const std::exception& e) {
    cleanup();
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitOk;
}

}  // namespace zerores::cli
