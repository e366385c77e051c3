// fabcr: FAB confidence regions from the command line.
#include <CLI11.hpp>
#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fabcr/asymptotics.hpp"
#include "fabcr/csv.hpp"
#include "fabcr/errors.hpp"
#include "fabcr/fab_gaussian.hpp"
#include "fabcr/fab_nef.hpp"
#include "fabcr/io.hpp"
#include "fabcr/parallel.hpp"
#include "fabcr/regression.hpp"
#include "fabcr/simulate.hpp"
#include "fabcr/specfun.hpp"

namespace {

using namespace fabcr;

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct Common {
  std::string format = "csv";
  int threads = 0;
};

template <class R>
void emit(const Common& c, const R& rec) {
  if (c.format == "json")
    std::cout << io::to_json(rec);
  else
    io::write_csv(std::cout, rec);
}

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> parts;
  std::size_t start = 0;
  while (true) {
    const auto colon = spec.find(':', start);
    const std::string tok = spec.substr(start, colon - start);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
      throw std::invalid_argument("bad p-value grid '" + spec + "', expected LO:HI:STEP");
    parts.push_back(v);
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  if (parts.size() != 3 || !(parts[2] > 0.0) || !(parts[1] >= parts[0]))
    throw std::invalid_argument("bad p-value grid '" + spec + "', expected LO:HI:STEP with LO <= HI, STEP > 0");
  std::vector<double> grid;
  const auto n = static_cast<std::size_t>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9)) + 1;
  if (n > 10'000'000) throw std::invalid_argument("p-value grid has too many points");
  for (std::size_t i = 0; i < n; ++i) grid.push_back(parts[0] + static_cast<double>(i) * parts[2]);
  return grid;
}

NefPoint parse_point(const std::string& s) {
  NefPoint y;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find_first_of(",|", start);
    const std::string tok = s.substr(start, comma - start);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) throw std::invalid_argument("bad count '" + tok + "'");
    y.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return y;
}

std::vector<io::IntervalRec> to_rec(const std::vector<Interval>& ivs) {
  std::vector<io::IntervalRec> out;
  for (const Interval& iv : ivs) out.push_back({iv.lo, iv.hi});
  return out;
}

struct RegionArgs {
  std::string prior;
  double sigma = 1.0;
  double y = 0.0;
  double alpha = 0.1;
  double mu = 0.0;
  double scan = 0.0;
  std::string pvalue_grid;
  std::string pvalue_out;
};

int run_region(const Common& c, const RegionArgs& a) {
  const PriorModel model = PriorModel::parse(a.prior, a.sigma);
  RegionOptions opts;
  opts.scan_step = a.scan * a.sigma;
  const ConfidenceRegion r = shifted_confidence_region(model, a.mu, a.y, a.alpha, opts);
  const double z = -specfun::norm_quantile(0.5 * a.alpha);
  io::RegionRecord rec;
  rec.prior = model.spec();
  rec.sigma = a.sigma;
  rec.y = a.y;
  rec.alpha = a.alpha;
  rec.focal = r.focal;
  rec.intervals = to_rec(r.intervals);
  rec.width = r.width();
  rec.disconnected = r.disconnected;
  rec.z_lo = a.y - z * a.sigma;
  rec.z_hi = a.y + z * a.sigma;
  if (!a.pvalue_grid.empty()) {
    std::vector<double> grid = parse_grid(a.pvalue_grid);
    for (double& g : grid) g -= a.mu;
    const PValueCurve curve = p_value_curve(model, a.y - a.mu, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) rec.pvalue_curve.push_back({grid[i] + a.mu, curve.pvals[i]});
  }
  if (!a.pvalue_out.empty()) {
    std::ofstream f(a.pvalue_out);
    if (!f) throw std::invalid_argument("cannot write " + a.pvalue_out);
    io::write_pvalue_csv(f, rec.pvalue_curve);
  }
  if (c.format == "json") {
    std::cout << io::to_json(rec);
  } else {
    io::write_csv(std::cout, rec);
    if (!rec.pvalue_curve.empty() && a.pvalue_out.empty()) {
      std::cout << '\n';
      io::write_pvalue_csv(std::cout, rec.pvalue_curve);
    }
  }
  return 0;
}

struct NefArgs {
  std::string family;
  std::string y;
  double alpha = 0.1;
  double step = 0.0;
  double theta_max = 0.0;
  std::string grid_out;
};

int run_nef(const Common& c, const NefArgs& a) {
  const NefModel model = NefModel::parse(a.family);
  const NefPoint y = parse_point(a.y);
  NefGridSpec spec;
  spec.step = a.step;
  spec.theta_max = a.theta_max;
  const NefRegion r = confidence_region_nef(model, y, a.alpha, spec);
  io::NefRecord rec;
  rec.family = model.spec();
  rec.y = y;
  rec.alpha = a.alpha;
  rec.eta_hat = r.focal.eta_hat;
  rec.theta_hat = r.focal.theta_hat;
  rec.focal_member = r.focal_member;
  rec.components = r.components;
  rec.intervals = to_rec(r.intervals);
  if (model.point_dim() > 1)
    for (std::size_t i = 0; i < r.grid.size(); ++i)
      if (r.member[i]) rec.members.push_back(r.grid[i]);
  if (!a.grid_out.empty()) {
    std::ofstream f(a.grid_out);
    if (!f) throw std::invalid_argument("cannot write " + a.grid_out);
    io::write_grid_csv(f, r.grid, r.member);
  }
  emit(c, rec);
  return 0;
}

struct LimitsArgs {
  std::string prior;
  double sigma = 1.0;
  double alpha = 0.1;
};

int run_limits(const Common& c, const LimitsArgs& a) {
  const PriorModel model = PriorModel::parse(a.prior, a.sigma);
  const LimitInterval plus = limit_interval(model, a.alpha, a.sigma, Direction::plus_infinity);
  const LimitInterval minus = limit_interval(model, a.alpha, a.sigma, Direction::minus_infinity);
  io::LimitsRecord rec;
  rec.prior = model.spec();
  rec.sigma = a.sigma;
  rec.alpha = a.alpha;
  rec.c_alpha = plus.c_alpha;
  rec.plus_infinity = {plus.lo_offset, plus.hi_offset};
  rec.minus_infinity = {minus.lo_offset, minus.hi_offset};
  rec.focal_drift = focal_drift(model);
  rec.width = plus.width();
  rec.z_width = 2.0 * a.sigma * -specfun::norm_quantile(0.5 * a.alpha);
  emit(c, rec);
  return 0;
}

struct RegressArgs {
  std::string csv;
  std::string response;
  std::vector<std::string> covariates;
  bool impute_median = false;
  bool standardize = false;
  bool intercept = false;
  std::string sigma2 = "estimate";
  std::string prior = "horseshoe";
  double alpha = 0.1;
};

int run_regress(const Common& c, const RegressArgs& a) {
  DesignOptions dopts;
  dopts.response = a.response;
  dopts.covariates = a.covariates;
  dopts.impute_median = a.impute_median;
  dopts.standardize = a.standardize;
  dopts.intercept = a.intercept;
  const Design d = build_design(read_csv_file(a.csv), dopts);
  std::optional<double> sigma2;
  if (a.sigma2 != "estimate") {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(a.sigma2.data(), a.sigma2.data() + a.sigma2.size(), v);
    if (ec != std::errc() || ptr != a.sigma2.data() + a.sigma2.size())
      throw std::invalid_argument("--sigma2 takes a positive number or 'estimate'");
    sigma2 = v;
  }
  RegressionProblem prob = fit(d.X, d.Y, sigma2);
  prob.names = d.names;
  const PriorModel prior = PriorModel::parse(a.prior);
  const std::vector<MarginalRow> rows = all_marginal_regions(prob, prior, a.alpha);
  io::RegressRecord rec;
  rec.prior = prior.spec();
  rec.alpha = a.alpha;
  rec.sigma2 = prob.sigma2;
  rec.sigma2_estimated = prob.sigma2_estimated;
  rec.coverage_approximate = prob.sigma2_estimated;
  rec.n = static_cast<int>(prob.n());
  rec.p = static_cast<int>(prob.p());
  for (const MarginalRow& r : rows) {
    rec.rows.push_back({r.name, r.mle, r.region.focal, r.region.lo(), r.region.hi(), r.z_lo, r.z_hi, r.width_ratio(),
                        r.region.disconnected});
  }
  if (prob.sigma2_estimated) std::cerr << "note: sigma2 estimated from residuals; coverage is approximate\n";
  emit(c, rec);
  return 0;
}

struct SimulateArgs {
  std::string config;
  bool serial = false;
};

int run_simulate(const Common& c, const SimulateArgs& a) {
  const ExperimentConfig cfg = load_config(a.config);
  const ExperimentResult res = run_experiment(cfg, a.serial ? Exec::serial : Exec::parallel);
  io::SimulateRecord rec;
  rec.n = cfg.n;
  rec.p = cfg.p;
  rec.alpha = cfg.alpha;
  rec.reps = cfg.reps;
  rec.seed = std::to_string(cfg.seed);
  for (const ExperimentCell& cell : res.cells)
    rec.cells.push_back(
        {cell.prior, cell.log_sigma_beta, cell.mean_width, cell.se_width, cell.coverage, cell.se_coverage});
  emit(c, rec);
  return 0;
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--threads", c.threads, "Thread cap (overrides FABCR_THREADS)")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FAB confidence regions, estimators and p-value functions"};
  app.require_subcommand(1);
  Common common;

  RegionArgs ra;
  auto* region = app.add_subcommand("region", "Gaussian-likelihood region for one observation");
  region->add_option("--prior", ra.prior, "Prior spec, e.g. horseshoe, laplace:kappa=1, bp:a=0.5,b=1")->required();
  region->add_option("--sigma", ra.sigma, "Noise standard deviation")->check(CLI::PositiveNumber);
  region->add_option("--y", ra.y, "Observation")->required();
  region->add_option("--alpha", ra.alpha, "Error level")->check(CLI::Range(0.0, 1.0));
  region->add_option("--mu", ra.mu, "Prior location");
  region->add_option("--scan", ra.scan, "Scan step (units of sigma) for the disconnection check");
  region->add_option("--pvalue-grid", ra.pvalue_grid, "p-value curve on LO:HI:STEP");
  region->add_option("--pvalue-out", ra.pvalue_out, "Write the p-value curve CSV here");
  add_common(region, common);

  NefArgs na;
  auto* nef = app.add_subcommand("nef", "Discrete natural-exponential-family region");
  nef->add_option("--family", na.family, "binom:n=8,a=1,b=1 | poisson:a=1,p=0.5 | multinom:n=15,a=1|1|1")->required();
  nef->add_option("--y", na.y, "Observed count(s), comma separated for the multinomial")->required();
  nef->add_option("--alpha", na.alpha, "Error level")->check(CLI::Range(0.0, 1.0));
  nef->add_option("--step", na.step, "Grid step (0 = default)");
  nef->add_option("--theta-max", na.theta_max, "Poisson grid upper end (0 = automatic)");
  nef->add_option("--grid-out", na.grid_out, "Write grid membership CSV here");
  add_common(nef, common);

  LimitsArgs la;
  auto* limits = app.add_subcommand("limits", "Limiting region offsets as |y| grows");
  limits->add_option("--prior", la.prior, "Prior spec")->required();
  limits->add_option("--sigma", la.sigma, "Noise standard deviation")->check(CLI::PositiveNumber);
  limits->add_option("--alpha", la.alpha, "Error level")->check(CLI::Range(0.0, 1.0));
  add_common(limits, common);

  RegressArgs ga;
  auto* regress = app.add_subcommand("regress", "Per-coefficient regions for a linear model read from CSV");
  regress->add_option("--csv", ga.csv, "Input CSV with a header row")->required()->check(CLI::ExistingFile);
  regress->add_option("--response", ga.response, "Response column")->required();
  regress->add_option("--covariates", ga.covariates, "Covariate columns (default: all others)")->delimiter(',');
  regress->add_flag("--impute-median", ga.impute_median, "Fill missing covariates with the column median");
  regress->add_flag("--standardize", ga.standardize, "Scale covariates to mean 0, variance 1");
  regress->add_flag("--intercept", ga.intercept, "Append a column of ones");
  regress->add_option("--sigma2", ga.sigma2, "Noise variance, or 'estimate'");
  regress->add_option("--prior", ga.prior, "Prior spec; its scale is tied to each coefficient's standard error");
  regress->add_option("--alpha", ga.alpha, "Error level")->check(CLI::Range(0.0, 1.0));
  add_common(regress, common);

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "Synthetic regression study");
  simulate->add_option("--config", sa.config, "key = value config file")->required()->check(CLI::ExistingFile);
  simulate->add_flag("--serial", sa.serial, "Run the serial reference path");
  add_common(simulate, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  apply_thread_env();
  if (common.threads > 0) set_thread_cap(common.threads);

  try {
    if (*region) return run_region(common, ra);
    if (*nef) return run_nef(common, na);
    if (*limits) return run_limits(common, la);
    if (*regress) return run_regress(common, ga);
    if (*simulate) return run_simulate(common, sa);
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << " (at " << e.at() << ")\n";
    if (!e.diagnostics().empty()) std::cerr << "  " << e.diagnostics() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\nrun with --help for usage\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}
