#include "fabcr/simulate.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <stdexcept>

#include "fabcr/errors.hpp"
#include "fabcr/fab_gaussian.hpp"
#include "fabcr/regression.hpp"
#include "fabcr/specfun.hpp"

namespace fabcr {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    std::string item = trim(std::string_view(s).substr(start, pos - start));
    if (!item.empty()) out.push_back(std::move(item));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  T v{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw std::invalid_argument(fmt::format("config: bad value '{}' for {}", value, key));
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw std::invalid_argument(fmt::format("config: bad value '{}' for {}", value, key));
}

struct RepSummary {
  double width;
  double coverage;
};

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double se_of(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1)) / std::sqrt(static_cast<double>(v.size()));
}

}  // namespace

void ExperimentConfig::validate() const {
  if (n < 1 || p < 1) throw std::invalid_argument("config: n and p must be >= 1");
  if (n < p) throw std::invalid_argument("config: need n >= p");
  if (!(sigma_y2 > 0.0)) throw std::invalid_argument("config: sigma_y2 must be positive");
  if (log_sigma_beta_grid.empty()) throw std::invalid_argument("config: log_sigma_beta grid is empty");
  if (priors.empty() && !include_z) throw std::invalid_argument("config: no priors");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("config: alpha must lie in (0,1)");
  if (reps < 1) throw std::invalid_argument("config: reps must be >= 1");
  for (const auto& s : priors) (void)PriorModel::parse(s);
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  std::map<std::string, bool> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument(fmt::format("config line {}: expected key = value", line_no));
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (seen[key]) throw std::invalid_argument(fmt::format("config line {}: duplicate key {}", line_no, key));
    seen[key] = true;
    if (key == "n") {
      c.n = parse_number<int>(key, value);
    } else if (key == "p") {
      c.p = parse_number<int>(key, value);
    } else if (key == "sigma_y2") {
      c.sigma_y2 = parse_number<double>(key, value);
    } else if (key == "log_sigma_beta") {
      c.log_sigma_beta_grid.clear();
      for (const auto& v : split_list(value, ',')) c.log_sigma_beta_grid.push_back(parse_number<double>(key, v));
    } else if (key == "priors") {
      c.priors = split_list(value, ';');
    } else if (key == "alpha") {
      c.alpha = parse_number<double>(key, value);
    } else if (key == "reps") {
      c.reps = parse_number<int>(key, value);
    } else if (key == "seed") {
      c.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "include_z") {
      c.include_z = parse_bool(key, value);
    } else {
      throw std::invalid_argument(fmt::format("config line {}: unknown key {}", line_no, key));
    }
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  return parse_config(in);
}

const ExperimentCell& ExperimentResult::at(const std::string& prior, double log_sigma_beta) const {
  for (const auto& c : cells)
    if (c.prior == prior && c.log_sigma_beta == log_sigma_beta) return c;
  throw std::out_of_range(fmt::format("no cell for prior {} at log_sigma_beta {}", prior, log_sigma_beta));
}

Eigen::MatrixXd gen_design(int n, int p, Philox& rng) {
  if (n < 1 || p < 1) throw std::invalid_argument("gen_design: n and p must be >= 1");
  const double innov = std::sqrt(1.0 - 0.25);
  Eigen::MatrixXd X(n, p);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = rng.normal();
    for (int k = 1; k < p; ++k) X(i, k) = 0.5 * X(i, k - 1) + innov * rng.normal();
  }
  return X;
}

Eigen::MatrixXd gen_design(int n, int p, std::uint64_t seed) {
  Philox rng(seed, 0);
  return gen_design(n, p, rng);
}

ExperimentResult run_experiment(const ExperimentConfig& config, Exec exec) {
  config.validate();
  std::vector<PriorModel> models;
  for (const auto& s : config.priors) models.push_back(PriorModel::parse(s));
  const std::size_t n_models = models.size() + (config.include_z ? 1 : 0);
  const auto grid = config.log_sigma_beta_grid.size();
  const auto reps = static_cast<std::size_t>(config.reps);
  const double z = -specfun::norm_quantile(0.5 * config.alpha);

  // summaries[(g·reps + r)·n_models + m]
  std::vector<RepSummary> summaries(grid * reps * n_models);
  std::vector<double> mean_se(grid * reps);
  for_each_index(grid * reps, exec, [&](std::size_t task) {
    const std::size_t g = task / reps, r = task % reps;
    const double sigma_beta = std::exp(config.log_sigma_beta_grid[g]);
    Philox rng(config.seed, task);
    const Eigen::MatrixXd X = gen_design(config.n, config.p, rng);
    Eigen::VectorXd beta(config.p);
    for (int j = 0; j < config.p; ++j) beta(j) = sigma_beta * rng.normal();
    Eigen::VectorXd Y = X * beta;
    const double noise = std::sqrt(config.sigma_y2);
    for (int i = 0; i < config.n; ++i) Y(i) += noise * rng.normal();
    const RegressionProblem prob = fit(X, Y, config.sigma_y2);
    const double p = static_cast<double>(config.p);
    mean_se[task] = prob.Sigma_tilde.diagonal().array().sqrt().mean();

    for (std::size_t m = 0; m < models.size(); ++m) {
      std::vector<MarginalRow> rows;
      try {
        rows = all_marginal_regions(prob, models[m], config.alpha, Exec::serial);
      } catch (const NumericalError& e) {
        throw NumericalError(fmt::format("{} (rep {}, log_sigma_beta {}, prior {})", e.what(), r,
                                         config.log_sigma_beta_grid[g], config.priors[m]),
                             e.at(), e.diagnostics());
      }
      double width = 0.0, covered = 0.0;
      for (const MarginalRow& row : rows) {
        width += row.region.width();
        covered += row.region.contains(beta(row.j)) ? 1.0 : 0.0;
      }
      summaries[task * n_models + m] = {width / p, covered / p};
    }
    if (config.include_z) {
      double width = 0.0, covered = 0.0;
      for (int j = 0; j < config.p; ++j) {
        const double se = std::sqrt(prob.Sigma_tilde(j, j));
        width += 2.0 * z * se;
        covered += std::fabs(prob.beta_hat(j) - beta(j)) <= z * se ? 1.0 : 0.0;
      }
      summaries[task * n_models + models.size()] = {width / p, covered / p};
    }
  });

  ExperimentResult result;
  result.config = config;
  for (std::size_t g = 0; g < grid; ++g) {
    std::vector<double> se_beta(mean_se.begin() + static_cast<long>(g * reps),
                                mean_se.begin() + static_cast<long>((g + 1) * reps));
    for (std::size_t m = 0; m < n_models; ++m) {
      std::vector<double> w(reps), c(reps);
      for (std::size_t r = 0; r < reps; ++r) {
        const RepSummary& s = summaries[(g * reps + r) * n_models + m];
        w[r] = s.width;
        c[r] = s.coverage;
      }
      ExperimentCell cell;
      cell.prior = m < models.size() ? config.priors[m] : "z";
      cell.log_sigma_beta = config.log_sigma_beta_grid[g];
      cell.mean_width = mean_of(w);
      cell.se_width = se_of(w, cell.mean_width);
      cell.coverage = mean_of(c);
      cell.se_coverage = se_of(c, cell.coverage);
      cell.mean_se_beta = mean_of(se_beta);
      result.cells.push_back(std::move(cell));
    }
  }
  return result;
}

CoverageMcResult coverage_mc(const PriorModel& model, double theta0, double alpha, const CoverageMcOptions& opts,
                             Exec exec) {
  constexpr std::uint64_t kChunk = 8192;
  const AcceptanceInterval ai = acceptance_interval(model, theta0, alpha);
  const double s = model.sigma();
  const std::uint64_t chunks = (opts.samples + kChunk - 1) / kChunk;
  std::vector<std::uint64_t> hits(chunks, 0);
  for_each_index(chunks, exec, [&](std::size_t c) {
    Philox rng(opts.seed, c);
    const std::uint64_t end = std::min(opts.samples, (c + 1) * kChunk);
    std::uint64_t h = 0;
    for (std::uint64_t i = c * kChunk; i < end; ++i) {
      const double y = theta0 + s * rng.normal();
      h += (ai.lo <= y && y <= ai.hi) ? 1 : 0;
    }
    hits[c] = h;
  });

  CoverageMcResult out;
  out.theta0 = theta0;
  out.alpha = alpha;
  out.samples = opts.samples;
  for (auto h : hits) out.hits += h;
  out.coverage = static_cast<double>(out.hits) / static_cast<double>(opts.samples);
  out.se = std::sqrt(alpha * (1.0 - alpha) / static_cast<double>(opts.samples));

  // The end-to-end draws replay the start of chunk 0.
  const std::uint64_t e2e = std::min(opts.end_to_end, opts.samples);
  std::vector<double> ys(e2e);
  {
    Philox rng(opts.seed, 0);
    for (auto& y : ys) y = theta0 + s * rng.normal();
  }
  std::vector<char> mismatch(e2e, 0);
  RegionOptions ropts;
  ropts.exec = Exec::serial;
  for_each_index(e2e, exec, [&](std::size_t i) {
    const double y = ys[i];
    const bool accepted = ai.lo <= y && y <= ai.hi;
    // Draws within the endpoint tolerance of an acceptance bound are ambiguous.
    if (std::min(std::fabs(y - ai.lo), std::fabs(y - ai.hi)) < 1e-7 * s) return;
    const ConfidenceRegion region = confidence_region(model, y, alpha, ropts);
    mismatch[i] = region.contains(theta0) != accepted;
  });
  out.end_to_end_checked = e2e;
  for (char m : mismatch) out.end_to_end_mismatch += m ? 1 : 0;
  return out;
}

}  // namespace fabcr
