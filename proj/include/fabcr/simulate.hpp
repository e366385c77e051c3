#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fabcr/parallel.hpp"
#include "fabcr/priors.hpp"
#include "fabcr/rng.hpp"

namespace fabcr {

struct ExperimentConfig {
  int n = 50;
  int p = 10;
  double sigma_y2 = 1.0;
  std::vector<double> log_sigma_beta_grid{-2.0, -1.0, 0.0, 1.0, 2.0, 3.0};
  std::vector<std::string> priors{"gaussian:tau=1", "laplace:kappa=1", "horseshoe"};
  double alpha = 0.1;
  int reps = 100;
  std::uint64_t seed = 20240607;
  /// Also report the classical z-interval as prior "z".
  bool include_z = true;

  /// Throws std::invalid_argument on violated invariants.
  void validate() const;
};

/// Plain-text `key = value` lines; `#` starts a comment. Keys: n, p,
/// sigma_y2, log_sigma_beta (comma list), priors (';' list), alpha, reps,
/// seed, include_z. Unknown keys are an error.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

struct ExperimentCell {
  std::string prior;
  double log_sigma_beta = 0.0;
  double mean_width = 0.0;
  double se_width = 0.0;
  double coverage = 0.0;
  double se_coverage = 0.0;
  /// Mean over reps of the average √Σ̃_jj.
  double mean_se_beta = 0.0;
};

struct ExperimentResult {
  ExperimentConfig config;
  /// Grid-major, then priors in config order, then "z".
  std::vector<ExperimentCell> cells;

  const ExperimentCell& at(const std::string& prior, double log_sigma_beta) const;
};

/// n×p design with i.i.d. rows, unit variances and corr(x_j, x_k) = 0.5^|j-k|.
Eigen::MatrixXd gen_design(int n, int p, Philox& rng);
Eigen::MatrixXd gen_design(int n, int p, std::uint64_t seed);

/// Rep r at grid point g draws X, then β, then the noise from stream
/// g·reps + r, so every prior sees the same data and results do not depend on
/// scheduling. Per-rep summaries are the mean width and the fraction of the p
/// true β_j covered; cells average them over reps with SE = SD/√reps.
/// A numerical failure aborts with a NumericalError naming the rep.
ExperimentResult run_experiment(const ExperimentConfig& config, Exec exec = Exec::parallel);

struct CoverageMcOptions {
  std::uint64_t samples = 200000;
  std::uint64_t seed = 1;
  /// Draws also checked through the full region construction.
  std::uint64_t end_to_end = 200;
};

struct CoverageMcResult {
  double theta0 = 0.0;
  double alpha = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t hits = 0;
  double coverage = 0.0;
  /// √(α(1-α)/N)
  double se = 0.0;
  std::uint64_t end_to_end_checked = 0;
  /// Draws where θ₀ ∈ C_α(y) disagreed with y ∈ A_α(θ₀).
  std::uint64_t end_to_end_mismatch = 0;
};

/// Empirical P(θ₀ ∈ C_α(Y)) for Y ~ N(θ₀, σ²). Membership is decided by the
/// acceptance interval at θ₀, computed once; the first `end_to_end` draws
/// are also run through confidence_region.
CoverageMcResult coverage_mc(const PriorModel& model, double theta0, double alpha, const CoverageMcOptions& opts = {},
                             Exec exec = Exec::parallel);

}  // namespace fabcr
