#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "fabcr/fab_gaussian.hpp"
#include "fabcr/parallel.hpp"
#include "fabcr/priors.hpp"

namespace fabcr {

/// Y | β ~ N(Xβ, Σ). Immutable after fit.
struct RegressionProblem {
  Eigen::MatrixXd X;
  Eigen::VectorXd Y;
  Eigen::VectorXd beta_hat;
  /// Covariance of β̂.
  Eigen::MatrixXd Sigma_tilde;
  /// Noise variance for the i.i.d. case; NaN when a full Σ was given.
  double sigma2 = 0.0;
  /// σ² was replaced by RSS/(n-p); region coverage is then approximate.
  bool sigma2_estimated = false;
  /// |R₀₀/R_pp| of the pivoted QR.
  double condition = 0.0;
  std::vector<std::string> names;

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index p() const { return X.cols(); }
};

/// Condition numbers above this are treated as rank deficient.
inline constexpr double kMaxCondition = 1e12;

/// i.i.d. noise with known variance sigma2, or estimated when absent.
/// Throws std::invalid_argument for n < p, n <= p without sigma2, or a
/// rank-deficient X.
RegressionProblem fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, std::optional<double> sigma2 = std::nullopt);

/// General noise covariance Σ (n×n, PSD).
RegressionProblem fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, const Eigen::MatrixXd& Sigma);

/// FAB region for xᵀβ: σ = √(xᵀΣ̃x), prior scale tied to σ, y = xᵀβ̂.
/// `prior` supplies the kind only; its σ is ignored.
ConfidenceRegion combo_region(const RegressionProblem& prob, const Eigen::VectorXd& x, const PriorModel& prior,
                              double alpha, const RegionOptions& opts = {});

struct MarginalRow {
  Eigen::Index j = 0;
  std::string name;
  double mle = 0.0;
  double se = 0.0;
  ConfidenceRegion region;
  double z_lo = 0.0;
  double z_hi = 0.0;

  double z_width() const { return z_hi - z_lo; }
  double width_ratio() const { return region.width() / z_width(); }
};

/// One row per coefficient, ordered by z-interval width (ties by j).
std::vector<MarginalRow> all_marginal_regions(const RegressionProblem& prob, const PriorModel& prior, double alpha,
                                              Exec exec = Exec::parallel);

}  // namespace fabcr
