#include "fabcr/regression.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "fabcr/specfun.hpp"

namespace fabcr {

namespace {

struct Decomposition {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr;
  Eigen::VectorXd beta_hat;
  /// P R⁻¹, so that (XᵀX)⁻¹ = B Bᵀ.
  Eigen::MatrixXd B;
  double condition;
};

Decomposition decompose(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y) {
  const Eigen::Index n = X.rows(), p = X.cols();
  if (p < 1) throw std::invalid_argument("regression: X has no columns");
  if (Y.size() != n) throw std::invalid_argument(fmt::format("regression: X has {} rows but Y has {}", n, Y.size()));
  if (n < p) throw std::invalid_argument(fmt::format("regression: n = {} < p = {}", n, p));
  if (!X.allFinite() || !Y.allFinite()) throw std::invalid_argument("regression: non-finite data");
  Decomposition d{Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(X), {}, {}, 0.0};
  const auto R = d.qr.matrixR().topLeftCorner(p, p);
  const double r0 = std::fabs(R(0, 0)), rp = std::fabs(R(p - 1, p - 1));
  d.condition = rp > 0.0 ? r0 / rp : std::numeric_limits<double>::infinity();
  if (!(d.condition <= kMaxCondition))
    throw std::invalid_argument(fmt::format("regression: X is rank deficient (condition {:.3g})", d.condition));
  d.beta_hat = d.qr.solve(Y);
  const Eigen::MatrixXd Rinv =
      R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
  d.B = d.qr.colsPermutation() * Rinv;
  return d;
}

}  // namespace

RegressionProblem fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, std::optional<double> sigma2) {
  const Eigen::Index n = X.rows(), p = X.cols();
  if (!sigma2 && n <= p)
    throw std::invalid_argument(fmt::format("regression: estimating sigma2 needs n > p (n = {}, p = {})", n, p));
  if (sigma2 && !(*sigma2 > 0.0 && std::isfinite(*sigma2)))
    throw std::invalid_argument("regression: sigma2 must be positive");
  Decomposition d = decompose(X, Y);
  RegressionProblem prob;
  prob.X = X;
  prob.Y = Y;
  prob.beta_hat = std::move(d.beta_hat);
  prob.condition = d.condition;
  if (sigma2) {
    prob.sigma2 = *sigma2;
  } else {
    const Eigen::VectorXd resid = Y - X * prob.beta_hat;
    prob.sigma2 = resid.squaredNorm() / static_cast<double>(n - p);
    prob.sigma2_estimated = true;
  }
  prob.Sigma_tilde = prob.sigma2 * (d.B * d.B.transpose());
  prob.Sigma_tilde = 0.5 * (prob.Sigma_tilde + prob.Sigma_tilde.transpose()).eval();
  return prob;
}

RegressionProblem fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y, const Eigen::MatrixXd& Sigma) {
  const Eigen::Index n = X.rows();
  if (Sigma.rows() != n || Sigma.cols() != n)
    throw std::invalid_argument(fmt::format("regression: Sigma must be {0}x{0}", n));
  Decomposition d = decompose(X, Y);
  // β̂ = H Y with H = P R⁻¹ Q₁ᵀ
  const Eigen::MatrixXd Q1 = d.qr.householderQ() * Eigen::MatrixXd::Identity(n, X.cols());
  const Eigen::MatrixXd H = d.B * Q1.transpose();
  RegressionProblem prob;
  prob.X = X;
  prob.Y = Y;
  prob.beta_hat = std::move(d.beta_hat);
  prob.condition = d.condition;
  prob.sigma2 = std::numeric_limits<double>::quiet_NaN();
  prob.Sigma_tilde = H * Sigma * H.transpose();
  prob.Sigma_tilde = 0.5 * (prob.Sigma_tilde + prob.Sigma_tilde.transpose()).eval();
  return prob;
}

ConfidenceRegion combo_region(const RegressionProblem& prob, const Eigen::VectorXd& x, const PriorModel& prior,
                              double alpha, const RegionOptions& opts) {
  if (x.size() != prob.p()) throw std::invalid_argument("combo_region: x has the wrong length");
  if (x.isZero(0.0)) throw std::invalid_argument("combo_region: x must be nonzero");
  const double v = x.dot(prob.Sigma_tilde * x);
  if (!(v > 0.0)) throw std::invalid_argument(fmt::format("combo_region: x'Sigma_tilde x = {} is not positive", v));
  const double s = std::sqrt(v);
  return confidence_region(prior.tied_to(s), x.dot(prob.beta_hat), alpha, opts);
}

std::vector<MarginalRow> all_marginal_regions(const RegressionProblem& prob, const PriorModel& prior, double alpha,
                                              Exec exec) {
  const auto p = static_cast<std::size_t>(prob.p());
  const double z = -specfun::norm_quantile(0.5 * alpha);
  std::vector<MarginalRow> rows(p);
  RegionOptions opts;
  opts.exec = Exec::serial;
  for_each_index(p, exec, [&](std::size_t j) {
    MarginalRow& r = rows[j];
    r.j = static_cast<Eigen::Index>(j);
    r.name = j < prob.names.size() ? prob.names[j] : fmt::format("x{}", j + 1);
    r.mle = prob.beta_hat(r.j);
    r.se = std::sqrt(prob.Sigma_tilde(r.j, r.j));
    r.region = combo_region(prob, Eigen::VectorXd::Unit(prob.p(), r.j), prior, alpha, opts);
    r.z_lo = r.mle - z * r.se;
    r.z_hi = r.mle + z * r.se;
  });
  std::stable_sort(rows.begin(), rows.end(),
                   [](const MarginalRow& a, const MarginalRow& b) { return a.z_width() < b.z_width(); });
  return rows;
}

}  // namespace fabcr
