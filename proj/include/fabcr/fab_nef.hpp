#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fabcr/fab_gaussian.hpp"
#include "fabcr/parallel.hpp"

namespace fabcr {

/// y ~ Binomial(n, θ), θ ~ Beta(a, b).
struct BinomialBeta {
  int n;
  double a;
  double b;
};
/// y ~ Poisson(θ), θ ~ Gamma(shape a, rate p/(1-p)).
struct PoissonGamma {
  double a;
  double p;
};
/// y ~ Multinomial(n, θ), θ ~ Dirichlet(a), 2 <= k <= 4.
struct MultinomialDirichlet {
  int n;
  std::vector<double> a;
};

using NefFamily = std::variant<BinomialBeta, PoissonGamma, MultinomialDirichlet>;

/// Count vector. Scalar families use a single entry; the multinomial uses
/// all k counts.
using NefPoint = std::vector<int>;

/// Natural exponential family likelihood with its conjugate-style prior.
/// The natural parameter η has one coordinate for the scalar families and
/// k-1 for the multinomial (log-odds against the last category).
class NefModel {
 public:
  explicit NefModel(NefFamily family);

  /// "binom:n=8,a=1,b=1", "poisson:a=1,p=0.5", "multinom:n=15,a=1|1|1"
  /// (or "multinom:n=15,k=3,a=1" for a symmetric Dirichlet).
  static NefModel parse(std::string_view spec);
  std::string spec() const;

  const NefFamily& family() const { return family_; }
  int eta_dim() const;
  /// Length of an NefPoint: 1, or k.
  int point_dim() const;

  /// λ(y) on the extended domain; the scalar families accept real y.
  double lambda(const std::vector<double>& y) const;
  double lambda(const NefPoint& y) const;
  /// ∇λ(y) with respect to the η coordinates (digamma closed forms).
  std::vector<double> grad_lambda(const std::vector<double>& y) const;

  /// Cumulant ψ(η).
  double psi(const std::vector<double>& eta) const;
  /// log h(y) + ηᵀy - ψ(η).
  double log_pmf(const std::vector<double>& eta, const NefPoint& y) const;
  /// Mean map ℱ(η): success probability, Poisson rate, or the k-vector of
  /// category probabilities.
  std::vector<double> mean_map(const std::vector<double>& eta) const;
  /// Inverse of mean_map.
  std::vector<double> eta_of(const std::vector<double>& theta) const;

  /// Throws std::domain_error when y is not in the support.
  void check_point(const NefPoint& y) const;

 private:
  NefFamily family_;
};

struct FabEstimate {
  std::vector<double> eta_hat;
  std::vector<double> theta_hat;
};

/// η̂ = ∇λ(y), θ̂ = ℱ(η̂).
FabEstimate fab_estimator(const NefModel& model, const NefPoint& y);

struct DiscreteAcceptanceSet {
  std::vector<double> eta;
  std::vector<NefPoint> members;  // in ascending λ_η order
  double attained_coverage = 0.0;
  double k_alpha = 0.0;
};

struct AcceptanceOptions {
  /// Poisson support is cut once the f_η upper-tail mass drops below tail ...
  double tail = 1e-12;
  /// ... and then stretched by this factor.
  double support_scale = 1.0;
};

/// Smallest-k_α set {y : λ_η(y) <= k_α} with f_η-mass >= 1-α. Ties at k_α
/// are all included.
DiscreteAcceptanceSet acceptance_set(const NefModel& model, const std::vector<double>& eta, double alpha,
                                     const AcceptanceOptions& opts = {});

bool nef_region_contains(const NefModel& model, const NefPoint& y, const std::vector<double>& eta, double alpha,
                         const AcceptanceOptions& opts = {});

struct NefGridSpec {
  /// θ step (binomial), log-θ step (Poisson) or barycentric step
  /// (multinomial). 0 picks 1e-4, 1e-3 and 0.01 respectively.
  double step = 0.0;
  /// Poisson only: grid runs from theta_min to theta_max (0 = automatic).
  double theta_min = 1e-6;
  double theta_max = 0.0;
  AcceptanceOptions acceptance{};
  Exec exec = Exec::parallel;
};

struct NefRegion {
  NefPoint y;
  double alpha = 0.0;
  /// Grid points in θ coordinates (each of length 1 or k) and membership.
  std::vector<std::vector<double>> grid;
  std::vector<char> member;
  /// Scalar families: maximal runs of member grid points.
  std::vector<Interval> intervals;
  int components = 0;
  FabEstimate focal;
  /// y ∈ A_α(η̂), checked directly at the estimator.
  bool focal_member = false;
};

NefRegion confidence_region_nef(const NefModel& model, const NefPoint& y, double alpha, const NefGridSpec& spec = {});

}  // namespace fabcr
