#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace fabcr {

/// θ ~ N(0, τ²) with τ on the absolute scale.
struct GaussianPrior {
  double tau;
};
/// Scale mixture θ | τ² ~ N(0, σ²τ²) with τ² ~ BP(a, b), density
/// (τ²)^{b-1}(1+τ²)^{-(a+b)}/B(a,b). (½,½) is the horseshoe, (½,1) the
/// GPD mixture, (1,½) the Bessel mixture.
struct BetaPrimeMixture {
  double a;
  double b;
};
/// θ ~ Laplace with scale σ/κ.
struct LaplacePrior {
  double kappa;
};
/// Lebesgue measure on the real line; ℓ ≡ 0.
struct FlatImproper {};
/// γ·Lebesgue + unit point mass at 0.
struct FlatPlusAtom {
  double gamma;
};

using PriorKind = std::variant<GaussianPrior, BetaPrimeMixture, LaplacePrior, FlatImproper, FlatPlusAtom>;

/// f(y) ~ γ |y|^{-δ} exp(-κ|y|/σ) as |y| → ∞.
struct TailProfile {
  double kappa;
  double delta;
  double gamma;
};

/// A prior for the mean of N(θ, σ²), centred at 0, with the marginal
/// f(y) = ∫ N(y; θ, σ²) π(dθ) in closed form.
class PriorModel {
 public:
  PriorModel(PriorKind kind, double sigma);

  /// Parse "horseshoe", "gpd", "bessel", "bp:a=1,b=0.5", "laplace:kappa=2",
  /// "gaussian:tau=1", "flat", "flat+atom:gamma=0.1".
  /// Throws std::invalid_argument on malformed specs.
  static PriorModel parse(std::string_view spec, double sigma = 1.0);

  /// Canonical spec string; parse(spec()) reproduces the kind.
  std::string spec() const;

  const PriorKind& kind() const { return kind_; }
  double sigma() const { return sigma_; }

  PriorModel with_sigma(double sigma) const;
  /// Likelihood scale s, and for the Gaussian kind τ multiplied by s, so the
  /// prior scale follows the likelihood scale for every kind.
  PriorModel tied_to(double s) const;

  /// ℓ(y) = log f(y).
  double log_marginal(double y) const;
  /// ℓ'(y).
  double dlog_marginal(double y) const;
  /// E[θ | y] = y + σ² ℓ'(y).
  double posterior_mean(double y) const;

  /// std::nullopt for the Gaussian prior, whose marginal has Gaussian tails.
  std::optional<TailProfile> tail_profile() const;

  bool symmetric() const { return true; }
  /// True when the prior scale is a fixed multiple of σ.
  bool scale_tied() const;
  bool proper() const;

 private:
  PriorKind kind_;
  double sigma_;
};

// Closed forms for the beta-prime mixture marginal. The general ₁F₁ form
// holds for every (a, b); the other three are the special cases.
double beta_prime_log_marginal(double a, double b, double sigma, double y);
double beta_prime_dlog_marginal(double a, double b, double sigma, double y);
double horseshoe_log_marginal(double sigma, double y);
double horseshoe_dlog_marginal(double sigma, double y);
double gpd_log_marginal(double sigma, double y);
double gpd_dlog_marginal(double sigma, double y);
double bessel_log_marginal(double sigma, double y);
double bessel_dlog_marginal(double sigma, double y);

}  // namespace fabcr
