#pragma once

#include <span>
#include <vector>

#include "fabcr/parallel.hpp"
#include "fabcr/priors.hpp"

namespace fabcr {

/// Acceptance interval [lo, hi] of the most powerful level-α test of θ = θ₀
/// against the prior-weighted alternative. lo = θ₀ + σΦ⁻¹(αw) and
/// hi = θ₀ - σΦ⁻¹(α(1-w)).
struct AcceptanceInterval {
  double theta0;
  double w;
  /// log(w/(1-w)); the solve runs on this scale, which stays meaningful when
  /// w itself underflows (Gaussian priors far from their centre).
  double logit_w;
  double lo;
  double hi;
  double alpha;
};

/// λ_θ₀(y) = ℓ(y) + (y-θ₀)²/(2σ²), up to a constant.
double lambda_theta0(const PriorModel& model, double theta0, double y);

/// Spending weight w_α(θ₀).
/// Throws NumericalError when the root cannot be bracketed.
double spending_weight(const PriorModel& model, double theta0, double alpha);

AcceptanceInterval acceptance_interval(const PriorModel& model, double theta0, double alpha);

/// lo_α(θ₀) <= y <= hi_α(θ₀)
bool region_contains(const PriorModel& model, double y, double theta0, double alpha);

struct Interval {
  double lo;
  double hi;
  double width() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
};

struct ConfidenceRegion {
  std::vector<Interval> intervals;  // sorted, disjoint
  double alpha = 0.0;
  double focal = 0.0;
  double y = 0.0;
  bool focal_member = false;
  /// Set when the scan diagnostic found more than one component.
  bool disconnected = false;

  double lo() const { return intervals.front().lo; }
  double hi() const { return intervals.back().hi; }
  double width() const;
  bool contains(double theta) const;
};

struct RegionOptions {
  /// Dense-scan step for the disconnection diagnostic; 0 disables it.
  double scan_step = 0.0;
  Exec exec = Exec::parallel;
  /// Absolute tolerance on endpoints.
  double tol = 1e-10;
};

/// C_α(y) = {θ₀ : lo_α(θ₀) <= y <= hi_α(θ₀)}.
/// Throws OpenRegionError if an endpoint is not found within
/// |θ₀| <= |y| + 50σ·max(1, κ).
ConfidenceRegion confidence_region(const PriorModel& model, double y, double alpha, const RegionOptions& opts = {});

/// Region for a prior centred at mu instead of 0.
ConfidenceRegion shifted_confidence_region(const PriorModel& model, double mu, double y, double alpha,
                                           const RegionOptions& opts = {});

/// Posterior mean, the point contained in C_α(y) for every α.
double focal_point(const PriorModel& model, double y);

/// p_y(θ₀) = sup{α : θ₀ ∈ C_α(y)}, by bisection on α to within tol.
double p_value(const PriorModel& model, double y, double theta0, double tol = 1e-8);

struct PValueCurve {
  std::vector<double> grid;
  std::vector<double> pvals;
  double y = 0.0;
};

PValueCurve p_value_curve(const PriorModel& model, double y, std::span<const double> grid, Exec exec = Exec::parallel);

}  // namespace fabcr
