#pragma once

#include "fabcr/priors.hpp"

namespace fabcr {

/// g_α(w) = Φ⁻¹(αw) - Φ⁻¹(α(1-w)), strictly increasing in w.
double g_alpha(double alpha, double w);

/// Inverse of g_α by bisection on [1e-16, 1-1e-16].
double g_alpha_inv(double alpha, double t);

enum class Direction { plus_infinity, minus_infinity };

/// Limit of C_α(y) - y as y → ±∞ for a marginal with tail rate κ.
struct LimitInterval {
  double lo_offset;
  double hi_offset;
  double c_alpha;  // g_α⁻¹(-2κ), in (0, ½]
  Direction direction;
  double width() const { return hi_offset - lo_offset; }
};

/// Limiting offsets of the region around y. As y → +∞ the region sits
/// below y by the prior's pull: [-σΦ⁻¹(1-αc), σΦ⁻¹(1-α(1-c))], mirrored for
/// y → -∞. Throws UnsupportedModelError for Gaussian-tailed marginals.
LimitInterval limit_interval(const PriorModel& model, double alpha, double sigma, Direction direction);

/// lim y - E[θ|y] as y → +∞, which is σκ.
double focal_drift(const PriorModel& model);

}  // namespace fabcr
