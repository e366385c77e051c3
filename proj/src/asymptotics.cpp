#include "fabcr/asymptotics.hpp"

#include <cmath>
#include <stdexcept>

#include "fabcr/errors.hpp"
#include "fabcr/specfun.hpp"

namespace fabcr {

namespace {

TailProfile require_tail(const PriorModel& model) {
  const auto tail = model.tail_profile();
  if (!tail) throw UnsupportedModelError("prior " + model.spec() + " has a Gaussian-tailed marginal; no limit exists");
  return *tail;
}

}  // namespace

double g_alpha(double alpha, double w) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::domain_error("g_alpha: alpha must lie in (0,1]");
  if (!(w > 0.0 && w < 1.0)) throw std::domain_error("g_alpha: w must lie in (0,1)");
  return specfun::norm_quantile(alpha * w) - specfun::norm_quantile(alpha * (1.0 - w));
}

double g_alpha_inv(double alpha, double t) {
  if (!std::isfinite(t)) throw std::domain_error("g_alpha_inv: t must be finite");
  double lo = 1e-16, hi = 1.0 - 1e-16;
  if (t <= g_alpha(alpha, lo)) return lo;
  if (t >= g_alpha(alpha, hi)) return hi;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g_alpha(alpha, mid) < t)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

LimitInterval limit_interval(const PriorModel& model, double alpha, double sigma, Direction direction) {
  const TailProfile tail = require_tail(model);
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("limit_interval: alpha must lie in (0,1)");
  if (!(sigma > 0.0)) throw std::domain_error("limit_interval: sigma must be positive");
  const double c = g_alpha_inv(alpha, -2.0 * tail.kappa);
  if (tail.kappa > 0.0 && !(c > 0.0 && c < specfun::norm_cdf(-tail.kappa)))
    throw NumericalError("limit_interval: c_alpha outside (0, Phi(-kappa))", c);
  const double near = sigma * specfun::norm_quantile(1.0 - alpha * (1.0 - c));
  const double far = sigma * specfun::norm_quantile(1.0 - alpha * c);
  if (direction == Direction::plus_infinity) return {-far, near, c, direction};
  return {-near, far, c, direction};
}

double focal_drift(const PriorModel& model) { return model.sigma() * require_tail(model).kappa; }

}  // namespace fabcr
