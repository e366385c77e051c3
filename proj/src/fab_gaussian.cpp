#include "fabcr/fab_gaussian.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fabcr/errors.hpp"
#include "fabcr/roots.hpp"
#include "fabcr/specfun.hpp"

namespace fabcr {

namespace {

constexpr double kLogitStart = 40.0;
constexpr double kLogitCap = 1e300;

double softplus(double t) { return std::max(t, 0.0) + std::log1p(std::exp(-std::fabs(t))); }

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("alpha must lie in (0,1)");
}

// Standardized offsets of the acceptance bounds for logit weight t:
// zl = Φ⁻¹(αw) and zh = -Φ⁻¹(α(1-w)).
void bound_offsets(double log_alpha, double t, double& zl, double& zh) {
  zl = specfun::norm_quantile_log(log_alpha - softplus(-t));
  zh = -specfun::norm_quantile_log(log_alpha - softplus(t));
}

struct Solved {
  double t;
  double zl;
  double zh;
};

Solved solve_logit(const PriorModel& model, double theta0, double alpha) {
  check_alpha(alpha);
  if (!std::isfinite(theta0)) throw std::domain_error("theta0 must be finite");
  const double s = model.sigma();
  const double log_alpha = std::log(alpha);
  // G(t) = λ(lo) - λ(hi), decreasing in t
  auto g = [&](double t) {
    double zl, zh;
    bound_offsets(log_alpha, t, zl, zh);
    return (model.log_marginal(theta0 + s * zl) + 0.5 * zl * zl) - (model.log_marginal(theta0 + s * zh) + 0.5 * zh * zh);
  };
  double a = -kLogitStart, b = kLogitStart;
  double ga = g(a), gb = g(b);
  while (ga < 0.0 && a > -kLogitCap) {
    b = a;
    gb = ga;
    a *= 2.0;
    ga = g(a);
  }
  while (gb > 0.0 && b < kLogitCap) {
    a = b;
    ga = gb;
    b *= 2.0;
    gb = g(b);
  }
  const RootResult r = brent_root(g, a, b, ga, gb, RootOptions{1e-13, 200});
  if (!r.converged || !std::isfinite(r.x)) {
    throw NumericalError("spending-weight solve failed", theta0,
                         fmt::format("prior={} sigma={} theta0={} alpha={} bracket=[{}, {}] G=[{}, {}]", model.spec(),
                                     s, theta0, alpha, a, b, ga, gb));
  }
  Solved out{r.x, 0.0, 0.0};
  bound_offsets(log_alpha, r.x, out.zl, out.zh);
  return out;
}

double search_cap(const PriorModel& model, double y) {
  const auto tail = model.tail_profile();
  const double kappa = tail ? tail->kappa : 0.0;
  return std::fabs(y) + 50.0 * model.sigma() * std::max(1.0, kappa);
}

// min(y - lo(θ₀), hi(θ₀) - y): non-negative exactly on the region.
double membership_margin(const PriorModel& model, double y, double theta0, double alpha) {
  const AcceptanceInterval ai = acceptance_interval(model, theta0, alpha);
  return std::min(y - ai.lo, ai.hi - y);
}

// Boundary between a member point `in` and a non-member point `out`.
double refine_boundary(const PriorModel& model, double y, double alpha, double in, double out, double m_in,
                       double m_out, double tol) {
  auto m = [&](double th) { return membership_margin(model, y, th, alpha); };
  const RootResult r = brent_root(m, in, out, m_in, m_out, RootOptions{tol, 300});
  if (!r.converged) throw NumericalError("region endpoint refinement failed", in);
  return r.x;
}

double find_endpoint(const PriorModel& model, double y, double alpha, double start, double m_start, double dir,
                     double tol) {
  const double cap = search_cap(model, y);
  const double s = model.sigma();
  double in = start, m_in = m_start;
  for (int k = 0;; ++k) {
    double probe = start + dir * s * std::ldexp(1.0, k);
    const bool last = std::fabs(probe) >= cap;
    if (last) probe = dir * cap;
    const double m_probe = membership_margin(model, y, probe, alpha);
    if (m_probe < 0.0) return refine_boundary(model, y, alpha, in, probe, m_in, m_probe, tol);
    in = probe;
    m_in = m_probe;
    if (last) break;
  }
  throw OpenRegionError("confidence region endpoint not bracketed", in,
                        fmt::format("prior={} y={} alpha={} cap={}", model.spec(), y, alpha, cap));
}

void scan_components(const PriorModel& model, double y, double alpha, const RegionOptions& opts,
                     ConfidenceRegion& region) {
  const double cap = search_cap(model, y);
  const auto n = static_cast<std::size_t>(std::ceil(2.0 * cap / opts.scan_step)) + 1;
  std::vector<double> theta(n), margin(n);
  for_each_index(n, opts.exec, [&](std::size_t i) {
    theta[i] = -cap + static_cast<double>(i) * opts.scan_step;
    margin[i] = membership_margin(model, y, theta[i], alpha);
  });
  std::vector<Interval> found;
  std::size_t i = 0;
  while (i < n) {
    if (margin[i] < 0.0) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && margin[j + 1] >= 0.0) ++j;
    const double lo =
        (i == 0) ? theta[0]
                 : refine_boundary(model, y, alpha, theta[i], theta[i - 1], margin[i], margin[i - 1], opts.tol);
    const double hi =
        (j + 1 == n) ? theta[n - 1]
                     : refine_boundary(model, y, alpha, theta[j], theta[j + 1], margin[j], margin[j + 1], opts.tol);
    found.push_back({lo, hi});
    i = j + 1;
  }
  // Merge the scan with the bracketed main component.
  for (const Interval& iv : region.intervals) found.push_back(iv);
  std::sort(found.begin(), found.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> merged;
  for (const Interval& iv : found) {
    if (!merged.empty() && iv.lo <= merged.back().hi + opts.scan_step) {
      merged.back().hi = std::max(merged.back().hi, iv.hi);
      merged.back().lo = std::min(merged.back().lo, iv.lo);
    } else {
      merged.push_back(iv);
    }
  }
  region.disconnected = merged.size() > 1;
  region.intervals = std::move(merged);
}

}  // namespace

double lambda_theta0(const PriorModel& model, double theta0, double y) {
  const double d = (y - theta0) / model.sigma();
  return model.log_marginal(y) + 0.5 * d * d;
}

double spending_weight(const PriorModel& model, double theta0, double alpha) {
  return acceptance_interval(model, theta0, alpha).w;
}

AcceptanceInterval acceptance_interval(const PriorModel& model, double theta0, double alpha) {
  const Solved sv = solve_logit(model, theta0, alpha);
  const double s = model.sigma();
  return {theta0, 1.0 / (1.0 + std::exp(-sv.t)), sv.t, theta0 + s * sv.zl, theta0 + s * sv.zh, alpha};
}

bool region_contains(const PriorModel& model, double y, double theta0, double alpha) {
  const AcceptanceInterval ai = acceptance_interval(model, theta0, alpha);
  return ai.lo <= y && y <= ai.hi;
}

double ConfidenceRegion::width() const {
  double w = 0.0;
  for (const Interval& iv : intervals) w += iv.width();
  return w;
}

bool ConfidenceRegion::contains(double theta) const {
  return std::any_of(intervals.begin(), intervals.end(), [theta](const Interval& iv) { return iv.contains(theta); });
}

double focal_point(const PriorModel& model, double y) { return model.posterior_mean(y); }

ConfidenceRegion confidence_region(const PriorModel& model, double y, double alpha, const RegionOptions& opts) {
  check_alpha(alpha);
  if (!std::isfinite(y)) throw std::domain_error("y must be finite");
  ConfidenceRegion region;
  region.alpha = alpha;
  region.y = y;
  region.focal = focal_point(model, y);
  const double m_focal = membership_margin(model, y, region.focal, alpha);
  region.focal_member = m_focal >= 0.0;
  if (!region.focal_member) {
    throw NumericalError("focal point fails the membership test", region.focal,
                         fmt::format("prior={} y={} alpha={} margin={}", model.spec(), y, alpha, m_focal));
  }
  const double lo = find_endpoint(model, y, alpha, region.focal, m_focal, -1.0, opts.tol);
  const double hi = find_endpoint(model, y, alpha, region.focal, m_focal, +1.0, opts.tol);
  region.intervals.push_back({lo, hi});
  if (opts.scan_step > 0.0) scan_components(model, y, alpha, opts, region);
  return region;
}

ConfidenceRegion shifted_confidence_region(const PriorModel& model, double mu, double y, double alpha,
                                           const RegionOptions& opts) {
  ConfidenceRegion r = confidence_region(model, y - mu, alpha, opts);
  for (Interval& iv : r.intervals) {
    iv.lo += mu;
    iv.hi += mu;
  }
  r.focal += mu;
  r.y = y;
  return r;
}

double p_value(const PriorModel& model, double y, double theta0, double tol) {
  constexpr double kLow = 1e-12;
  constexpr double kHigh = 1.0 - 1e-9;
  if (region_contains(model, y, theta0, kHigh)) return 1.0;
  if (!region_contains(model, y, theta0, kLow)) return 0.0;
  double lo = kLow, hi = kHigh;  // member at lo, not at hi
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (region_contains(model, y, theta0, mid))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

PValueCurve p_value_curve(const PriorModel& model, double y, std::span<const double> grid, Exec exec) {
  PValueCurve curve;
  curve.y = y;
  curve.grid.assign(grid.begin(), grid.end());
  curve.pvals.assign(grid.size(), 0.0);
  for_each_index(grid.size(), exec, [&](std::size_t i) { curve.pvals[i] = p_value(model, y, curve.grid[i]); });
  return curve;
}

}  // namespace fabcr
