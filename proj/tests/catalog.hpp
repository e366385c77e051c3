#pragma once

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <string>
#include <vector>

#include "oracles.hpp"

namespace oracle {

/// Every prior kind, with the three Laplace rates used by the limit tests.
inline const std::vector<std::string> kCatalog = {
    "horseshoe", "gpd", "bessel", "bp:a=1.5,b=2", "laplace:kappa=0.5", "laplace:kappa=1", "laplace:kappa=2",
    "gaussian:tau=1", "flat", "flat+atom:gamma=0.1"};

inline double Phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double Phi_inv(double p) {
  static const boost::math::normal_distribution<double> n01;
  return boost::math::quantile(n01, p);
}

/// Φ⁻¹(1-q) for small q without forming 1-q.
inline double Phi_inv_upper(double q) {
  static const boost::math::normal_distribution<double> n01;
  return boost::math::quantile(boost::math::complement(n01, q));
}

/// g_α⁻¹(t) by bisection on Boost quantiles.
inline double g_alpha_inv(double alpha, double t) {
  auto g = [&](double w) { return Phi_inv(alpha * w) - Phi_inv(alpha * (1 - w)) - t; };
  return bisect(g, 1e-300, 1 - 1e-16);
}

/// Hausdorff distance between two intervals.
inline double hausdorff(double a_lo, double a_hi, double b_lo, double b_hi) {
  return std::max(std::fabs(a_lo - b_lo), std::fabs(a_hi - b_hi));
}

}  // namespace oracle
