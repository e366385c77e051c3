#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace fabcr {

struct RootOptions {
  double xtol = 1e-13;
  int max_iter = 200;
};

struct RootResult {
  double x = std::numeric_limits<double>::quiet_NaN();
  double fx = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  bool converged = false;
};

/// Brent's zero-in: bisection safeguarding secant / inverse quadratic steps.
/// Requires fa and fb of opposite sign (or one of them zero).
template <class F>
RootResult brent_root(F&& f, double a, double b, double fa, double fb,
                      const RootOptions& opts = {}) {
  RootResult res;
  if (fa == 0.0) return {a, fa, 0, true};
  if (fb == 0.0) return {b, fb, 0, true};
  if ((fa > 0.0) == (fb > 0.0)) return res;

  constexpr double eps = std::numeric_limits<double>::epsilon();
  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::fabs(fc) < std::fabs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol = 2.0 * eps * std::fabs(b) + 0.5 * opts.xtol;
    const double m = 0.5 * (c - b);
    if (std::fabs(m) <= tol || fb == 0.0) {
      return {b, fb, iter, true};
    }
    if (std::fabs(e) >= tol && std::fabs(fa) > std::fabs(fb)) {
      double p, q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc, r = fb / fc;
        p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q; else p = -p;
      if (2.0 * p < std::min(3.0 * m * q - std::fabs(tol * q), std::fabs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = m;
      }
    } else {
      d = m;
      e = m;
    }
    a = b;
    fa = fb;
    b += (std::fabs(d) > tol) ? d : (m > 0.0 ? tol : -tol);
    fb = f(b);
  }
  res.x = b;
  res.fx = fb;
  res.iterations = opts.max_iter;
  return res;
}

}  // namespace fabcr
