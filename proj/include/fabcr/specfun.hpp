#pragma once

// Special functions used by the closed-form marginals, quantiles and NEF
// cumulants. All routines are pure and thread-safe; none touch global state
// (in particular none call std::lgamma, which writes signgam).

namespace fabcr::specfun {

/// Standard normal CDF Φ(z). Throws std::domain_error for non-finite z.
double norm_cdf(double z);

/// Standard normal density φ(z).
double norm_pdf(double z);

/// log Φ(z), accurate far into the lower tail (z = -1e6 is fine).
double log_norm_cdf(double z);

/// Φ⁻¹(p) for p in (0,1): rational approximation polished by one Halley step.
double norm_quantile(double p);

/// Φ⁻¹(exp(log_p)) for log_p < 0. Works below the double underflow limit,
/// which the spending-function solve needs for Gaussian-tailed priors.
double norm_quantile_log(double log_p);

/// Kummer's confluent hypergeometric function ₁F₁(a; b; z), b > 0.
/// Negative arguments go through ₁F₁(a,b,z) = eᶻ ₁F₁(b-a,b,-z).
/// Throws std::range_error when the value overflows a double.
double kummer_1f1(double a, double b, double z);

/// log ₁F₁(a; b; z) for arguments where the function is positive.
double log_kummer_1f1(double a, double b, double z);

/// Dawson's integral D(z) = e^{-z²} ∫₀ᶻ e^{t²} dt.
double dawson(double z);

/// D(z)/z with the removable singularity filled in (value 1 at z = 0).
double dawson_ratio(double z);

/// Modified Bessel functions of the first kind, z >= 0.
double bessel_i0(double z);
double bessel_i1(double z);
/// e^{-z} I₀(z) and e^{-z} I₁(z); finite for all z >= 0.
double bessel_i0_scaled(double z);
double bessel_i1_scaled(double z);
/// e^{-z} (I₀(z) - I₁(z)) without the cancellation of subtracting the two
/// scaled values at large z.
double bessel_i0_minus_i1_scaled(double z);

/// ϝ(x), x > 0.
double digamma(double x);
/// log Γ(x), x > 0.
double log_gamma(double x);
/// log B(a, b), a, b > 0.
double log_beta(double a, double b);

}  // namespace fabcr::specfun
