#include "fabcr/priors.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "fabcr/errors.hpp"
#include "fabcr/specfun.hpp"

namespace fabcr {

namespace sf = specfun;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool is_pair(const BetaPrimeMixture& m, double a, double b) { return m.a == a && m.b == b; }

double log_normal_density(double y, double var) { return -0.5 * y * y / var - kLogSqrt2Pi - 0.5 * std::log(var); }

double log_add_exp(double a, double b) {
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::fabs(a - b)));
}

// The two branch terms of the Laplace marginal on the log scale:
// L1 = -κu + log Φ(u-κ), L2 = κu + log Φ(-u-κ), u = y/σ.
void laplace_terms(double kappa, double u, double& l1, double& l2) {
  l1 = -kappa * u + sf::log_norm_cdf(u - kappa);
  l2 = kappa * u + sf::log_norm_cdf(-u - kappa);
}

double require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(fmt::format("prior: {} must be positive", what));
  return v;
}

std::map<std::string, double> parse_params(std::string_view body, std::string_view spec) {
  std::map<std::string, double> out;
  while (!body.empty()) {
    const auto comma = body.find(',');
    const std::string_view item = body.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0)
      throw std::invalid_argument(fmt::format("prior spec '{}': expected key=value, got '{}'", spec, item));
    const std::string key(item.substr(0, eq));
    const std::string_view val = item.substr(eq + 1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
    if (ec != std::errc() || ptr != val.data() + val.size())
      throw std::invalid_argument(fmt::format("prior spec '{}': bad number '{}'", spec, val));
    if (!out.emplace(key, v).second)
      throw std::invalid_argument(fmt::format("prior spec '{}': duplicate key '{}'", spec, key));
    if (comma == std::string_view::npos) break;
    body.remove_prefix(comma + 1);
  }
  return out;
}

double take(std::map<std::string, double>& params, const std::string& key, std::optional<double> fallback,
            std::string_view spec) {
  const auto it = params.find(key);
  if (it == params.end()) {
    if (!fallback) throw std::invalid_argument(fmt::format("prior spec '{}': missing '{}'", spec, key));
    return *fallback;
  }
  const double v = it->second;
  params.erase(it);
  return v;
}

}  // namespace

double beta_prime_log_marginal(double a, double b, double sigma, double y) {
  const double alpha = a + 0.5, beta = a + b + 0.5;
  return -kLogSqrt2Pi - std::log(sigma) + sf::log_gamma(alpha) + sf::log_gamma(a + b) - sf::log_gamma(a) -
         sf::log_gamma(beta) + sf::log_kummer_1f1(alpha, beta, -0.5 * (y / sigma) * (y / sigma));
}

double beta_prime_dlog_marginal(double a, double b, double sigma, double y) {
  if (y == 0.0) return 0.0;
  const double alpha = a + 0.5, beta = a + b + 0.5;
  const double z = -0.5 * (y / sigma) * (y / sigma);
  const double ratio = std::exp(sf::log_kummer_1f1(alpha + 1, beta + 1, z) - sf::log_kummer_1f1(alpha, beta, z));
  return -(y / (sigma * sigma)) * (alpha / beta) * ratio;
}

double horseshoe_log_marginal(double sigma, double y) {
  // (2/π^{3/2}) D(u)/|y| with u = |y|/(σ√2), written through D(u)/u
  const double s2 = sigma * std::numbers::sqrt2;
  const double u = std::fabs(y) / s2;
  return std::log(2.0 / (kPi * std::sqrt(kPi) * s2)) + std::log(sf::dawson_ratio(u));
}

double horseshoe_dlog_marginal(double sigma, double y) {
  const double s2 = sigma * std::numbers::sqrt2;
  const double u = std::fabs(y) / s2;
  if (u < 0.5) return beta_prime_dlog_marginal(0.5, 0.5, sigma, y);
  const double d = sf::dawson(u);
  const double dlog_du = (1.0 - 2.0 * u * d) / d - 1.0 / u;
  return (y < 0.0 ? -dlog_du : dlog_du) / s2;
}

double gpd_log_marginal(double sigma, double y) {
  const double x = 0.5 * (y / sigma) * (y / sigma);
  const double shape = (x == 0.0) ? 0.0 : std::log(-std::expm1(-x)) - std::log(x);
  return -std::log(2.0 * sigma) - kLogSqrt2Pi + shape;
}

double gpd_dlog_marginal(double sigma, double y) {
  const double x = 0.5 * (y / sigma) * (y / sigma);
  double dlog_dx;
  if (x < 0.1) {
    const double x2 = x * x;
    dlog_dx = -0.5 + x / 12.0 - x * x2 / 720.0 + x * x2 * x2 / 30240.0 - x * x2 * x2 * x2 / 1209600.0;
  } else {
    dlog_dx = 1.0 / std::expm1(x) - 1.0 / x;
  }
  return dlog_dx * y / (sigma * sigma);
}

double bessel_log_marginal(double sigma, double y) {
  const double z = 0.25 * (y / sigma) * (y / sigma);
  return -kLogSqrt2Pi - std::log(sigma) + std::log(0.25 * kPi) + std::log(sf::bessel_i0_minus_i1_scaled(z));
}

double bessel_dlog_marginal(double sigma, double y) {
  if (y == 0.0) return 0.0;
  const double z = 0.25 * (y / sigma) * (y / sigma);
  // d/dz log[e^{-z}(I0-I1)] = -2 + e^{-z}I1 / (z e^{-z}(I0-I1))
  const double i1_over_z = (z == 0.0) ? 0.5 : sf::bessel_i1_scaled(z) / z;
  const double dlog_dz = -2.0 + i1_over_z / sf::bessel_i0_minus_i1_scaled(z);
  return dlog_dz * y / (2.0 * sigma * sigma);
}

PriorModel::PriorModel(PriorKind kind, double sigma) : kind_(kind), sigma_(sigma) {
  require_positive(sigma, "sigma");
  std::visit(overloaded{[](const GaussianPrior& g) { require_positive(g.tau, "tau"); },
                        [](const BetaPrimeMixture& m) {
                          require_positive(m.a, "a");
                          require_positive(m.b, "b");
                        },
                        [](const LaplacePrior& l) { require_positive(l.kappa, "kappa"); },
                        [](const FlatImproper&) {},
                        [](const FlatPlusAtom& f) { require_positive(f.gamma, "gamma"); }},
             kind_);
}

PriorModel PriorModel::parse(std::string_view spec, double sigma) {
  const auto colon = spec.find(':');
  const std::string name(spec.substr(0, colon));
  auto params = parse_params(colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1), spec);
  PriorKind kind;
  if (name == "horseshoe") {
    kind = BetaPrimeMixture{0.5, 0.5};
  } else if (name == "gpd") {
    kind = BetaPrimeMixture{0.5, 1.0};
  } else if (name == "bessel") {
    kind = BetaPrimeMixture{1.0, 0.5};
  } else if (name == "bp") {
    const double a = take(params, "a", std::nullopt, spec);
    kind = BetaPrimeMixture{a, take(params, "b", std::nullopt, spec)};
  } else if (name == "laplace") {
    kind = LaplacePrior{take(params, "kappa", 1.0, spec)};
  } else if (name == "gaussian") {
    kind = GaussianPrior{take(params, "tau", 1.0, spec)};
  } else if (name == "flat") {
    kind = FlatImproper{};
  } else if (name == "flat+atom") {
    kind = FlatPlusAtom{take(params, "gamma", std::nullopt, spec)};
  } else {
    throw std::invalid_argument(fmt::format("unknown prior '{}'", name));
  }
  if (!params.empty())
    throw std::invalid_argument(fmt::format("prior spec '{}': unexpected key '{}'", spec, params.begin()->first));
  return PriorModel(kind, sigma);
}

std::string PriorModel::spec() const {
  return std::visit(overloaded{[](const GaussianPrior& g) { return fmt::format("gaussian:tau={}", g.tau); },
                               [](const BetaPrimeMixture& m) {
                                 if (is_pair(m, 0.5, 0.5)) return std::string("horseshoe");
                                 if (is_pair(m, 0.5, 1.0)) return std::string("gpd");
                                 if (is_pair(m, 1.0, 0.5)) return std::string("bessel");
                                 return fmt::format("bp:a={},b={}", m.a, m.b);
                               },
                               [](const LaplacePrior& l) { return fmt::format("laplace:kappa={}", l.kappa); },
                               [](const FlatImproper&) { return std::string("flat"); },
                               [](const FlatPlusAtom& f) { return fmt::format("flat+atom:gamma={}", f.gamma); }},
                    kind_);
}

PriorModel PriorModel::with_sigma(double sigma) const { return PriorModel(kind_, sigma); }

PriorModel PriorModel::tied_to(double s) const {
  if (const auto* g = std::get_if<GaussianPrior>(&kind_)) return PriorModel(GaussianPrior{g->tau * s}, s);
  return PriorModel(kind_, s);
}

namespace {

// (y/σ)² must stay finite.
void check_scaled(double y, double s) {
  if (std::fabs(y / s) > 1e150) throw NumericalError("y/sigma outside the representable range", y);
}

}  // namespace

double PriorModel::log_marginal(double y) const {
  if (!std::isfinite(y)) throw std::domain_error("log_marginal: non-finite y");
  const double s = sigma_;
  check_scaled(y, s);
  return std::visit(overloaded{[&](const GaussianPrior& g) { return log_normal_density(y, s * s + g.tau * g.tau); },
                               [&](const BetaPrimeMixture& m) {
                                 if (is_pair(m, 0.5, 0.5)) return horseshoe_log_marginal(s, y);
                                 if (is_pair(m, 0.5, 1.0)) return gpd_log_marginal(s, y);
                                 if (is_pair(m, 1.0, 0.5)) return bessel_log_marginal(s, y);
                                 return beta_prime_log_marginal(m.a, m.b, s, y);
                               },
                               [&](const LaplacePrior& l) {
                                 double l1, l2;
                                 laplace_terms(l.kappa, y / s, l1, l2);
                                 return std::log(l.kappa / (2.0 * s)) + 0.5 * l.kappa * l.kappa + log_add_exp(l1, l2);
                               },
                               [](const FlatImproper&) { return 0.0; },
                               [&](const FlatPlusAtom& f) {
                                 const double lphi = log_normal_density(y, s * s);
                                 return log_add_exp(std::log(f.gamma), lphi);
                               }},
                    kind_);
}

double PriorModel::dlog_marginal(double y) const {
  if (!std::isfinite(y)) throw std::domain_error("dlog_marginal: non-finite y");
  const double s = sigma_;
  check_scaled(y, s);
  return std::visit(overloaded{[&](const GaussianPrior& g) { return -y / (s * s + g.tau * g.tau); },
                               [&](const BetaPrimeMixture& m) {
                                 if (is_pair(m, 0.5, 0.5)) return horseshoe_dlog_marginal(s, y);
                                 if (is_pair(m, 0.5, 1.0)) return gpd_dlog_marginal(s, y);
                                 if (is_pair(m, 1.0, 0.5)) return bessel_dlog_marginal(s, y);
                                 return beta_prime_dlog_marginal(m.a, m.b, s, y);
                               },
                               [&](const LaplacePrior& l) {
                                 double l1, l2;
                                 laplace_terms(l.kappa, y / s, l1, l2);
                                 // (κ/σ)(T2 - T1)/(T1 + T2) = (κ/σ) tanh((L2 - L1)/2)
                                 return (l.kappa / s) * std::tanh(0.5 * (l2 - l1));
                               },
                               [](const FlatImproper&) { return 0.0; },
                               [&](const FlatPlusAtom& f) {
                                 // -(y/σ²) φ/(γ+φ), with the weight as a logistic in log space
                                 const double lphi = log_normal_density(y, s * s);
                                 const double wphi = 1.0 / (1.0 + std::exp(std::log(f.gamma) - lphi));
                                 return -(y / (s * s)) * wphi;
                               }},
                    kind_);
}

double PriorModel::posterior_mean(double y) const {
  if (!std::isfinite(y)) throw std::domain_error("posterior_mean: non-finite y");
  const double s = sigma_;
  check_scaled(y, s);
  if (const auto* m = std::get_if<BetaPrimeMixture>(&kind_)) {
    if (y == 0.0) return 0.0;
    const double alpha = m->a + 0.5, beta = m->a + m->b + 0.5;
    const double z = -0.5 * (y / s) * (y / s);
    const double ratio = std::exp(sf::log_kummer_1f1(alpha + 1, beta + 1, z) - sf::log_kummer_1f1(alpha, beta, z));
    return y * (1.0 - (alpha / beta) * ratio);
  }
  if (const auto* l = std::get_if<LaplacePrior>(&kind_)) {
    double l1, l2;
    laplace_terms(l->kappa, y / s, l1, l2);
    const double xi = 1.0 / (1.0 + std::exp(l1 - l2));
    return xi * (y + s * l->kappa) + (1.0 - xi) * (y - s * l->kappa);
  }
  return y + s * s * dlog_marginal(y);
}

std::optional<TailProfile> PriorModel::tail_profile() const {
  const double s = sigma_;
  return std::visit(
      overloaded{[](const GaussianPrior&) -> std::optional<TailProfile> { return std::nullopt; },
                 [&](const BetaPrimeMixture& m) -> std::optional<TailProfile> {
                   const double lg = sf::log_gamma(m.a + 0.5) - sf::log_beta(m.a, m.b) + m.a * std::log(2 * s * s) -
                                     0.5 * std::log(kPi);
                   return TailProfile{0.0, 2 * m.a + 1, std::exp(lg)};
                 },
                 [&](const LaplacePrior& l) -> std::optional<TailProfile> {
                   return TailProfile{l.kappa, 0.0, l.kappa / (2 * s) * std::exp(0.5 * l.kappa * l.kappa)};
                 },
                 [](const FlatImproper&) -> std::optional<TailProfile> { return TailProfile{0.0, 0.0, 1.0}; },
                 [](const FlatPlusAtom& f) -> std::optional<TailProfile> { return TailProfile{0.0, 0.0, f.gamma}; }},
      kind_);
}

bool PriorModel::scale_tied() const {
  return !std::holds_alternative<GaussianPrior>(kind_) && !std::holds_alternative<FlatPlusAtom>(kind_);
}

bool PriorModel::proper() const {
  return !std::holds_alternative<FlatImproper>(kind_) && !std::holds_alternative<FlatPlusAtom>(kind_);
}

}  // namespace fabcr
