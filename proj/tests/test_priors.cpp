#include <doctest.h>

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <string>
#include <vector>

#include "fabcr/priors.hpp"
#include "fabcr/specfun.hpp"
#include "catalog.hpp"
#include "marginal_oracle.hpp"

using fabcr::PriorModel;

namespace {

constexpr double kPi = boost::math::constants::pi<double>();

using oracle::bp_marginal_quadrature;
using oracle::bp_posterior_mean_quadrature;
using oracle::laplace_marginal_quadrature;
using oracle::normal_density;

struct BpCase {
  const char* spec;
  double a;
  double b;
};
const std::vector<BpCase> kBp = {{"horseshoe", 0.5, 0.5}, {"gpd", 0.5, 1.0},      {"bessel", 1.0, 0.5},
                                 {"bp:a=1.5,b=2", 1.5, 2.0}, {"bp:a=0.3,b=0.7", 0.3, 0.7}, {"bp:a=2,b=0.5", 2.0, 0.5}};

const std::vector<std::string>& kCatalog = oracle::kCatalog;

const std::vector<double> kYs = {0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0, 5.0, -5.0, 10.0, -10.0};

}  // namespace

TEST_CASE("beta-prime marginals match the mixture integral") {
  for (double sigma : {1.0, 0.3, 4.0}) {
    for (const auto& c : kBp) {
      const PriorModel m = PriorModel::parse(c.spec, sigma);
      for (double y : kYs) {
        const double ys = y * sigma;
        CAPTURE(c.spec);
        CAPTURE(sigma);
        CAPTURE(ys);
        const double q = bp_marginal_quadrature(c.a, c.b, sigma, ys);
        CHECK(oracle::close_rel(std::exp(m.log_marginal(ys)), q, 1e-8));
      }
    }
  }
}

TEST_CASE("laplace marginal matches the convolution integral") {
  for (double kappa : {0.5, 1.0, 2.0}) {
    for (double sigma : {1.0, 2.5}) {
      const PriorModel m(fabcr::LaplacePrior{kappa}, sigma);
      for (double y : kYs) {
        CAPTURE(kappa);
        CAPTURE(y);
        const double q = laplace_marginal_quadrature(kappa, sigma, y * sigma);
        CHECK(oracle::close_rel(std::exp(m.log_marginal(y * sigma)), q, 1e-8));
      }
    }
  }
}

TEST_CASE("laplace log marginal stays finite far out") {
  const PriorModel m = PriorModel::parse("laplace:kappa=1");
  for (double y : {1e3, 1e6, -1e6}) {
    const double l = m.log_marginal(y);
    CHECK(std::isfinite(l));
    // log f ≈ log(κ/2σ) + κ²/2 - κ|y|/σ
    CHECK(l == doctest::Approx(std::log(0.5) + 0.5 - std::fabs(y)).epsilon(1e-12));
  }
}

TEST_CASE("gaussian, flat and flat+atom marginals") {
  const PriorModel g = PriorModel::parse("gaussian:tau=1.5", 2.0);
  const PriorModel f = PriorModel::parse("flat", 2.0);
  const PriorModel fa = PriorModel::parse("flat+atom:gamma=0.1", 2.0);
  for (double y : kYs) {
    CHECK(g.log_marginal(y) == doctest::Approx(std::log(normal_density(y, 4.0 + 2.25))).epsilon(1e-13));
    CHECK(g.dlog_marginal(y) == doctest::Approx(-y / 6.25).epsilon(1e-13));
    CHECK(f.log_marginal(y) == 0.0);
    CHECK(fa.log_marginal(y) == doctest::Approx(std::log(0.1 + normal_density(y, 4.0))).epsilon(1e-13));
  }
}

TEST_CASE("special-case closed forms agree with the general 1F1 form") {
  for (double sigma : {1.0, 0.7}) {
    for (double y : {0.1, -0.1, 1.0, -1.0, 5.0, -5.0, 20.0, -20.0}) {
      CAPTURE(y);
      const double ys = y * sigma;
      CHECK(std::fabs(fabcr::horseshoe_log_marginal(sigma, ys) - fabcr::beta_prime_log_marginal(0.5, 0.5, sigma, ys)) <= 1e-10);
      CHECK(std::fabs(fabcr::gpd_log_marginal(sigma, ys) - fabcr::beta_prime_log_marginal(0.5, 1.0, sigma, ys)) <= 1e-10);
      CHECK(std::fabs(fabcr::bessel_log_marginal(sigma, ys) - fabcr::beta_prime_log_marginal(1.0, 0.5, sigma, ys)) <= 1e-10);
    }
  }
}

TEST_CASE("documented marginal values") {
  SUBCASE("gpd at the origin") {
    CHECK(PriorModel::parse("gpd").log_marginal(0.0) ==
          doctest::Approx(std::log(1.0 / (2.0 * std::sqrt(2 * kPi)))).epsilon(1e-13));
  }
  SUBCASE("horseshoe at y = 2 from the Dawson integral") {
    const double z = 2.0 / std::sqrt(2.0);
    const double D = std::exp(-z * z) * oracle::integrate([](double t) { return std::exp(t * t); }, 0.0, z);
    const double expect = std::log(2.0 / std::pow(kPi, 1.5) * 0.5 * D);
    CHECK(PriorModel::parse("horseshoe").log_marginal(2.0) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(fabcr::beta_prime_log_marginal(0.5, 0.5, 1.0, 2.0) == doctest::Approx(expect).epsilon(1e-10));
  }
  SUBCASE("bessel form near the origin") {
    for (double y : {0.0, 0.4, 3.0}) {
      const double q = bp_marginal_quadrature(1.0, 0.5, 1.0, y);
      CHECK(std::exp(fabcr::bessel_log_marginal(1.0, y)) == doctest::Approx(q).epsilon(1e-9));
    }
  }
}

TEST_CASE("derivatives match central differences") {
  for (const auto& spec : kCatalog) {
    for (double sigma : {1.0, 2.0}) {
      const PriorModel m = PriorModel::parse(spec, sigma);
      for (double y : {0.0, 0.05, -0.3, 1.0, -2.5, 7.0, -15.0, 40.0, 300.0}) {
        CAPTURE(spec);
        CAPTURE(sigma);
        CAPTURE(y);
        const double h = std::max(1.0, std::fabs(y)) * 6e-6;
        const double fd = oracle::central_difference([&](double t) { return m.log_marginal(t); }, y, h);
        CHECK(std::fabs(m.dlog_marginal(y) - fd) <= 1e-6);
      }
      CHECK(m.dlog_marginal(0.0) == doctest::Approx(0.0));
    }
  }
}

TEST_CASE("laplace derivative at y = 3 against a fine central difference") {
  const PriorModel m = PriorModel::parse("laplace:kappa=1");
  const double fd = oracle::central_difference([&](double t) { return m.log_marginal(t); }, 3.0, 1e-6);
  CHECK(std::fabs(m.dlog_marginal(3.0) - fd) <= 1e-8);
}

TEST_CASE("Tweedie consistency and documented posterior means") {
  for (const auto& spec : kCatalog) {
    const PriorModel m = PriorModel::parse(spec, 1.3);
    for (double y : kYs) {
      CAPTURE(spec);
      CAPTURE(y);
      CHECK(std::fabs(m.posterior_mean(y) - (y + 1.69 * m.dlog_marginal(y))) <= 1e-10 * std::max(1.0, std::fabs(y)));
    }
  }
  CHECK(PriorModel::parse("flat").posterior_mean(5.0) == 5.0);
  CHECK(PriorModel::parse("gaussian:tau=1").posterior_mean(2.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::fabs(PriorModel::parse("laplace:kappa=1").posterior_mean(100.0) - 99.0) <= 1e-6);
}

TEST_CASE("posterior means match the posterior integral") {
  for (const auto& c : kBp) {
    const PriorModel m = PriorModel::parse(c.spec);
    for (double y : {0.5, -1.0, 2.0, 5.0}) {
      CAPTURE(c.spec);
      CAPTURE(y);
      CHECK(m.posterior_mean(y) == doctest::Approx(bp_posterior_mean_quadrature(c.a, c.b, 1.0, y)).epsilon(1e-8));
    }
  }
  for (double kappa : {0.5, 2.0}) {
    const PriorModel m(fabcr::LaplacePrior{kappa}, 1.0);
    for (double y : {0.5, -1.0, 3.0}) {
      double mean = 0.0;
      laplace_marginal_quadrature(kappa, 1.0, y, &mean);
      CHECK(m.posterior_mean(y) == doctest::Approx(mean).epsilon(1e-8));
    }
  }
}

TEST_CASE("symmetry") {
  for (const auto& spec : kCatalog) {
    const PriorModel m = PriorModel::parse(spec, 0.8);
    for (double y : {0.2, 1.7, 9.0, 60.0}) {
      CAPTURE(spec);
      CHECK(m.log_marginal(-y) == doctest::Approx(m.log_marginal(y)).epsilon(1e-13));
      CHECK(m.dlog_marginal(-y) == doctest::Approx(-m.dlog_marginal(y)).epsilon(1e-12));
    }
  }
}

TEST_CASE("power-law tails") {
  for (const auto& c : kBp) {
    const PriorModel m = PriorModel::parse(c.spec);
    const double d = 2 * c.a + 1;
    const double l3 = m.log_marginal(1e3) + d * std::log(1e3);
    const double l4 = m.log_marginal(1e4) + d * std::log(1e4);
    CAPTURE(c.spec);
    CHECK(std::fabs(l3 - l4) < 0.02);
    const auto tp = m.tail_profile();
    REQUIRE(tp);
    CHECK(tp->kappa == 0.0);
    CHECK(tp->delta == doctest::Approx(d));
    // γ is the limit itself
    CHECK(std::log(tp->gamma) == doctest::Approx(l4).epsilon(1e-3));
  }
}

TEST_CASE("tail profiles") {
  CHECK(PriorModel::parse("horseshoe").tail_profile()->delta == 2.0);
  const auto lp = PriorModel::parse("laplace:kappa=2").tail_profile();
  CHECK(lp->kappa == 2.0);
  CHECK(lp->delta == 0.0);
  const auto fa = PriorModel::parse("flat+atom:gamma=0.3").tail_profile();
  CHECK(fa->kappa == 0.0);
  CHECK(fa->delta == 0.0);
  CHECK(PriorModel::parse("flat").tail_profile()->kappa == 0.0);
  CHECK_FALSE(PriorModel::parse("gaussian:tau=1").tail_profile().has_value());
}

TEST_CASE("scale property for sigma-tied kinds") {
  for (const auto& spec : kCatalog) {
    const PriorModel one = PriorModel::parse(spec, 1.0);
    if (!one.scale_tied()) continue;
    for (double sigma : {0.25, 3.0, 40.0}) {
      const PriorModel m = one.with_sigma(sigma);
      for (double y : {0.0, 0.7, -4.0, 25.0}) {
        CAPTURE(spec);
        CAPTURE(sigma);
        const double expect = one.log_marginal(y / sigma) - (one.proper() ? std::log(sigma) : 0.0);
        CHECK(m.log_marginal(y) == doctest::Approx(expect).epsilon(1e-12));
      }
    }
  }
  CHECK_FALSE(PriorModel::parse("gaussian:tau=1").scale_tied());
  CHECK_FALSE(PriorModel::parse("flat+atom:gamma=1").scale_tied());
}

TEST_CASE("tied_to rescales the gaussian prior") {
  const PriorModel g = PriorModel::parse("gaussian:tau=2").tied_to(3.0);
  CHECK(g.sigma() == 3.0);
  CHECK(std::get<fabcr::GaussianPrior>(g.kind()).tau == 6.0);
  const PriorModel h = PriorModel::parse("horseshoe").tied_to(3.0);
  CHECK(h.sigma() == 3.0);
}

TEST_CASE("spec strings") {
  for (const auto& spec : kCatalog) {
    const PriorModel m = PriorModel::parse(spec);
    CHECK(PriorModel::parse(m.spec()).spec() == m.spec());
  }
  CHECK(PriorModel::parse("bp:a=0.5,b=0.5").log_marginal(1.3) == PriorModel::parse("horseshoe").log_marginal(1.3));
  CHECK(PriorModel::parse("laplace").spec() == PriorModel::parse("laplace:kappa=1").spec());
  for (const char* bad : {"", "cauchy", "bp:a=1", "bp:a=-1,b=1", "laplace:kappa=0", "gaussian:tau=x",
                          "laplace:kappa=1,kappa=2", "laplace:rate=1", "flat+atom"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(PriorModel::parse(bad), std::invalid_argument);
  }
}
