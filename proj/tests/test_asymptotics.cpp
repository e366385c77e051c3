#include <doctest.h>

#include <cmath>

#include "catalog.hpp"
#include "fabcr/asymptotics.hpp"
#include "fabcr/errors.hpp"
#include "fabcr/fab_gaussian.hpp"

using namespace fabcr;

TEST_CASE("g_alpha values") {
  for (double a : {0.01, 0.1, 0.7}) CHECK(g_alpha(a, 0.5) == doctest::Approx(0.0).epsilon(1e-15));
  for (double w : {0.1, 0.4, 0.9}) CHECK(g_alpha(1.0, w) == doctest::Approx(2 * oracle::Phi_inv(w)).epsilon(1e-12));
  CHECK(g_alpha(0.1, 0.25) == doctest::Approx(oracle::Phi_inv(0.025) - oracle::Phi_inv(0.075)).epsilon(1e-12));
}

TEST_CASE("g_alpha is strictly increasing") {
  for (double a : {0.05, 0.3, 1.0}) {
    double prev = -INFINITY;
    for (int i = 1; i < 1000; ++i) {
      const double g = g_alpha(a, i / 1000.0);
      REQUIRE(g > prev);
      prev = g;
    }
  }
}

TEST_CASE("g_alpha inverse") {
  for (double a : {0.05, 0.1, 0.5}) CHECK(g_alpha_inv(a, 0.0) == doctest::Approx(0.5).epsilon(1e-12));
  for (double t : {-3.0, -0.5, 1.0, 4.0}) CHECK(g_alpha_inv(1.0, t) == doctest::Approx(oracle::Phi(t / 2)).epsilon(1e-12));
  for (double a : {0.01, 0.1, 0.9})
    for (double w : {1e-6, 0.01, 0.3, 0.77, 0.999}) {
      CHECK(std::fabs(g_alpha_inv(a, g_alpha(a, w)) - w) <= 1e-12);
      const double t = g_alpha(a, w);
      CHECK(std::fabs(g_alpha(a, g_alpha_inv(a, t)) - t) <= 1e-12 * std::max(1.0, std::fabs(t)));
    }
  CHECK(std::fabs(g_alpha_inv(0.1, -2.0) - oracle::g_alpha_inv(0.1, -2.0)) <= 1e-12);
}

TEST_CASE("c_alpha lies below Phi(-kappa)") {
  for (double kappa : {0.5, 1.0, 2.0, 4.0})
    for (double a : {0.01, 0.1, 0.3}) CHECK(g_alpha_inv(a, -2 * kappa) < oracle::Phi(-kappa));
  for (double a : {0.01, 0.1, 0.3}) CHECK(g_alpha_inv(a, 0.0) == doctest::Approx(oracle::Phi(0.0)));
}

TEST_CASE("limit intervals") {
  const double z = oracle::Phi_inv_upper(0.05);
  for (const char* spec : {"horseshoe", "flat", "flat+atom:gamma=0.1", "bp:a=1,b=1"}) {
    const LimitInterval li = limit_interval(PriorModel::parse(spec), 0.1, 1.0, Direction::plus_infinity);
    CHECK(li.c_alpha == doctest::Approx(0.5));
    CHECK(li.lo_offset == doctest::Approx(-z).epsilon(1e-12));
    CHECK(li.hi_offset == doctest::Approx(z).epsilon(1e-12));
  }
  for (double kappa : {0.5, 1.0, 2.0}) {
    const PriorModel m(LaplacePrior{kappa}, 1.0);
    const LimitInterval p = limit_interval(m, 0.1, 2.0, Direction::plus_infinity);
    const LimitInterval n = limit_interval(m, 0.1, 2.0, Direction::minus_infinity);
    CHECK(p.lo_offset == doctest::Approx(-n.hi_offset));
    CHECK(p.hi_offset == doctest::Approx(-n.lo_offset));
    const double c = oracle::g_alpha_inv(0.1, -2 * kappa);
    CHECK(p.c_alpha == doctest::Approx(c).epsilon(1e-9));
    CHECK(p.width() ==
          doctest::Approx(2.0 * (oracle::Phi_inv_upper(0.1 * c) + oracle::Phi_inv_upper(0.1 * (1 - c)))).epsilon(1e-9));
    // the region sits below y as y → +∞
    CHECK(p.lo_offset + p.hi_offset < 0);
  }
  CHECK_THROWS_AS(limit_interval(PriorModel::parse("gaussian:tau=1"), 0.1, 1.0, Direction::plus_infinity),
                  UnsupportedModelError);
}

TEST_CASE("focal drift") {
  CHECK(focal_drift(PriorModel::parse("horseshoe")) == 0.0);
  CHECK(focal_drift(PriorModel::parse("laplace:kappa=2")) == 2.0);
  CHECK(focal_drift(PriorModel::parse("flat+atom:gamma=0.5")) == 0.0);
  CHECK_THROWS_AS(focal_drift(PriorModel::parse("gaussian:tau=1")), UnsupportedModelError);
}

TEST_CASE("regions far out match the limits") {
  for (const char* spec : {"horseshoe", "laplace:kappa=0.5", "laplace:kappa=1", "laplace:kappa=2"}) {
    const PriorModel m = PriorModel::parse(spec);
    for (double y : {1e4, -1e4}) {
      const ConfidenceRegion r = confidence_region(m, y, 0.1);
      const LimitInterval li =
          limit_interval(m, 0.1, 1.0, y > 0 ? Direction::plus_infinity : Direction::minus_infinity);
      CAPTURE(spec);
      CAPTURE(y);
      CHECK(oracle::hausdorff(r.lo() - y, r.hi() - y, li.lo_offset, li.hi_offset) <= 1e-2);
      CHECK(std::fabs(std::fabs(y - r.focal) - focal_drift(m)) <= 1e-3);
    }
  }
}

TEST_CASE("spending weight tends to c_alpha") {
  for (double kappa : {0.5, 1.0, 2.0}) {
    const PriorModel m(LaplacePrior{kappa}, 1.0);
    const double c = oracle::g_alpha_inv(0.1, -2 * kappa);
    CHECK(std::fabs(spending_weight(m, -1e3, 0.1) - c) <= 0.01);
    CHECK(std::fabs(spending_weight(m, 1e3, 0.1) - (1 - c)) <= 0.01);
  }
}
