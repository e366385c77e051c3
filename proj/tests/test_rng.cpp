#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "fabcr/rng.hpp"
#include "fabcr/specfun.hpp"

using fabcr::Philox;

TEST_CASE("philox4x32-10 known-answer vectors") {
  // Random123 kat_vectors
  CHECK(Philox::block({0, 0, 0, 0}, {0, 0}) == Philox::Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox::block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        Philox::Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox::block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        Philox::Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are deterministic and distinct") {
  Philox a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  std::vector<std::uint64_t> va, vc, vd;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    va.push_back(x);
    vc.push_back(c.next_u64());
    vd.push_back(d.next_u64());
  }
  CHECK(va != vc);
  CHECK(va != vd);
  std::set<std::uint64_t> all(va.begin(), va.end());
  all.insert(vc.begin(), vc.end());
  all.insert(vd.begin(), vd.end());
  CHECK(all.size() == 300);
}

TEST_CASE("uniforms lie strictly inside (0,1) with the right moments") {
  Philox r(1, 0);
  const int n = 400000;
  double s = 0, s2 = 0;
  std::vector<int> bins(20, 0);
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    s += u;
    s2 += u * u;
    ++bins[static_cast<int>(u * 20)];
  }
  const double mean = s / n, var = s2 / n - mean * mean;
  CHECK(std::fabs(mean - 0.5) < 4 * std::sqrt(1.0 / 12 / n));
  CHECK(std::fabs(var - 1.0 / 12) < 1e-3);
  // χ² with 19 degrees of freedom; 43.8 is the 0.999 quantile
  double chi2 = 0;
  for (int b : bins) chi2 += (b - n / 20.0) * (b - n / 20.0) / (n / 20.0);
  CHECK(chi2 < 43.8);
}

TEST_CASE("normals come from the quantile transform") {
  Philox r(9, 3), u(9, 3);
  for (int i = 0; i < 1000; ++i) CHECK(r.normal() == fabcr::specfun::norm_quantile(u.uniform()));
  Philox g(5, 0);
  const int n = 400000;
  double s = 0, s2 = 0, s4 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = g.normal();
    s += z;
    s2 += z * z;
    s4 += z * z * z * z;
  }
  CHECK(std::fabs(s / n) < 4 / std::sqrt(double(n)));
  CHECK(std::fabs(s2 / n - 1) < 4 * std::sqrt(2.0 / n));
  CHECK(std::fabs(s4 / n - 3) < 4 * std::sqrt(96.0 / n));
}
