#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <vector>

#include "aquascale/rng.hpp"

using aquascale::Philox;

TEST_CASE("philox known-answer vectors") {
  using A4 = std::array<std::uint32_t, 4>;
  CHECK(Philox::block({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(Philox::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        A4{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(Philox::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        A4{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("first draws of seed 0 stream 0 are the zero-counter block") {
  Philox g(0, 0);
  CHECK(g() == 0x6627e8d5u);
  CHECK(g() == 0xe169c58du);
  CHECK(g() == 0xbc57ac4cu);
  CHECK(g() == 0x9b00dbd8u);
}

TEST_CASE("same seed and stream reproduce; different streams differ") {
  Philox a(42, 3), b(42, 3), c(42, 4);
  bool any_diff = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    any_diff = any_diff || (x != c.next_u64());
  }
  CHECK(any_diff);
}

TEST_CASE("uniform01 and normal moments") {
  Philox g(7);
  const int m = 200000;
  double su = 0, sn = 0, sn2 = 0;
  for (int i = 0; i < m; ++i) {
    const double u = g.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    su += u;
    const double z = g.normal();
    sn += z;
    sn2 += z * z;
  }
  CHECK(su / m == doctest::Approx(0.5).epsilon(0.01));
  CHECK(std::abs(sn / m) < 0.01);
  CHECK(sn2 / m == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("below stays in range and hits every value") {
  Philox g(9);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) ++hits[g.below(7)];
  for (int h : hits) CHECK(h > 800);
  CHECK(g.below(1) == 0);
}

TEST_CASE("shuffle yields a permutation") {
  Philox g(5);
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  aquascale::shuffle(v, g);
  auto s = v;
  std::sort(s.begin(), s.end());
  for (int i = 0; i < 50; ++i) CHECK(s[i] == i);
}
