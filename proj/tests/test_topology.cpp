#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "aquascale/topology.hpp"

using namespace aquascale;

namespace {

bool same(const Point& a, double x, double y) { return std::abs(a.x - x) < 1e-12 && std::abs(a.y - y) < 1e-12; }

}  // namespace

TEST_CASE("smallest regular layouts") {
  const auto ext = build_grid(4, Density::Extended);
  const auto c = cut(ext);
  REQUIRE(c.left.size() == 2);
  CHECK(same(ext.positions[c.left[0]], 0, 1));
  CHECK(same(ext.positions[c.left[1]], 0, 2));
  CHECK(same(ext.positions[c.right[0]], 1, 1));
  CHECK(same(ext.positions[c.right[1]], 1, 2));

  const auto dense = build_grid(4, Density::Dense);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(dense.positions[i].x == doctest::Approx(ext.positions[i].x / 2));
    CHECK(dense.positions[i].y == doctest::Approx(ext.positions[i].y / 2));
  }
}

TEST_CASE("regular layout invariants") {
  for (std::size_t n : {4u, 16u, 64u, 256u, 1024u, 4096u}) {
    for (Density d : {Density::Extended, Density::Dense}) {
      const auto g = build_grid(n, d);
      const double s = d == Density::Extended ? 1.0 : 1.0 / std::sqrt(double(n));
      CHECK(g.spacing() == doctest::Approx(s));
      const auto c = cut(g);
      CHECK(c.left.size() == n / 2);
      CHECK(c.right.size() == n / 2);
      double max_src = -INFINITY, min_dst = INFINITY;
      for (auto i : c.left) max_src = std::max(max_src, g.positions[i].x);
      for (auto i : c.right) min_dst = std::min(min_dst, g.positions[i].x);
      CHECK(max_src < min_dst);
      CHECK(min_dst - max_src == doctest::Approx(s));
      if (n <= 256) {
        double dmin = INFINITY;
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = i + 1; j < n; ++j) dmin = std::min(dmin, distance(g.positions[i], g.positions[j]));
        CHECK(dmin == doctest::Approx(s));
      }
    }
  }
}

TEST_CASE("invalid regular sizes name the even-root rule") {
  for (std::size_t n : {0u, 1u, 2u, 9u, 15u, 25u}) {
    CHECK_THROWS_AS(build_grid(n, Density::Extended), std::invalid_argument);
  }
  try {
    build_grid(15, Density::Extended);
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("even root") != std::string::npos);
  }
}

TEST_CASE("random layouts") {
  const auto g = build_random(500, 3);
  const double w = std::sqrt(500.0);
  for (const auto& p : g.positions) {
    CHECK(p.x >= 0.0);
    CHECK(p.x <= w);
    CHECK(p.y >= 0.0);
    CHECK(p.y <= w);
  }
  const auto h = build_random(500, 3);
  for (std::size_t i = 0; i < 500; ++i) CHECK(same(h.positions[i], g.positions[i].x, g.positions[i].y));
  CHECK_THROWS_AS(build_random(3, 1), std::invalid_argument);
}

TEST_CASE("unit-square occupancy stays below log2 n for most seeds") {
  std::size_t passing = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed)
    passing += max_unit_square_occupancy(build_random(4096, seed)) <= 12 ? 1 : 0;
  CHECK(passing >= 95);
}

TEST_CASE("matchings") {
  CHECK(random_matching(1, 5).perm == std::vector<std::size_t>{0});
  for (std::uint64_t s = 0; s < 20; ++s) CHECK(is_bijection(random_matching(37, s)));
  CHECK_FALSE(is_bijection(SdMatching{{0, 0, 1}}));
  double fixed = 0.0;
  const int seeds = 10000;
  for (int s = 0; s < seeds; ++s) {
    const auto m = random_matching(100, s);
    for (std::size_t i = 0; i < 100; ++i) fixed += m.perm[i] == i ? 1 : 0;
  }
  CHECK(std::abs(fixed / seeds - 1.0) <= 0.1);
}

TEST_CASE("dense destination split") {
  const auto g = build_grid(256, Density::Dense);
  const auto b0 = dense_split(g, 0.0, 0.01);
  CHECK(*b0.near_width == 8);
  CHECK(b0.near_dst.size() == 128);
  CHECK(b0.far_dst.empty());
  const auto q = dense_split(g, 0.25, 0.01);
  CHECK(*q.near_width == 5);
  CHECK(q.near_width == static_cast<std::size_t>(std::ceil(std::pow(256.0, 0.26))));
  for (auto k : q.near_dst) CHECK(g.cut_offset(k) <= 5);
  for (auto k : q.far_dst) CHECK(g.cut_offset(k) > 5);
  CHECK(q.near_dst.size() + q.far_dst.size() == 128);
  const auto b1 = dense_split(g, 1.0, 0.01);
  CHECK(*b1.near_width == 0);
  CHECK(b1.near_dst.empty());

  for (std::size_t n : {64u, 1024u, 4096u}) {
    std::size_t prev = n;
    for (double beta = 0.0; beta <= 1.5; beta += 0.05) {
      const std::size_t w = split_width(n, beta, 0.01);
      CHECK(w <= prev);
      CHECK(w <= std::size_t(std::sqrt(double(n))) / 2);
      prev = w;
    }
  }
}

TEST_CASE("vertex displacement") {
  const double cbar = 0.2;
  const auto g = build_random(1024, 8);
  const auto v = displace_to_vertices(g, cbar);
  const double cut_x = v.cut_x;
  std::size_t kept = 0;
  for (const auto& s : v.sites) {
    CHECK(s.multiplicity <= s.occupancy);
    kept += s.multiplicity;
  }
  CHECK(kept + v.removed == g.n);
  for (std::size_t i = 0; i < g.n; ++i) {
    const auto& p = g.positions[i];
    if (!v.moved[i]) {
      CHECK(p.x >= cut_x);
      CHECK(p.x < cut_x + cbar);
      continue;
    }
    const Point& m = *v.moved[i];
    // Horizontal offset to the cut never grows; right-side nodes stay outside the empty zone.
    CHECK(std::abs(m.x - cut_x) <= std::abs(p.x - cut_x) + 1e-12);
    CHECK(std::abs(m.x - p.x) <= 1.0 + 1e-12);
    CHECK(std::abs(m.y - p.y) <= 1.0 + 1e-12);
    if (p.x >= cut_x) CHECK(m.x >= cut_x + cbar - 1e-12);
  }
  CHECK_THROWS_AS(displace_to_vertices(g, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(displace_to_vertices(g, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(displace_to_vertices(build_grid(16, Density::Extended), 0.1), std::invalid_argument);
}

TEST_CASE("grid csv round trip") {
  const auto g = build_random(50, 4);
  std::stringstream ss;
  write_grid_csv(ss, g);
  CHECK(ss.str().rfind("node_id,x,y\n", 0) == 0);
  const auto h = read_grid_csv(ss, Density::Random);
  REQUIRE(h.n == 50);
  for (std::size_t i = 0; i < 50; ++i) CHECK(same(h.positions[i], g.positions[i].x, g.positions[i].y));
}
