#include "doctest.h"

#include <cmath>
#include <numeric>

#include "json.hpp"

#include "aquascale/routing.hpp"

using namespace aquascale;

namespace {

PhysicalParams unit_params(double alpha) {
  PhysicalParams p;
  p.alpha = alpha;
  p.c0 = 1.0;
  p.tx_power = 1.0;
  return p;
}

SdMatching identity_except(std::size_t n, std::size_t a, std::size_t b) {
  SdMatching m;
  m.perm.resize(n);
  std::iota(m.perm.begin(), m.perm.end(), 0);
  std::swap(m.perm[a], m.perm[b]);
  return m;
}

}  // namespace

TEST_CASE("transmit power rules") {
  PhysicalParams p;
  const auto ch = empirical_state(10.0, p);
  CHECK(tx_power(MhMode::ExtendedFullPower, 4096, ch, p) == doctest::Approx(p.tx_power).epsilon(1e-14));
  CHECK(tx_power(MhMode::RandomLogCells, 4096, ch, p) == doctest::Approx(p.tx_power).epsilon(1e-14));
  // Noise large enough that the min clamps at full power.
  const ChannelState loud{10.0, ch.log_a, 1e9};
  CHECK(tx_power(MhMode::DenseScaledPower, 256, loud, p) == doctest::Approx(p.tx_power));
  p.alpha = 2.0;
  p.tx_power = 1.0;
  const ChannelState flat{10.0, 0.0, 1.0};
  CHECK(tx_power(MhMode::DenseScaledPower, 256, flat, p) == doctest::Approx(1.0 / 256.0).epsilon(1e-14));
}

TEST_CASE("mode and config validation") {
  CHECK(mh_mode_from_string("dense") == MhMode::DenseScaledPower);
  CHECK(to_string(MhMode::RandomLogCells) == "random");
  CHECK_THROWS_AS(mh_mode_from_string("x"), std::invalid_argument);
  MhConfig c;
  CHECK(c.reuse_period() == 3);
  c.tdma_reuse = 8;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.delta = 1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("lattice routes") {
  const auto g = build_grid(64, Density::Extended);
  const auto t = make_tiling(g);
  const auto occ = cell_occupants(g, t);
  const auto r = build_route(g.id(1, 3), g.id(6, 3), g, t, occ);
  CHECK(r.hops() == 5);
  for (double d : r.hop_distances) CHECK(d == doctest::Approx(1.0));
  CHECK(build_route(g.id(4, 4), g.id(4, 5), g, t, occ).hops() == 1);
  CHECK_THROWS_AS(build_route(3, 3, g, t, occ), std::invalid_argument);

  const auto path = lattice_cell_path(0, 0, 2, 2);
  REQUIRE(path.size() == 5);
  CHECK(path[1] == std::pair<long, long>{1, 0});  // corner crossing: x step first
  for (std::size_t i = 1; i < path.size(); ++i)
    CHECK(std::abs(path[i].first - path[i - 1].first) + std::abs(path[i].second - path[i - 1].second) == 1);
}

TEST_CASE("hop counts stay within the supercover bound") {
  Philox rng(17);
  for (Density d : {Density::Extended, Density::Dense}) {
    const auto g = build_grid(1024, d);
    const auto t = make_tiling(g);
    const auto occ = cell_occupants(g, t);
    for (int i = 0; i < 1000; ++i) {
      const auto s = rng.below(1024), e = rng.below(1024);
      if (s == e) continue;
      const auto r = build_route(s, e, g, t, occ);
      const double span = distance(g.positions[s], g.positions[e]) / g.spacing();
      REQUIRE(r.hops() <= std::ceil(std::sqrt(2.0) * span) + 2);
      REQUIRE(r.nodes.front() == s);
      REQUIRE(r.nodes.back() == e);
      for (double h : r.hop_distances) REQUIRE(h <= std::sqrt(2.0) * g.spacing() + 1e-12);
    }
  }
  const auto g = build_random(4096, 2);
  const auto t = make_tiling(g);
  CHECK(t.side >= random_cell_side(4096) - 1e-12);
  CHECK(random_cell_side(4096) == doctest::Approx(std::sqrt(24.0)));
  const auto occ = cell_occupants(g, t);
  std::size_t routed = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto s = rng.below(4096), e = rng.below(4096);
    if (s == e) continue;
    try {
      const auto r = build_route(s, e, g, t, occ);
      ++routed;
      REQUIRE(r.hops() <= std::ceil(std::sqrt(2.0) * distance(g.positions[s], g.positions[e]) / t.side) + 2);
      for (std::size_t h = 1; h < r.cells.size(); ++h) {
        const auto [ax, ay] = t.coords(r.cells[h - 1]);
        const auto [bx, by] = t.coords(r.cells[h]);
        REQUIRE(std::abs(long(ax) - long(bx)) + std::abs(long(ay) - long(by)) == 1);
      }
      for (double h : r.hop_distances) REQUIRE(h <= std::sqrt(5.0) * t.side + 1e-9);
    } catch (const std::runtime_error&) {
    }
  }
  CHECK(routed > 900);
}

TEST_CASE("exact interference") {
  const auto p = unit_params(1.5);
  const auto g = build_grid(16, Density::Extended);
  const auto ch = fixed_state(2.0, 1.0, 10.0);
  CHECK(interference_exact(g, {}, 0, ch, 0.0, p) == 0.0);
  CHECK(interference_exact(g, {1}, 0, ch, 0.0, p) == doctest::Approx(0.5).epsilon(1e-14));
  const double two = interference_exact(g, {1, 4}, 0, ch, 0.0, p);
  CHECK(two == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(interference_exact(g, {0}, 0, ch, 0.0, p), std::invalid_argument);
}

TEST_CASE("layer constant and extended interference bound") {
  CHECK(fit_layer_constant(64, 9) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  const BoundConstants c;
  PhysicalParams p;
  p.alpha = 1.5;
  const auto g = build_grid(4096, Density::Extended);
  for (double a : {1.1, 1.5, 2.0, 4.0}) {
    const auto ch = fixed_state(a, 1.0, 10.0);
    const double exact = max_log_interference_grid(g, ch, std::log(p.tx_power), 9, p);
    CHECK(exact <= log_interference_upper_extended(ch, p, c));
  }
  // independent of alpha, vanishing as absorption grows
  auto q = p;
  q.alpha = 1.0;
  const auto ch = fixed_state(2.0, 1.0, 10.0);
  CHECK(log_interference_upper_extended(ch, p, c) == log_interference_upper_extended(ch, q, c));
  CHECK(interference_upper_extended(fixed_state(1e9, 1.0, 10.0), p, c) < 1e-6 * interference_upper_extended(ch, p, c));
  CHECK_THROWS_AS(log_interference_upper_extended(fixed_state(1.05, 1.0, 10.0), p, c), std::domain_error);
}

TEST_CASE("dense interference bound dominates on small grids") {
  PhysicalParams p;
  const BoundConstants c;
  const double eps0 = std::expm1(50.0);
  for (double alpha : {1.0, 2.0}) {
    p.alpha = alpha;
    for (double beta : {0.0, 0.5, 1.0})
      for (std::size_t n : {64u, 256u}) {
        const auto g = build_grid(n, Density::Dense);
        const auto ch = regime_state(n, beta, eps0, p);
        const double exact = max_log_interference_grid(g, ch, log_tx_power(MhMode::DenseScaledPower, n, ch, p), 9, p);
        CHECK(exact <= log_interference_upper_dense(n, beta, eps0, p, c));
      }
  }
}

TEST_CASE("per-hop rate") {
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(per_hop_rate(std::log(5.0), -inf, 5.0) == doctest::Approx(1.0).epsilon(1e-14));
  double prev = inf;
  for (double pi : {0.0, 0.1, 1.0, 10.0, 100.0}) {
    const double r = per_hop_rate(0.0, std::log(pi), 1.0);
    CHECK(r < prev);
    prev = r;
  }
  // log form stays finite where the rate underflows
  CHECK(std::isfinite(log_per_hop_rate(-800.0, -inf, 1.0)));
  CHECK(log_per_hop_rate(-800.0, -inf, 1.0) == doctest::Approx(-800.0 - std::log(std::log(2.0))).epsilon(1e-12));
}

TEST_CASE("one swapped pair across a single hop") {
  const auto p = unit_params(1.5);
  const auto g = build_grid(4, Density::Extended);
  const auto ch = fixed_state(2.0, 0.25, 10.0);
  const auto rep = mh_throughput(g, identity_except(4, 0, 1), ch, MhConfig{}, p);
  const double inf = std::numeric_limits<double>::infinity();
  const double rate = per_hop_rate(-log_attenuation(1.0, ch.log_a, p), -inf, ch.noise);
  CHECK(rep.active_pairs == 2);
  CHECK(rep.max_cell_load == 1);
  CHECK(rep.failures.empty());
  CHECK(rep.min_hop_rate == doctest::Approx(rate).epsilon(1e-13));
  // each pair gets its hop rate over one TDMA frame
  CHECK(rep.simulated.value / rep.active_pairs == doctest::Approx(rate / 9.0).epsilon(1e-13));
}

TEST_CASE("throughput accounting and determinism") {
  PhysicalParams p;
  const auto g = build_grid(256, Density::Extended);
  const auto m = random_matching(256, 4);
  const auto ch = empirical_state(10.0, p);
  const auto a = mh_throughput(g, m, ch, MhConfig{}, p);
  const auto b = mh_throughput(g, m, ch, MhConfig{}, p);
  CHECK(a.simulated.log_value == b.simulated.log_value);
  CHECK(mh_report_json(a) == mh_report_json(b));
  std::size_t hops = 0;
  for (const auto& r : a.routes) hops += r.hops();
  CHECK(std::accumulate(a.cell_load.begin(), a.cell_load.end(), std::size_t{0}) == hops);
  for (auto load : a.cell_load) CHECK(double(load) / double(a.max_cell_load) <= 1.0);
  CHECK(a.simulated.kind == BoundKind::MhLower);
  CHECK_THROWS_AS(mh_throughput(build_grid(256, Density::Dense), m, ch, MhConfig{}, p), std::invalid_argument);

  const auto j = nlohmann::json::parse(mh_report_json(a));
  for (const char* key : {"n", "mode", "f_khz", "beta", "simulated_T", "closed_form_T", "ratio", "min_hop_rate",
                          "max_cell_load", "failures"})
    CHECK(j.contains(key));
}

TEST_CASE("extended per-hop SINR scales with absorption times noise") {
  PhysicalParams p;
  const auto g = build_grid(256, Density::Extended);
  const auto m = random_matching(256, 1);
  double lo = INFINITY, hi = 0.0;
  for (double f : {5.0, 10.0, 20.0, 30.0}) {
    const auto ch = empirical_state(f, p);
    const auto rep = mh_throughput(g, m, ch, MhConfig{}, p);
    const double scaled = rep.log_min_hop_rate + ch.log_a + std::log(ch.noise);
    lo = std::min(lo, scaled);
    hi = std::max(hi, scaled);
  }
  CHECK(std::isfinite(lo));
  CHECK(hi - lo < std::log(1e6));
}

TEST_CASE("random-mode simulation") {
  PhysicalParams p;
  const auto g = build_random(1024, 3);
  const auto m = random_matching(1024, 3);
  MhConfig c;
  c.mode = MhMode::RandomLogCells;
  const auto ch = fixed_state(2.0, noise_psd(10.0, p), 10.0);
  const auto a = mh_throughput_random(g, m, ch, c, p);
  const auto b = mh_throughput_random(g, m, ch, c, p);
  CHECK(a.simulated.kind == BoundKind::MhRandomLower);
  CHECK(a.simulated.log_value == b.simulated.log_value);
  CHECK(a.active_pairs + a.failures.size() <= 1024);
  CHECK_THROWS_AS(mh_throughput_random(build_grid(1024, Density::Extended), m, ch, c, p), std::invalid_argument);
}
