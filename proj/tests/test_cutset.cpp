#include "doctest.h"

#include <cmath>
#include <numbers>
#include <numeric>

#include "aquascale/covariance_check.hpp"
#include "aquascale/cutset.hpp"

using namespace aquascale;

namespace {

PhysicalParams unit_params(double alpha) {
  PhysicalParams p;
  p.alpha = alpha;
  p.c0 = 1.0;
  p.tx_power = 1.0;
  return p;
}

// Direct double loop over every left-half source.
double brute_received(const NodeGrid& g, const CutPartition& c, double a, std::size_t k, const PhysicalParams& p) {
  double s = 0.0;
  for (auto i : c.left) {
    const double r = distance(g.positions[i], g.positions[k]);
    s += p.tx_power / (p.c0 * std::pow(r, p.alpha) * std::pow(a, r));
  }
  return s;
}

}  // namespace

TEST_CASE("received power, hand-summed n = 16 example") {
  const auto p = unit_params(1.0);
  const auto g = build_grid(16, Density::Extended);
  const auto c = cut(g);
  const auto ch = fixed_state(2.0, 1.0, 10.0);
  const std::size_t k = g.id(2, 0);  // first destination column, bottom row
  double hand = 0.0;
  for (double r : {1.0, std::sqrt(2.0), std::sqrt(5.0), std::sqrt(10.0), 2.0, std::sqrt(5.0), std::sqrt(8.0),
                   std::sqrt(13.0)})
    hand += 1.0 / (r * std::pow(2.0, r));
  CHECK(received_power_exact(g, c, ch, k, p) == doctest::Approx(1.188).epsilon(1e-3));
  CHECK(received_power_exact(g, c, ch, k, p) == doctest::Approx(hand).epsilon(1e-13));
  CHECK(received_power_exact(g, c, ch, k, p) > received_power_exact(g, c, ch, g.id(3, 0), p));
  CHECK_THROWS_AS(received_power_exact(g, c, ch, g.id(0, 0), p), std::domain_error);
}

TEST_CASE("per-offset kernel agrees with the direct sum") {
  for (double alpha : {1.0, 1.5, 2.0})
    for (Density d : {Density::Extended, Density::Dense}) {
      const auto p = unit_params(alpha);
      const auto g = build_grid(64, d);
      const auto c = cut(g);
      const auto ch = fixed_state(1.7, 1.0, 10.0);
      const auto logs = log_received_power_by_node(g, c, ch, p);
      for (auto k : c.right) {
        const double direct = brute_received(g, c, 1.7, k, p);
        CHECK(std::exp(logs[k]) == doctest::Approx(direct).epsilon(1e-11));
        CHECK(std::isfinite(logs[k]));
      }
      for (auto k : c.left) CHECK(std::isnan(logs[k]));
    }
}

TEST_CASE("ring constant fitted on the 64-node lattice") {
  CHECK(fit_ring_constant(64) == doctest::Approx(7.0 / 3.0).epsilon(1e-12));
  CHECK(BoundConstants{}.ring == doctest::Approx(fit_ring_constant(64)));
}

TEST_CASE("extended transfer bound dominates the exact sum") {
  const double ring = fit_ring_constant(64);
  for (std::size_t n : {64u, 256u, 1024u})
    for (double alpha : {1.0, 1.5, 2.0})
      for (double a : {1.2, 2.0}) {
        const auto p = unit_params(alpha);
        const auto g = build_grid(n, Density::Extended);
        const auto c = cut(g);
        const auto ch = fixed_state(a, 1.0, 10.0);
        const auto logs = log_received_power_by_node(g, c, ch, p);
        for (auto k : c.right) REQUIRE(logs[k] <= log_received_power_upper_extended(g.cut_offset(k), ch, p, ring) + 1e-12);
      }
  const auto p = unit_params(1.0);
  const auto ch = fixed_state(2.0, 1.0, 10.0);
  for (std::size_t kx = 1; kx < 10; ++kx)
    CHECK(received_power_upper_extended(kx + 1, ch, p, 1.0) <= 0.5 * received_power_upper_extended(kx, ch, p, 1.0) + 1e-15);
}

TEST_CASE("exact cut-set sum and its closed form") {
  const auto p = unit_params(1.5);
  const auto g = build_grid(64, Density::Extended);
  const auto c = cut(g);
  const auto ch = fixed_state(2.0, 3.0, 10.0);
  double total = 0.0;
  for (auto k : c.right) total += brute_received(g, c, 2.0, k, p);
  const auto pair = cutset_upper_extended(g, c, ch, p, 1.0);
  CHECK(pair.exact.value == doctest::Approx(std::numbers::log2e * total / 3.0).epsilon(1e-11));
  CHECK(pair.exact.kind == BoundKind::ExactSnrSum);
  CHECK(pair.closed.value == doctest::Approx(8.0 / (2.0 * 3.0)).epsilon(1e-12));
  CHECK(pair.closed.kind == BoundKind::ClosedFormUpper);

  // Doubling the absorption at alpha = 1 cuts the exact sum by at least the absorption ratio.
  const auto p1 = unit_params(1.0);
  const auto e2 = cutset_upper_extended(g, c, fixed_state(2.0, 1.0, 10.0), p1).exact.value;
  const auto e4 = cutset_upper_extended(g, c, fixed_state(4.0, 1.0, 10.0), p1).exact.value;
  CHECK(e2 / e4 >= 2.0);
}

TEST_CASE("single-destination cut-set and Hadamard form") {
  const auto p = unit_params(1.0);
  const auto g = build_grid(4, Density::Extended);
  const auto c = cut(g);
  // Noise chosen so that the summed SNR at the destination is exactly 1.
  const std::size_t k = c.right[0];
  const double pl = brute_received(g, c, 2.0, k, p);
  const auto ch = fixed_state(2.0, pl, 10.0);
  CHECK(miso_hadamard_bound(g, c, ch, {k}, p) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(miso_hadamard_bound(g, c, ch, {}, p) == 0.0);
}

TEST_CASE("Hadamard bound never exceeds the total-SNR bound") {
  for (double a : {1.05, 1.3, 2.0, 8.0})
    for (double noise : {1e-3, 1.0, 1e3}) {
      const auto p = unit_params(1.5);
      const auto g = build_grid(64, Density::Extended);
      const auto c = cut(g);
      const auto ch = fixed_state(a, noise, 10.0);
      CHECK(miso_hadamard_bound(g, c, ch, c.right, p) <= cutset_upper_extended(g, c, ch, p).exact.value * (1 + 1e-12));
    }
}

TEST_CASE("regime classification") {
  CHECK(classify_regime(0.0) == Regime::Bandwidth);
  CHECK(classify_regime(0.3) == Regime::BandwidthAndPower);
  CHECK(classify_regime(0.5) == Regime::BandwidthAndPower);
  CHECK(classify_regime(0.8) == Regime::Power);
  CHECK(to_string(Regime::Power) == "power");
  CHECK(bound_kind_from_string(to_string(BoundKind::HybridDenseUpper)) == BoundKind::HybridDenseUpper);
  CHECK_THROWS_AS(bound_kind_from_string("nope"), std::invalid_argument);
}

TEST_CASE("dense hybrid bound parts") {
  PhysicalParams p;
  const double eps0 = std::expm1(50.0);
  const auto g = build_grid(256, Density::Dense);
  const auto s0 = dense_split(g, 0.0, 0.01);
  const auto d0 = cutset_upper_dense(g, s0, regime_state(256, 0.0, eps0, p), 0.0, 0.01, p);
  CHECK(std::isinf(d0.log_far_term));
  CHECK(d0.hybrid.value == doctest::Approx(d0.near_term).epsilon(1e-14));
  CHECK(d0.hybrid.regime == Regime::Bandwidth);
  const auto s1 = dense_split(g, 1.0, 0.01);
  const auto d_hi = cutset_upper_dense(g, s1, regime_state(256, 1.0, eps0, p), 1.0, 0.01, p);
  CHECK(d_hi.near_term == 0.0);
  CHECK(d_hi.hybrid.regime == Regime::Power);
  CHECK_THROWS_AS(cutset_upper_dense(g, cut(g), regime_state(256, 1.0, eps0, p), 1.0, 0.01, p), std::invalid_argument);
}

TEST_CASE("dense sandwich after calibration") {
  PhysicalParams p;
  const double eps0 = std::expm1(50.0), eps = 0.01, ring = fit_ring_constant(64);
  const std::vector<std::size_t> ns{64, 256, 1024};
  for (double beta : {0.0, 0.25, 0.75}) {
    const auto cal = calibrate_dense_lower(ns, p, beta, eps0, eps);
    for (auto n : ns) {
      const auto g = build_grid(n, Density::Dense);
      const auto c = cut(g);
      const auto logs = log_received_power_by_node(g, c, regime_state(n, beta, eps0, p), p);
      for (auto k : c.right) {
        if (g.row(k) != 0) continue;
        const auto b = received_power_bounds_dense(g.cut_offset(k), n, p, beta, eps0, eps, ring, cal);
        REQUIRE(logs[k] <= b.log_upper + 1e-9);
        if (!std::isnan(b.log_lower)) REQUIRE(b.log_lower <= logs[k] + 1e-9);
      }
    }
  }
  CHECK_THROWS_AS(received_power_bounds_dense(0, 64, p, 0.0, eps0, eps, ring, {}), std::domain_error);
}

TEST_CASE("covariance feasibility and capacity ordering") {
  PhysicalParams p;
  p.tx_power = 10.0;
  const auto ch = fixed_state(1.3, 1.0, 10.0);
  const auto mimo = build_cut_mimo(8, ch, p);
  CHECK(mimo.magnitude.rows() == 4);
  CHECK(mimo.magnitude.cols() == 4);
  const auto hs = draw_channels(mimo, 500, 3);
  const Eigen::MatrixXcd id = p.tx_power * Eigen::MatrixXcd::Identity(4, 4);
  const auto base = logdet_samples(hs, id, mimo.noise);
  const auto again = logdet_samples(hs, id, mimo.noise);
  CHECK(base == again);  // identity against itself: zero gap

  Philox rng(4);
  for (int t = 0; t < 20; ++t) {
    const auto q = random_feasible_covariance(4, p.tx_power, rng);
    REQUIRE(is_feasible_covariance(q, p.tx_power));
    const auto full = logdet_samples(hs, q, mimo.noise);
    const auto half = logdet_samples(hs, Eigen::MatrixXcd(0.5 * q), mimo.noise);
    const double mf = std::accumulate(full.begin(), full.end(), 0.0) / full.size();
    const double mh = std::accumulate(half.begin(), half.end(), 0.0) / half.size();
    CHECK(mh < mf);
  }
  CHECK_FALSE(is_feasible_covariance(2.0 * id, p.tx_power));
}

TEST_CASE("random covariances do not beat the scaled identity") {
  const auto p = PhysicalParams{};
  const auto res = diagonal_covariance_check(8, empirical_state(10.0, p), 50, 2000, 1, p);
  CHECK(res.num_q == 50);
  CHECK(res.pass);
  CHECK(res.worst_z <= 2.0);
}
