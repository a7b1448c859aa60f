#include "aquascale/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <sstream>

#include "aquascale/covariance_check.hpp"
#include "aquascale/numeric.hpp"

namespace aquascale {

namespace {

CheckResult timed(int id, const std::string& name, double limit, const std::function<bool(CheckResult&)>& body) {
  CheckResult r;
  r.id = id;
  r.name = name;
  r.time_limit = limit;
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = false;
  try {
    ok = body(r);
  } catch (const std::exception& e) {
    r.summary = std::string("error: ") + e.what();
    r.measured["error"] = e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.pass = ok && (limit <= 0.0 || r.seconds < limit);
  return r;
}

std::string fmt(double v, int prec = 4) {
  std::ostringstream s;
  s << std::setprecision(prec) << v;
  return s.str();
}

bool strictly_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) return false;
  return !v.empty();
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return !v.empty();
}

PhysicalParams with_alpha(PhysicalParams p, double alpha) {
  p.alpha = alpha;
  return p;
}

}  // namespace

CheckResult check_gain_propriety(const Config& cfg) {
  return timed(1, "gain_propriety", 1.0, [&](CheckResult& r) {
    const auto& p = cfg.model.phys;
    const double f = p.f_ref_khz;
    Philox rng(cfg.seed, 101);
    const auto est = pseudocovariance_estimate(1.0, f, cfg.harness.propriety_samples, p, rng);
    const double scaled = std::abs(est) * attenuation(1.0, f, p);
    r.measured["samples"] = cfg.harness.propriety_samples;
    r.measured["scaled_pseudocovariance"] = scaled;
    r.measured["limit"] = 0.01;
    r.summary = "|pseudo-covariance| * A = " + fmt(scaled) + " (limit 0.01)";
    return scaled <= 0.01;
  });
}

CheckResult check_diagonal_covariance(const Config& cfg) {
  return timed(2, "diagonal_covariance", 120.0, [&](CheckResult& r) {
    const auto& p = cfg.model.phys;
    const auto& h = cfg.harness;
    const CovarianceCheck c = diagonal_covariance_check(h.covariance_n_small, empirical_state(p.f_ref_khz, p),
                                                        h.covariance_random_q, h.covariance_draws, cfg.seed, p);
    r.measured["n_small"] = h.covariance_n_small;
    r.measured["random_q"] = c.num_q;
    r.measured["phase_draws"] = h.covariance_draws;
    r.measured["capacity_identity_bits"] = c.capacity_identity;
    r.measured["max_gap_bits"] = c.gap;
    r.measured["gap_standard_error"] = c.gap_standard_error;
    r.measured["worst_z"] = c.worst_z;
    r.measured["resampled"] = c.resampled;
    r.summary = "max C(Q) - C(P I) = " + fmt(c.gap) + " bits, worst z = " + fmt(c.worst_z) + " (limit 2)";
    return c.pass;
  });
}

CheckResult check_extended_transfer_bound(const Config& cfg) {
  return timed(3, "extended_transfer_bound", 60.0, [&](CheckResult& r) {
    const double ring = fit_ring_constant(64);
    const auto& base = cfg.model.phys;
    const double noise = noise_psd(base.f_ref_khz, base);
    double worst = -std::numeric_limits<double>::infinity();
    std::size_t points = 0;
    for (auto n : cfg.harness.n_sweep) {
      const NodeGrid g = build_grid(n, Density::Extended);
      const CutPartition c = cut(g);
      for (double alpha : {1.0, 1.5, 2.0})
        for (double a : {1.2, 2.0}) {
          const PhysicalParams p = with_alpha(base, alpha);
          const ChannelState ch = fixed_state(a, noise, base.f_ref_khz);
          const auto logpl = log_received_power_by_node(g, c, ch, p);
          for (auto k : c.right) {
            worst = std::max(worst, logpl[k] - log_received_power_upper_extended(g.cut_offset(k), ch, p, ring));
            ++points;
          }
        }
    }
    r.measured["ring_constant"] = ring;
    r.measured["points"] = points;
    r.measured["max_log_exact_over_bound"] = worst;
    r.summary = "ring constant " + fmt(ring) + ", max ln(exact/bound) = " + fmt(worst) + " over " +
                std::to_string(points) + " destinations";
    return worst <= cfg.harness.log_tolerance;
  });
}

CheckResult check_dense_transfer_sandwich(const Config& cfg) {
  return timed(4, "dense_transfer_sandwich", 120.0, [&](CheckResult& r) {
    const double ring = fit_ring_constant(64);
    const auto& m = cfg.model;
    double worst_upper = -std::numeric_limits<double>::infinity();
    double worst_lower = -std::numeric_limits<double>::infinity();
    std::size_t points = 0, unchecked_lower = 0;
    auto cases = nlohmann::ordered_json::array();
    for (double alpha : {1.0, 1.5, 2.0})
      for (double beta : {0.0, 0.25, 0.75}) {
        const PhysicalParams p = with_alpha(m.phys, alpha);
        const DenseLowerCalibration cal = calibrate_dense_lower(cfg.harness.n_sweep, p, beta, m.eps0, m.eps);
        double cu = -std::numeric_limits<double>::infinity(), cl = cu;
        for (auto n : cfg.harness.n_sweep) {
          const NodeGrid g = build_grid(n, Density::Dense);
          const CutPartition c = cut(g);
          const auto logpl = log_received_power_by_node(g, c, regime_state(n, beta, m.eps0, p), p);
          for (auto k : c.right) {
            const auto b = received_power_bounds_dense(g.cut_offset(k), n, p, beta, m.eps0, m.eps, ring, cal);
            cu = std::max(cu, logpl[k] - b.log_upper);
            if (std::isnan(b.log_lower))
              ++unchecked_lower;
            else
              cl = std::max(cl, b.log_lower - logpl[k]);
            ++points;
          }
        }
        worst_upper = std::max(worst_upper, cu);
        worst_lower = std::max(worst_lower, cl);
        nlohmann::ordered_json j;
        j["alpha"] = alpha;
        j["beta"] = beta;
        j["calibration_n_near"] = cal.n_near;
        j["calibration_n_far"] = cal.n_far;
        j["max_log_exact_over_upper"] = cu;
        j["max_log_lower_over_exact"] = cl;
        cases.push_back(j);
      }
    r.measured["cases"] = cases;
    r.measured["points"] = points;
    r.measured["lower_uncalibrated_points"] = unchecked_lower;
    r.summary = "max ln(exact/upper) = " + fmt(worst_upper) + ", max ln(lower/exact) = " + fmt(worst_lower) + " over " +
                std::to_string(points) + " destinations";
    return worst_upper <= cfg.harness.log_tolerance && worst_lower <= cfg.harness.log_tolerance && unchecked_lower == 0;
  });
}

CheckResult check_extended_cutset_order(const Config& cfg) {
  return timed(5, "extended_cutset_order", 0.0, [&](CheckResult& r) {
    const auto& p = cfg.model.phys;
    const ChannelState ch = empirical_state(p.f_ref_khz, p);
    std::vector<double> logs;
    auto per_n = nlohmann::ordered_json::array();
    for (auto n : cfg.harness.n_sweep) {
      const NodeGrid g = build_grid(n, Density::Extended);
      const CutsetPair cs = cutset_upper_extended(g, cut(g), ch, p, 1.0);
      logs.push_back(cs.exact.log_value - cs.closed.log_value);
      per_n.push_back({{"n", n}, {"ratio", std::exp(logs.back())}});
    }
    const double band = std::exp(*std::max_element(logs.begin(), logs.end()) - *std::min_element(logs.begin(), logs.end()));
    r.measured["f_khz"] = p.f_ref_khz;
    r.measured["exact_over_closed"] = per_n;
    r.measured["band"] = band;
    r.measured["limit"] = cfg.harness.cutset_order_band;
    r.summary = "exact / (sqrt(n)/(a N)) spans a factor " + fmt(band) + " (limit " + fmt(cfg.harness.cutset_order_band) + ")";
    return band <= cfg.harness.cutset_order_band;
  });
}

CheckResult check_dense_cutset_exponents(const Config& cfg) {
  return timed(6, "dense_cutset_exponents", 0.0, [&](CheckResult& r) {
    SweepSpec s;
    s.density = Density::Dense;
    s.n_list = cfg.harness.n_sweep_large;
    s.beta_list = {0.0, 0.25, 0.75};
    s.alpha_list = {cfg.model.phys.alpha};
    s.f_mode = FrequencyMode::Regime;
    s.seeds = {cfg.seed};
    s.kinds = {BoundKind::HybridDenseUpper};
    const SweepTable t = run_sweep(s, cfg.model);
    const double a = cfg.model.phys.alpha, tol = cfg.harness.slope_tol;
    const FitResult f0 = fit_exponent(t, BoundKind::HybridDenseUpper, 0.0, a, FitAxis::LogN);
    const FitResult f1 = fit_exponent(t, BoundKind::HybridDenseUpper, 0.25, a, FitAxis::LogN);
    const FitResult f2 = fit_exponent(t, BoundKind::HybridDenseUpper, 0.75, a, FitAxis::RegimeExponent);
    r.measured["slope_beta_0"] = f0.slope;
    r.measured["slope_beta_0.25"] = f1.slope;
    r.measured["exp_slope_beta_0.75"] = f2.slope;
    r.measured["exp_r_squared_beta_0.75"] = f2.r_squared;
    r.summary = "slopes " + fmt(f0.slope) + " (beta 0), " + fmt(f1.slope) + " (beta 0.25); beta 0.75 slope " +
                fmt(f2.slope) + " with r^2 " + fmt(f2.r_squared, 6);
    return std::abs(f0.slope - 1.0) <= tol && std::abs(f1.slope - 0.75) <= tol && f2.slope < 0.0 &&
           f2.r_squared >= 0.95;
  });
}

CheckResult check_interference_bounds(const Config& cfg) {
  return timed(7, "interference_bounds", 0.0, [&](CheckResult& r) {
    const auto& m = cfg.model;
    BoundConstants consts = m.constants;
    consts.layer = fit_layer_constant(64, m.mh.tdma_reuse);
    const double noise = noise_psd(m.phys.f_ref_khz, m.phys);
    double worst_ext = -std::numeric_limits<double>::infinity();
    for (double a : {1.1, 1.5, 2.0, 4.0})
      for (auto n : cfg.harness.n_sweep) {
        const ChannelState ch = fixed_state(a, noise, m.phys.f_ref_khz);
        const double exact = max_log_interference_grid(build_grid(n, Density::Extended), ch,
                                                       log_tx_power(MhMode::ExtendedFullPower, n, ch, m.phys),
                                                       m.mh.tdma_reuse, m.phys);
        worst_ext = std::max(worst_ext, exact - log_interference_upper_extended(ch, m.phys, consts));
      }
    double worst_dense = -std::numeric_limits<double>::infinity();
    auto cases = nlohmann::ordered_json::array();
    for (double alpha : {1.0, 1.5, 2.0})
      for (double beta : {0.0, 0.25, 0.5, 1.0}) {
        const PhysicalParams p = with_alpha(m.phys, alpha);
        double w = -std::numeric_limits<double>::infinity();
        for (auto n : cfg.harness.n_sweep) {
          const ChannelState ch = regime_state(n, beta, m.eps0, p);
          const double exact = max_log_interference_grid(build_grid(n, Density::Dense), ch,
                                                         log_tx_power(MhMode::DenseScaledPower, n, ch, p),
                                                         m.mh.tdma_reuse, p);
          w = std::max(w, exact - log_interference_upper_dense(n, beta, m.eps0, p, consts));
        }
        worst_dense = std::max(worst_dense, w);
        cases.push_back({{"alpha", alpha}, {"beta", beta}, {"max_log_exact_over_bound", w}});
      }
    r.measured["layer_constant"] = consts.layer;
    r.measured["max_log_exact_over_bound_extended"] = worst_ext;
    r.measured["dense_cases"] = cases;
    r.summary = "layer constant " + fmt(consts.layer) + ", max ln(exact/bound) " + fmt(worst_ext) + " (extended), " +
                fmt(worst_dense) + " (dense)";
    return worst_ext <= cfg.harness.log_tolerance && worst_dense <= cfg.harness.log_tolerance;
  });
}

CheckResult check_extended_mh_optimality(const Config& cfg) {
  return timed(8, "extended_mh_optimality", 0.0, [&](CheckResult& r) {
    SweepSpec s;
    s.density = Density::Extended;
    s.n_list = cfg.harness.n_sweep;
    s.alpha_list = {cfg.model.phys.alpha};
    s.f_mode = FrequencyMode::Fixed;
    s.f_khz = cfg.model.phys.f_ref_khz;
    s.seeds = cfg.harness.mh_seeds;
    s.kinds = {BoundKind::ExactSnrSum, BoundKind::MhLower};
    const SweepTable t = run_sweep(s, cfg.model);
    const auto up = seed_mean_log(t, BoundKind::ExactSnrSum, 0.0, cfg.model.phys.alpha);
    const auto lo = seed_mean_log(t, BoundKind::MhLower, 0.0, cfg.model.phys.alpha);
    if (up.size() != s.n_list.size() || lo.size() != s.n_list.size()) throw std::runtime_error("sweep points failed");
    std::vector<double> logs;
    auto per_n = nlohmann::ordered_json::array();
    for (const auto& [n, u] : up) {
      logs.push_back(lo.at(n) - u);
      per_n.push_back({{"n", n}, {"mh_over_upper", std::exp(logs.back())}});
    }
    const double band = std::exp(*std::max_element(logs.begin(), logs.end()) - *std::min_element(logs.begin(), logs.end()));
    r.measured["ratios"] = per_n;
    r.measured["band"] = band;
    r.measured["limit"] = cfg.harness.ratio_threshold;
    r.summary = "MH / cut-set ratio spans a factor " + fmt(band) + " (limit " + fmt(cfg.harness.ratio_threshold) + ")";
    return band <= cfg.harness.ratio_threshold;
  });
}

CheckResult check_dense_mh_regimes(const Config& cfg) {
  return timed(9, "dense_mh_regimes", 0.0, [&](CheckResult& r) {
    SweepSpec s;
    s.density = Density::Dense;
    s.n_list = cfg.harness.n_sweep;
    s.beta_list = {0.5, 0.25};
    s.alpha_list = {cfg.model.phys.alpha};
    s.f_mode = FrequencyMode::Regime;
    s.seeds = cfg.harness.mh_seeds;
    s.kinds = {BoundKind::HybridDenseUpper, BoundKind::MhLower};
    const SweepTable t = run_sweep(s, cfg.model);
    const double a = cfg.model.phys.alpha;
    const FitResult f = fit_exponent(t, BoundKind::MhLower, 0.5, a, FitAxis::LogN);
    const auto up = seed_mean_log(t, BoundKind::HybridDenseUpper, 0.25, a);
    const auto lo = seed_mean_log(t, BoundKind::MhLower, 0.25, a);
    if (up.size() != s.n_list.size() || lo.size() != s.n_list.size()) throw std::runtime_error("sweep points failed");
    std::vector<double> gaps;
    auto per_n = nlohmann::ordered_json::array();
    for (const auto& [n, u] : up) {
      gaps.push_back(u - lo.at(n));
      per_n.push_back({{"n", n}, {"upper_over_mh", std::exp(gaps.back())}});
    }
    const bool growing = strictly_increasing(gaps);
    r.measured["mh_slope_beta_0.5"] = f.slope;
    r.measured["gap_beta_0.25"] = per_n;
    r.measured["gap_grows"] = growing;
    r.summary = "MH slope " + fmt(f.slope) + " at beta 0.5 (target 0.5 +- " + fmt(cfg.harness.slope_tol) +
                "); beta 0.25 gap " + (growing ? "grows" : "does not grow") + " with n";
    return std::abs(f.slope - 0.5) <= cfg.harness.slope_tol && growing;
  });
}

CheckResult check_random_networks(const Config& cfg) {
  return timed(10, "random_networks", 0.0, [&](CheckResult& r) {
    const auto& m = cfg.model;
    const ChannelState ch = fixed_state(2.0, noise_psd(m.phys.f_ref_khz, m.phys), m.phys.f_ref_khz);
    const auto& ns = cfg.harness.n_sweep;
    const auto& seeds = cfg.harness.mh_seeds;
    std::vector<double> log_ratio(ns.size() * seeds.size());
    std::vector<std::size_t> failures(log_ratio.size());
    parallel_for_each_index(log_ratio.size(), [&](std::size_t i) {
      const std::size_t n = ns[i / seeds.size()];
      const std::uint64_t seed = seeds[i % seeds.size()];
      const SdMatching match = random_matching(n, seed);
      MhConfig ext = m.mh;
      ext.mode = MhMode::ExtendedFullPower;
      const MhReport reg = mh_throughput(build_grid(n, Density::Extended), match, ch, ext, m.phys);
      const MhReport rnd = mh_throughput_random(build_random(n, seed), match, ch, m.mh, m.phys);
      log_ratio[i] = rnd.simulated.log_value - reg.simulated.log_value;
      failures[i] = rnd.failures.size();
    });
    std::vector<double> mean;
    auto per_n = nlohmann::ordered_json::array();
    std::size_t total_failures = 0;
    for (std::size_t j = 0; j < ns.size(); ++j) {
      KahanSum acc;
      for (std::size_t s = 0; s < seeds.size(); ++s) {
        acc.add(log_ratio[j * seeds.size() + s]);
        total_failures += failures[j * seeds.size() + s];
      }
      mean.push_back(acc.value() / static_cast<double>(seeds.size()));
      per_n.push_back({{"n", ns[j]}, {"random_over_regular", std::exp(mean.back())}});
    }
    const bool decreasing = strictly_decreasing(mean);

    const auto& h = cfg.harness;
    const double cap = std::log2(static_cast<double>(h.occupancy_n));
    std::vector<std::size_t> occ(h.occupancy_seeds);
    parallel_for_each_index(occ.size(), [&](std::size_t i) {
      occ[i] = max_unit_square_occupancy(build_random(h.occupancy_n, i + 1));
    });
    const auto ok_seeds = static_cast<std::size_t>(
        std::count_if(occ.begin(), occ.end(), [&](std::size_t o) { return static_cast<double>(o) <= cap; }));

    r.measured["ratios"] = per_n;
    r.measured["ratio_decreasing"] = decreasing;
    r.measured["routing_failures"] = total_failures;
    r.measured["occupancy_cap"] = cap;
    r.measured["occupancy_seeds_within_cap"] = ok_seeds;
    r.measured["occupancy_seeds"] = h.occupancy_seeds;
    r.summary = std::string("random/regular ratio ") + (decreasing ? "decreases" : "does not decrease") +
                " with n (last " + fmt(std::exp(mean.back())) + "); occupancy <= " + fmt(cap) + " in " +
                std::to_string(ok_seeds) + "/" + std::to_string(h.occupancy_seeds) + " seeds";
    return decreasing && ok_seeds >= h.occupancy_min_pass;
  });
}

VerifyReport verify_all(const Config& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  VerifyReport rep;
  for (auto* f : {check_gain_propriety, check_diagonal_covariance, check_extended_transfer_bound,
                  check_dense_transfer_sandwich, check_extended_cutset_order, check_dense_cutset_exponents,
                  check_interference_bounds, check_extended_mh_optimality, check_dense_mh_regimes,
                  check_random_networks})
    rep.checks.push_back(f(cfg));
  rep.all_pass = std::all_of(rep.checks.begin(), rep.checks.end(), [](const CheckResult& c) { return c.pass; });
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

nlohmann::ordered_json to_json(const CheckResult& c) {
  nlohmann::ordered_json j;
  j["id"] = c.id;
  j["name"] = c.name;
  j["pass"] = c.pass;
  j["seconds"] = c.seconds;
  if (c.time_limit > 0.0) j["time_limit_seconds"] = c.time_limit;
  j["summary"] = c.summary;
  j["measured"] = c.measured;
  return j;
}

nlohmann::ordered_json to_json(const VerifyReport& r) {
  nlohmann::ordered_json j;
  j["all_pass"] = r.all_pass;
  j["seconds"] = r.seconds;
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) j["checks"].push_back(to_json(c));
  return j;
}

}  // namespace aquascale
