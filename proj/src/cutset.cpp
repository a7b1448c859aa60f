#include "aquascale/cutset.hpp"

#include <algorithm>
#include <numbers>
#include <stdexcept>

#include "aquascale/numeric.hpp"

namespace aquascale {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double log_term(double r, double log_a, const PhysicalParams& p) {
  return std::log(p.tx_power) - log_attenuation(r, log_a, p);
}

bool contains_sorted(const std::vector<std::size_t>& v, std::size_t x) { return std::binary_search(v.begin(), v.end(), x); }

}  // namespace

std::string to_string(BoundKind k) {
  switch (k) {
    case BoundKind::ExactSnrSum: return "exact_snr_sum";
    case BoundKind::ClosedFormUpper: return "closed_form_upper";
    case BoundKind::HybridDenseUpper: return "hybrid_dense_upper";
    case BoundKind::MhLower: return "mh_lower";
    case BoundKind::MhRandomLower: return "mh_random_lower";
  }
  return "?";
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::Bandwidth: return "bandwidth";
    case Regime::BandwidthAndPower: return "bandwidth_and_power";
    case Regime::Power: return "power";
  }
  return "?";
}

BoundKind bound_kind_from_string(const std::string& s) {
  for (auto k : {BoundKind::ExactSnrSum, BoundKind::ClosedFormUpper, BoundKind::HybridDenseUpper, BoundKind::MhLower,
                 BoundKind::MhRandomLower})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown bound kind '" + s + "'");
}

Regime classify_regime(double beta) {
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be non-negative");
  if (beta == 0.0) return Regime::Bandwidth;
  if (beta <= 0.5) return Regime::BandwidthAndPower;
  return Regime::Power;
}

ThroughputBound make_bound(double log_value, BoundKind kind, double beta, std::size_t n, double f_khz, double alpha) {
  ThroughputBound b;
  b.log_value = log_value;
  b.value = std::exp(log_value);
  b.kind = kind;
  b.regime = classify_regime(beta);
  b.n = n;
  b.beta = beta;
  b.f_khz = f_khz;
  b.alpha = alpha;
  return b;
}

double log_received_power_exact(const NodeGrid& grid, const CutPartition& cut, const ChannelState& ch, std::size_t k,
                                const PhysicalParams& p) {
  if (k >= grid.n || !contains_sorted(cut.right, k))
    throw std::domain_error("received power is defined for right-half destinations only");
  LogSumExp acc;
  const Point& dst = grid.positions[k];
  for (auto i : cut.left) acc.add(log_term(distance(grid.positions[i], dst), ch.log_a, p));
  return acc.value();
}

double received_power_exact(const NodeGrid& grid, const CutPartition& cut, const ChannelState& ch, std::size_t k,
                            const PhysicalParams& p) {
  return std::exp(log_received_power_exact(grid, cut, ch, k, p));
}

std::vector<double> log_received_power_by_node(const NodeGrid& grid, const CutPartition& cut, const ChannelState& ch,
                                               const PhysicalParams& p) {
  std::vector<double> out(grid.n, kNaN);
  if (!grid.regular()) {
    parallel_for_each_index(cut.right.size(), [&](std::size_t i) {
      out[cut.right[i]] = log_received_power_exact(grid, cut, ch, cut.right[i], p);
    });
    return out;
  }
  const std::size_t side = grid.side();
  const std::size_t half = side / 2;
  const double s = grid.spacing();
  const std::size_t span = 2 * side - 1;  // dy in [-(side-1), side-1]
  // Row dx: log of its dy = 0 term, plus prefix sums of every term in the row
  // relative to it (all ratios <= 1, so nothing overflows).
  std::vector<double> head(side, 0.0);
  std::vector<std::vector<double>> prefix(side, std::vector<double>(span + 1, 0.0));
  parallel_for_each_index(side - 1, [&](std::size_t i) {
    const std::size_t dx = i + 1;
    head[dx] = log_term(s * static_cast<double>(dx), ch.log_a, p);
    KahanSum acc;
    for (std::size_t t = 0; t < span; ++t) {
      const double dy = static_cast<double>(t) - static_cast<double>(side - 1);
      const double r = s * std::hypot(static_cast<double>(dx), dy);
      acc.add(std::exp(log_term(r, ch.log_a, p) - head[dx]));
      prefix[dx][t + 1] = acc.value();
    }
  });
  parallel_for_each_index(cut.right.size(), [&](std::size_t idx) {
    const std::size_t k = cut.right[idx];
    const std::size_t kx = grid.cut_offset(k);
    const std::size_t row = grid.row(k);
    // sources in rows 0..side-1 sit at dy = row - src_row, i.e. t in [row, row + side - 1]
    LogSumExp acc;
    for (std::size_t dx = kx; dx < kx + half; ++dx) {
      const double rowsum = prefix[dx][row + side] - prefix[dx][row];
      acc.add(head[dx] + std::log(rowsum));
    }
    out[k] = acc.value();
  });
  return out;
}

double fit_ring_constant(std::size_t n) {
  const NodeGrid g = build_grid(n, Density::Extended);
  const std::size_t side = g.side(), half = side / 2;
  double best = 0.0;
  for (std::size_t kx = 1; kx <= half; ++kx)
    for (std::size_t ky = 0; ky < side; ++ky) {
      std::vector<std::size_t> count;
      for (std::size_t ix = 1; ix <= half; ++ix)
        for (std::size_t iy = 0; iy < side; ++iy) {
          const long dx = static_cast<long>(ix + kx - 1);
          const long dy = static_cast<long>(iy) - static_cast<long>(ky);
          const auto d2 = static_cast<unsigned long>(dx * dx + dy * dy);
          auto ring = static_cast<std::size_t>(std::sqrt(static_cast<double>(d2)));
          while (ring * ring > d2) --ring;
          while ((ring + 1) * (ring + 1) <= d2) ++ring;
          if (count.size() <= ring) count.resize(ring + 1, 0);
          ++count[ring];
        }
      for (std::size_t ring = kx; ring < count.size(); ++ring)
        best = std::max(best, static_cast<double>(count[ring]) / static_cast<double>(ring + 1));
    }
  return best;
}

double log_received_power_upper_extended(std::size_t cut_offset, const ChannelState& ch, const PhysicalParams& p,
                                         double ring_constant) {
  if (cut_offset < 1) throw std::domain_error("cut_offset starts at 1");
  // rings i' >= cut_offset hold <= c(i'+1) sources at distance >= i'; the tail of the
  // geometric series is bounded by its first term plus an integral
  const double scale = 2.0 * ring_constant * p.tx_power / p.c0 * (1.0 + 1.0 / ch.log_a);
  const double kx = static_cast<double>(cut_offset);
  return std::log(scale) + (1.0 - p.alpha) * std::log(kx) - kx * ch.log_a;
}

double received_power_upper_extended(std::size_t cut_offset, const ChannelState& ch, const PhysicalParams& p,
                                     double ring_constant) {
  return std::exp(log_received_power_upper_extended(cut_offset, ch, p, ring_constant));
}

namespace {

void check_dense_column(std::size_t cut_offset, std::size_t n) {
  const std::size_t half = regular_side(n) / 2;
  if (cut_offset < 1 || cut_offset > half) throw std::domain_error("cut_offset must lie in 1..sqrt(n)/2");
}

double log_dense_upper(std::size_t cut_offset, std::size_t n, const PhysicalParams& p, double lambda, bool near,
                       double ring_constant) {
  const double nn = static_cast<double>(n);
  const double base = 2.0 * ring_constant * p.tx_power / p.c0;
  if (near) {
    // exponential factor dropped; farthest ring is below sqrt(2n)
    if (p.alpha < 2.0) {
      const double g = 2.0 - p.alpha;
      return std::log(base * (1.0 + std::pow(2.0, g / 2.0) / g)) + std::log(nn);
    }
    const double c = (1.0 + std::numbers::ln2 / 2.0) / std::log(4.0) + 0.5;
    return std::log(base * c) + std::log(nn) + std::log(std::log(nn));
  }
  const double kx = static_cast<double>(cut_offset);
  return std::log(2.0 * base) + p.alpha / 2.0 * std::log(nn) - lambda * kx + std::log(std::max(1.0, 1.0 / lambda));
}

}  // namespace

double log_dense_lower_form(std::size_t cut_offset, std::size_t n, const PhysicalParams& p, double beta, double eps0,
                            double eps) {
  check_dense_column(cut_offset, n);
  const ChannelState ch = regime_state(n, beta, eps0, p);
  const double nn = static_cast<double>(n);
  const double lambda = ch.log_a / std::sqrt(nn);
  const double kx = static_cast<double>(cut_offset);
  const double lp = std::log(p.tx_power / p.c0);
  if (cut_offset <= split_width(n, beta, eps))
    return lp + (p.alpha / 2.0 - eps) * std::log(nn) + (1.0 - p.alpha) * std::log(kx) - lambda * (2.0 * kx - 1.0);
  return lp - lambda * kx + std::max(0.0, -lambda - std::log(lambda));
}

DenseLowerCalibration calibrate_dense_lower(const std::vector<std::size_t>& n_list, const PhysicalParams& p,
                                            double beta, double eps0, double eps) {
  std::vector<std::size_t> ns = n_list;
  std::sort(ns.begin(), ns.end());
  DenseLowerCalibration cal;
  for (auto n : ns) {
    if (cal.n_near && cal.n_far) break;
    const NodeGrid g = build_grid(n, Density::Dense);
    const CutPartition c = cut(g);
    const ChannelState ch = regime_state(n, beta, eps0, p);
    const auto logpl = log_received_power_by_node(g, c, ch, p);
    const std::size_t xl = split_width(n, beta, eps);
    double near = std::numeric_limits<double>::infinity(), far = near;
    for (auto k : c.right) {
      const std::size_t kx = g.cut_offset(k);
      const double gap = logpl[k] - log_dense_lower_form(kx, n, p, beta, eps0, eps);
      (kx <= xl ? near : far) = std::min(kx <= xl ? near : far, gap);
    }
    if (!cal.n_near && std::isfinite(near)) {
      cal.log_near = near;
      cal.n_near = n;
    }
    if (!cal.n_far && std::isfinite(far)) {
      cal.log_far = far;
      cal.n_far = n;
    }
  }
  return cal;
}

DenseTransferBounds received_power_bounds_dense(std::size_t cut_offset, std::size_t n, const PhysicalParams& p, double beta,
                                                double eps0, double eps, double ring_constant,
                                                const DenseLowerCalibration& cal) {
  check_dense_column(cut_offset, n);
  const ChannelState ch = regime_state(n, beta, eps0, p);
  const double lambda = ch.log_a / std::sqrt(static_cast<double>(n));
  const bool near = cut_offset <= split_width(n, beta, eps);
  DenseTransferBounds b;
  b.near = near;
  b.log_upper = log_dense_upper(cut_offset, n, p, lambda, near, ring_constant);
  const double scale = near ? cal.log_near : cal.log_far;
  b.log_lower = std::isnan(scale) ? kNaN : scale + log_dense_lower_form(cut_offset, n, p, beta, eps0, eps);
  return b;
}

CutsetPair cutset_upper_extended(const NodeGrid& grid, const CutPartition& cut, const ChannelState& ch,
                                 const PhysicalParams& p, double closed_scale) {
  const auto logpl = log_received_power_by_node(grid, cut, ch, p);
  LogSumExp total;
  for (auto k : cut.right) total.add(logpl[k]);
  const double log2e = std::log(std::numbers::log2e);
  CutsetPair out;
  out.exact = make_bound(total.value() - std::log(ch.noise) + log2e, BoundKind::ExactSnrSum, 0.0, grid.n, ch.f_khz,
                         p.alpha);
  const double closed = std::log(closed_scale) + 0.5 * std::log(static_cast<double>(grid.n)) - ch.log_a - std::log(ch.noise);
  out.closed = make_bound(closed, BoundKind::ClosedFormUpper, 0.0, grid.n, ch.f_khz, p.alpha);
  return out;
}

double miso_hadamard_bound(const NodeGrid& grid, const CutPartition& cut, const ChannelState& ch,
                           const std::vector<std::size_t>& subset, const PhysicalParams& p) {
  KahanSum acc;
  const double log_noise = std::log(ch.noise);
  for (auto k : subset) acc.add(log2_1p_exp(log_received_power_exact(grid, cut, ch, k, p) - log_noise));
  return acc.value();
}

double log_dense_closed_form(std::size_t n, double beta, double eps, const ChannelState& ch, const PhysicalParams& p) {
  const double nn = static_cast<double>(n);
  switch (classify_regime(beta)) {
    case Regime::Bandwidth: return std::log(nn) + std::log(std::log(nn));
    case Regime::BandwidthAndPower: return (1.0 - beta + eps) * std::log(nn) + std::log(std::log(nn));
    case Regime::Power:
      return (1.0 + p.alpha + beta * p.noise.a5) / 2.0 * std::log(nn) - ch.log_a / std::sqrt(nn);
  }
  return kNaN;
}

DenseCutset cutset_upper_dense(const NodeGrid& grid, const CutPartition& split, const ChannelState& ch, double beta,
                               double eps, const PhysicalParams& p, double closed_scale) {
  if (grid.density != Density::Dense || !split.near_width) throw std::invalid_argument("cutset_upper_dense needs dense_split output");
  const auto logpl = log_received_power_by_node(grid, split, ch, p);
  const double log_noise = std::log(ch.noise);
  DenseCutset out;
  KahanSum near;
  for (auto k : split.near_dst) near.add(log2_1p_exp(logpl[k] - log_noise));
  out.near_term = near.value();
  LogSumExp far;
  for (auto k : split.far_dst) far.add(logpl[k]);
  if (!split.far_dst.empty()) out.log_far_term = far.value() - log_noise + std::log(std::numbers::log2e);
  const double log_near = out.near_term > 0.0 ? std::log(out.near_term) : -std::numeric_limits<double>::infinity();
  out.hybrid = make_bound(log_add(log_near, out.log_far_term), BoundKind::HybridDenseUpper, beta, grid.n, ch.f_khz, p.alpha);
  out.closed = make_bound(std::log(closed_scale) + log_dense_closed_form(grid.n, beta, eps, ch, p),
                          BoundKind::ClosedFormUpper, beta, grid.n, ch.f_khz, p.alpha);
  return out;
}

}  // namespace aquascale
