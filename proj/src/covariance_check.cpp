#include "aquascale/covariance_check.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "aquascale/numeric.hpp"
#include "aquascale/topology.hpp"

namespace aquascale {

CutMimo build_cut_mimo(std::size_t n_small, const ChannelState& ch, const PhysicalParams& p) {
  if (n_small < 2 || n_small > 16 || n_small % 2 != 0)
    throw std::invalid_argument("the covariance check needs an even n_small in [2, 16]");
  std::vector<Point> src, dst;
  const auto s = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n_small))));
  if (s * s == n_small && s % 2 == 0) {
    const NodeGrid g = build_grid(n_small, Density::Extended);
    const CutPartition c = cut(g);
    for (auto i : c.left) src.push_back(g.positions[i]);
    for (auto k : c.right) dst.push_back(g.positions[k]);
  } else {
    for (std::size_t row = 1; row <= n_small / 2; ++row) {
      src.push_back({0.0, static_cast<double>(row)});
      dst.push_back({1.0, static_cast<double>(row)});
    }
  }
  CutMimo m;
  m.noise = ch.noise;
  m.tx_power = p.tx_power;
  m.magnitude.resize(static_cast<Eigen::Index>(dst.size()), static_cast<Eigen::Index>(src.size()));
  for (std::size_t k = 0; k < dst.size(); ++k)
    for (std::size_t i = 0; i < src.size(); ++i)
      m.magnitude(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) =
          std::exp(-0.5 * log_attenuation(distance(src[i], dst[k]), ch.log_a, p));
  return m;
}

std::vector<Eigen::MatrixXcd> draw_channels(const CutMimo& mimo, std::size_t num_draws, std::uint64_t seed) {
  std::vector<Eigen::MatrixXcd> out(num_draws);
  Philox rng(seed, 7);
  for (auto& h : out) {
    h.resize(mimo.magnitude.rows(), mimo.magnitude.cols());
    for (Eigen::Index k = 0; k < h.rows(); ++k)
      for (Eigen::Index i = 0; i < h.cols(); ++i)
        h(k, i) = std::polar(mimo.magnitude(k, i), 2.0 * std::numbers::pi * rng.uniform01());
  }
  return out;
}

std::vector<double> logdet_samples(const std::vector<Eigen::MatrixXcd>& channels, const Eigen::MatrixXcd& q,
                                   double noise) {
  std::vector<double> out(channels.size());
  parallel_for_each_index(channels.size(), [&](std::size_t t) {
    const auto& h = channels[t];
    Eigen::MatrixXcd m = h * q * h.adjoint() / noise;
    m.diagonal().array() += 1.0;
    Eigen::LLT<Eigen::MatrixXcd> llt(m);
    if (llt.info() != Eigen::Success) throw std::runtime_error("I + H Q H^H / N is not positive definite");
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i).real());
    out[t] = logdet / std::numbers::ln2;
  });
  return out;
}

Eigen::MatrixXcd random_feasible_covariance(std::size_t dim, double power, Philox& rng) {
  const auto d = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXcd g(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) g(i, j) = {rng.normal() / std::numbers::sqrt2, rng.normal() / std::numbers::sqrt2};
  Eigen::MatrixXcd m = g * g.adjoint();
  Eigen::VectorXd scale(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    double u = rng.uniform01();
    while (u == 0.0) u = rng.uniform01();
    scale(i) = std::sqrt(u * power / m(i, i).real());
  }
  Eigen::MatrixXcd q = scale.asDiagonal() * m * scale.asDiagonal();
  return 0.5 * (q + q.adjoint());
}

bool is_feasible_covariance(const Eigen::MatrixXcd& q, double power) {
  if (q.rows() != q.cols()) return false;
  if (!q.isApprox(q.adjoint(), 1e-12)) return false;
  for (Eigen::Index i = 0; i < q.rows(); ++i)
    if (q(i, i).real() > power * (1.0 + 1e-12)) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(q, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -1e-9 * power;
}

CovarianceCheck diagonal_covariance_check(std::size_t n_small, const ChannelState& ch, std::size_t num_random_q,
                                          std::size_t num_phase_draws, std::uint64_t seed, const PhysicalParams& p) {
  if (num_phase_draws < 2) throw std::invalid_argument("need at least two phase draws");
  const CutMimo mimo = build_cut_mimo(n_small, ch, p);
  const auto channels = draw_channels(mimo, num_phase_draws, seed);
  const auto dim = static_cast<std::size_t>(mimo.magnitude.cols());
  const Eigen::MatrixXcd identity = p.tx_power * Eigen::MatrixXcd::Identity(mimo.magnitude.cols(), mimo.magnitude.cols());
  const auto base = logdet_samples(channels, identity, mimo.noise);

  CovarianceCheck out;
  KahanSum cap;
  for (double v : base) cap.add(v);
  const double m = static_cast<double>(num_phase_draws);
  out.capacity_identity = cap.value() / m;
  out.num_q = num_random_q;
  out.pass = true;
  out.gap = -std::numeric_limits<double>::infinity();
  out.worst_z = -std::numeric_limits<double>::infinity();
  Philox rng(seed, 11);
  for (std::size_t b = 0; b < num_random_q; ++b) {
    Eigen::MatrixXcd q = random_feasible_covariance(dim, p.tx_power, rng);
    while (!is_feasible_covariance(q, p.tx_power)) {
      ++out.resampled;
      q = random_feasible_covariance(dim, p.tx_power, rng);
    }
    const auto s = logdet_samples(channels, q, mimo.noise);
    KahanSum sum;
    for (std::size_t t = 0; t < s.size(); ++t) sum.add(s[t] - base[t]);
    const double mean = sum.value() / m;
    KahanSum sq;
    for (std::size_t t = 0; t < s.size(); ++t) sq.add((s[t] - base[t] - mean) * (s[t] - base[t] - mean));
    const double se = std::sqrt(sq.value() / (m - 1.0) / m);
    if (mean > out.gap) {
      out.gap = mean;
      out.gap_standard_error = se;
    }
    const double z = se > 0.0 ? mean / se : (mean > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    out.worst_z = std::max(out.worst_z, z);
    if (mean > 2.0 * se) out.pass = false;
  }
  if (num_random_q == 0) out.gap = 0.0, out.worst_z = 0.0;
  return out;
}

}  // namespace aquascale
