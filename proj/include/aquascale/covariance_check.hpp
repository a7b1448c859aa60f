#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "aquascale/channel.hpp"
#include "aquascale/rng.hpp"

namespace aquascale {

// MIMO channel across the cut of a small extended layout: sources on the
// left, destinations on the right, gain magnitudes fixed by distance.
struct CutMimo {
  Eigen::MatrixXd magnitude;  // destinations x sources, 1/sqrt(A)
  double noise = 1.0;
  double tx_power = 1.0;
};

// n_small nodes: the regular square grid when n_small is an even-root
// square, otherwise two columns of n_small/2 nodes.
CutMimo build_cut_mimo(std::size_t n_small, const ChannelState& ch, const PhysicalParams& p);

// Channel realizations with i.i.d. uniform phases; one set is shared by every
// covariance under test so that capacity differences have low variance.
std::vector<Eigen::MatrixXcd> draw_channels(const CutMimo& mimo, std::size_t num_draws, std::uint64_t seed);

// log2 det(I + H Q H^H / N) for each realization.
std::vector<double> logdet_samples(const std::vector<Eigen::MatrixXcd>& channels, const Eigen::MatrixXcd& q,
                                   double noise);

// D (G G^H) D with G complex Gaussian and D chosen so diag(Q)_i = u_i P.
Eigen::MatrixXcd random_feasible_covariance(std::size_t dim, double power, Philox& rng);
bool is_feasible_covariance(const Eigen::MatrixXcd& q, double power);

struct CovarianceCheck {
  double capacity_identity = 0.0;   // ergodic estimate for Q = P I
  double gap = 0.0;                 // max over random Q of mean paired difference
  double gap_standard_error = 0.0;  // standard error of that difference
  double worst_z = 0.0;             // max over Q of difference / its standard error
  std::size_t num_q = 0;
  std::size_t resampled = 0;
  bool pass = false;                // every difference <= 2 standard errors
};

CovarianceCheck diagonal_covariance_check(std::size_t n_small, const ChannelState& ch, std::size_t num_random_q,
                                          std::size_t num_phase_draws, std::uint64_t seed, const PhysicalParams& p);

}  // namespace aquascale
