#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "aquascale/channel.hpp"
#include "aquascale/topology.hpp"

namespace aquascale {

enum class BoundKind { ExactSnrSum, ClosedFormUpper, HybridDenseUpper, MhLower, MhRandomLower };
enum class Regime { Bandwidth, BandwidthAndPower, Power };

std::string to_string(BoundKind k);
std::string to_string(Regime r);
BoundKind bound_kind_from_string(const std::string& s);

Regime classify_regime(double beta);

// Throughput in bits per channel use. log_value is authoritative; value can
// underflow to zero in the power-limited regime.
struct ThroughputBound {
  double value = 0.0;
  double log_value = -std::numeric_limits<double>::infinity();
  BoundKind kind = BoundKind::ExactSnrSum;
  Regime regime = Regime::Bandwidth;
  std::size_t n = 0;
  double beta = 0.0;
  double f_khz = 0.0;
  double alpha = 0.0;
};

ThroughputBound make_bound(double log_value, BoundKind kind, double beta, std::size_t n, double f_khz, double alpha);

// Constants the closed forms carry. The geometric counts are fitted once on
// the n = 64 lattice (see fit_ring_constant / fit_layer_constant) and then
// frozen; everything else in the bound chains is analytic.
struct BoundConstants {
  double ring = 7.0 / 3.0;      // sources per unit-width ring around a destination, over (i'+1)
  double layer = 1.0 / 6.0;     // co-slot interferers per Chebyshev layer, over 8k
  double interference_a_min = 1.1;    // smallest absorption the extended interference constant covers
  double extended_closed = 1.0; // extended cut-set closed form scale
  double dense_closed = 1.0;    // dense three-regime closed form scale
};

// ln of the total power destination k receives from every left-half source.
double log_received_power_exact(const NodeGrid& grid, const CutPartition& cut, const ChannelState& ch, std::size_t k,
                                const PhysicalParams& p);
double received_power_exact(const NodeGrid& grid, const CutPartition& cut, const ChannelState& ch, std::size_t k,
                            const PhysicalParams& p);

// The same log received power for every right-half node, indexed by node id (NaN on the left).
// Regular grids go through a per-offset kernel with prefix sums over rows.
std::vector<double> log_received_power_by_node(const NodeGrid& grid, const CutPartition& cut, const ChannelState& ch,
                                               const PhysicalParams& p);

// max over destinations and rings i' >= cut_offset of (#sources at floor-distance i')/(i'+1).
double fit_ring_constant(std::size_t n);

double log_received_power_upper_extended(std::size_t cut_offset, const ChannelState& ch, const PhysicalParams& p,
                                         double ring_constant);
double received_power_upper_extended(std::size_t cut_offset, const ChannelState& ch, const PhysicalParams& p,
                                     double ring_constant);

// Lower-bound scales, calibrated on the smallest sweep size where each case
// has destinations and then held fixed.
struct DenseLowerCalibration {
  double log_near = std::numeric_limits<double>::quiet_NaN();
  double log_far = std::numeric_limits<double>::quiet_NaN();
  std::size_t n_near = 0;
  std::size_t n_far = 0;
};

struct DenseTransferBounds {
  double log_upper;
  double log_lower;  // NaN when the case is uncalibrated
  bool near;         // cut_offset inside the bandwidth-limited columns
};

double log_dense_lower_form(std::size_t cut_offset, std::size_t n, const PhysicalParams& p, double beta, double eps0,
                            double eps);
DenseLowerCalibration calibrate_dense_lower(const std::vector<std::size_t>& n_list, const PhysicalParams& p,
                                            double beta, double eps0, double eps);
DenseTransferBounds received_power_bounds_dense(std::size_t cut_offset, std::size_t n, const PhysicalParams& p, double beta,
                                                double eps0, double eps, double ring_constant,
                                                const DenseLowerCalibration& cal);

struct CutsetPair {
  ThroughputBound exact;   // total-SNR sum
  ThroughputBound closed;  // closed_scale sqrt(n) / (a N)
};

CutsetPair cutset_upper_extended(const NodeGrid& grid, const CutPartition& cut, const ChannelState& ch,
                                 const PhysicalParams& p, double closed_scale = 1.0);

double miso_hadamard_bound(const NodeGrid& grid, const CutPartition& cut, const ChannelState& ch,
                           const std::vector<std::size_t>& subset, const PhysicalParams& p);

struct DenseCutset {
  ThroughputBound hybrid;
  ThroughputBound closed;
  double near_term = 0.0;
  double log_far_term = -std::numeric_limits<double>::infinity();
};

double log_dense_closed_form(std::size_t n, double beta, double eps, const ChannelState& ch, const PhysicalParams& p);
DenseCutset cutset_upper_dense(const NodeGrid& grid, const CutPartition& split, const ChannelState& ch, double beta,
                               double eps, const PhysicalParams& p, double closed_scale = 1.0);

}  // namespace aquascale
