#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "aquascale/channel.hpp"
#include "aquascale/cutset.hpp"
#include "aquascale/topology.hpp"

namespace aquascale {

enum class MhMode { ExtendedFullPower, DenseScaledPower, RandomLogCells };

std::string to_string(MhMode m);
MhMode mh_mode_from_string(const std::string& s);  // "extended", "dense", "random"

struct MhConfig {
  MhMode mode = MhMode::ExtendedFullPower;
  std::size_t tdma_reuse = 9;        // slots per frame; cells share a slot when their indices agree mod sqrt(reuse)
  double delta = 1.4142135623730951; // random-mode per-hop constant
  void validate() const;
  std::size_t reuse_period() const;  // sqrt(tdma_reuse)
};

// ln of the per-node transmit power. Dense mode scales P by
// min{1, a^(1/sqrt n) N / n^(alpha/2)}.
double log_tx_power(MhMode mode, std::size_t n, const ChannelState& ch, const PhysicalParams& p);
double tx_power(MhMode mode, std::size_t n, const ChannelState& ch, const PhysicalParams& p);

// Square routing cells covering the region. Regular grids use one cell per
// node (cell id == node id); random layouts use cells of area about 2 log2 n,
// stretched so that a whole number of them tiles the square.
struct CellTiling {
  std::size_t per_side = 0;
  double side = 0.0;
  double origin_x = 0.0;  // lower-left corner of cell 0
  double origin_y = 0.0;
  std::size_t cell_of(const Point& pt) const;
  std::pair<std::size_t, std::size_t> coords(std::size_t cell) const { return {cell % per_side, cell / per_side}; }
};

double random_cell_side(std::size_t n);  // sqrt(2 log2 n)
CellTiling make_tiling(const NodeGrid& grid);

struct Route {
  std::size_t src = 0;
  std::size_t dst = 0;
  std::vector<std::size_t> nodes;         // src, relays..., dst
  std::vector<std::size_t> cells;         // cell of each transmitting node (nodes.size() - 1 entries)
  std::vector<double> hop_distances;
  std::size_t hops() const { return hop_distances.size(); }
};

struct RoutingFailure {
  std::size_t src;
  std::size_t dst;
  std::size_t empty_cell;
};

// 4-connected cells crossed by the segment between two cell centres on an
// integer lattice. At an exact corner crossing the x step comes first.
std::vector<std::pair<long, long>> lattice_cell_path(long x0, long y0, long x1, long y1);
// Cells crossed by a segment in a continuous tiling (grid traversal).
std::vector<std::size_t> segment_cells(const Point& a, const Point& b, const CellTiling& tiling);

// Throws std::runtime_error carrying the failure when a random-mode route
// meets an empty cell.
Route build_route(std::size_t src, std::size_t dst, const NodeGrid& grid, const CellTiling& tiling,
                  const std::vector<std::vector<std::size_t>>& occupants);
std::vector<std::vector<std::size_t>> cell_occupants(const NodeGrid& grid, const CellTiling& tiling);

// Nodes transmitting in the same slot as the one in tx_cell, one per co-slot
// cell (the occupant nearest the receiver), excluding tx_cell and the receiver.
std::vector<std::size_t> coslot_interferers(const NodeGrid& grid, const CellTiling& tiling,
                                            const std::vector<std::vector<std::size_t>>& occupants,
                                            std::size_t tx_cell, std::size_t receiver, std::size_t reuse_period);

// ln sum_i P_tx / A(r_i): every listed interferer transmits at exp(log_ptx).
double log_interference_exact(const NodeGrid& grid, const std::vector<std::size_t>& active, std::size_t receiver,
                              const ChannelState& ch, double log_ptx, const PhysicalParams& p);
double interference_exact(const NodeGrid& grid, const std::vector<std::size_t>& active, std::size_t receiver,
                          const ChannelState& ch, double log_ptx, const PhysicalParams& p);

// max over adjacent transmitter/receiver pairs on the side(n) lattice and over
// Chebyshev layers k around the receiver of (co-slot cells in layer k)/(8k).
double fit_layer_constant(std::size_t n, std::size_t tdma_reuse);

// ln K with K = 8 layer (P/c0) a_min/(a_min - 1); the extended bound is K/a.
double extended_interference_log_constant(const PhysicalParams& p, const BoundConstants& c);
// Throws std::domain_error when a < a_min (the constant does not cover it).
double log_interference_upper_extended(const ChannelState& ch, const PhysicalParams& p, const BoundConstants& c);
double interference_upper_extended(const ChannelState& ch, const PhysicalParams& p, const BoundConstants& c);
double log_interference_upper_dense(std::size_t n, double beta, double eps0, const PhysicalParams& p,
                                    const BoundConstants& c);

// Largest log interference over every adjacent (tx, rx) pair of a regular grid with all
// co-slot cells active.
double max_log_interference_grid(const NodeGrid& grid, const ChannelState& ch, double log_ptx, std::size_t tdma_reuse,
                                 const PhysicalParams& p);

// log2(1 + received / (noise + interference)) from logs; the _log variant returns ln of the rate
// and stays finite when the rate underflows.
double per_hop_rate(double log_pr, double log_pi, double noise);
double log_per_hop_rate(double log_pr, double log_pi, double noise);

struct MhReport {
  std::size_t n = 0;
  MhMode mode = MhMode::ExtendedFullPower;
  double f_khz = 0.0;
  double beta = 0.0;
  ThroughputBound simulated;
  ThroughputBound closed_form;
  double log_ratio = 0.0;                 // ln(simulated / closed form)
  double min_hop_rate = 0.0;
  double log_min_hop_rate = -std::numeric_limits<double>::infinity();
  std::size_t max_cell_load = 0;
  std::size_t active_pairs = 0;           // pairs with src != dst that routed
  std::vector<RoutingFailure> failures;
  std::vector<std::size_t> cell_load;     // routes transmitting from each cell
  std::vector<Route> routes;
};

// ln of the closed-form order each mode is compared against.
double log_mh_closed_form(MhMode mode, std::size_t n, double beta, const ChannelState& ch, const PhysicalParams& p,
                          double delta);

// T = active pairs * min hop rate / (max cell load * tdma_reuse).
MhReport mh_throughput(const NodeGrid& grid, const SdMatching& matching, const ChannelState& ch, const MhConfig& cfg,
                       const PhysicalParams& p, double beta = 0.0);
MhReport mh_throughput_random(const NodeGrid& grid, const SdMatching& matching, const ChannelState& ch,
                              const MhConfig& cfg, const PhysicalParams& p);

// {n, mode, f_khz, beta, simulated_T, closed_form_T, ratio, min_hop_rate, max_cell_load, failures}
std::string mh_report_json(const MhReport& r);

}  // namespace aquascale
