#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "aquascale/harness.hpp"

namespace aquascale {

// Sweep sizes, seeds and tolerances used by the verification checks.
struct HarnessSettings {
  std::vector<std::size_t> n_sweep{64, 256, 1024, 4096};
  std::vector<std::size_t> n_sweep_large{256, 1024, 4096, 16384};
  std::vector<std::uint64_t> mh_seeds{1, 2, 3};
  double slope_tol = 0.15;
  double ratio_threshold = 10.0;
  double cutset_order_band = 4.0;
  double log_tolerance = 1e-9;       // rounding slack when comparing logs of sums
  std::size_t propriety_samples = 100000;
  std::size_t covariance_n_small = 8;
  std::size_t covariance_random_q = 200;
  std::size_t covariance_draws = 10000;
  std::size_t occupancy_n = 4096;
  std::size_t occupancy_seeds = 100;
  std::size_t occupancy_min_pass = 95;
};

struct Config {
  ModelParams model;
  SweepSpec sweep;
  HarnessSettings harness;
  std::uint64_t seed = 1;
  std::size_t threads = 0;  // 0: library default

  void validate() const;
};

// Reads INI text with sections [channel], [sweep], [mh], [constants],
// [harness] and [run] over `cfg`. Unknown sections or keys throw
// std::invalid_argument.
void apply_config(std::istream& in, Config& cfg);
void apply_config_file(const std::string& path, Config& cfg);

std::vector<std::size_t> parse_size_list(const std::string& s);
std::vector<std::uint64_t> parse_seed_list(const std::string& s);
std::vector<double> parse_double_list(const std::string& s);

}  // namespace aquascale
