#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "aquascale/channel.hpp"
#include "aquascale/cutset.hpp"
#include "aquascale/routing.hpp"
#include "aquascale/topology.hpp"

namespace aquascale {

// Everything a bound or simulation needs besides the layout.
struct ModelParams {
  PhysicalParams phys;
  double eps0 = std::expm1(50.0);  // ln(1 + eps0) = c1 f_ref^2 puts beta = 0 at f_ref
  double eps = 0.01;               // split-width exponent slack
  MhConfig mh;
  BoundConstants constants;
};

enum class FrequencyMode { Fixed, Regime };

std::string to_string(FrequencyMode m);
FrequencyMode frequency_mode_from_string(const std::string& s);

struct SweepSpec {
  Density density = Density::Extended;
  std::vector<std::size_t> n_list{64, 256, 1024};
  std::vector<double> beta_list{0.0};
  std::vector<double> alpha_list{1.5};
  FrequencyMode f_mode = FrequencyMode::Fixed;
  double f_khz = 10.0;                 // used when f_mode is Fixed
  std::vector<std::uint64_t> seeds{1};
  std::vector<BoundKind> kinds;        // empty: every kind the density supports

  void validate() const;
  std::vector<BoundKind> effective_kinds() const;
};

struct SweepRow {
  std::size_t n = 0;
  double beta = 0.0;
  double f_khz = 0.0;
  double alpha = 0.0;
  BoundKind kind = BoundKind::ExactSnrSum;
  Regime regime = Regime::Bandwidth;
  std::uint64_t seed = 0;
  double value = 0.0;
  double log_value = -std::numeric_limits<double>::infinity();
  bool ok = true;
  std::string error;
};

struct SweepTable {
  std::vector<SweepRow> rows;
};

// One row per (n, beta, alpha, seed, kind) in that order. A point that throws
// yields rows with ok = false and the message; the sweep carries on.
SweepTable run_sweep(const SweepSpec& spec, const ModelParams& model);

ChannelState channel_for(const SweepSpec& spec, std::size_t n, double beta, const ModelParams& model);

// n,beta,f_khz,alpha,kind,value,regime
void write_bounds_csv(std::ostream& out, const std::vector<ThroughputBound>& bounds);
// the bounds columns plus seed,log_value,status
void write_sweep_csv(std::ostream& out, const SweepTable& table);
// one gnuplot data block per (kind, beta, alpha): columns n value log_value
void write_gnuplot(std::ostream& out, const SweepTable& table);

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double residual_max = 0.0;
  std::size_t points = 0;
};

// Least squares y = slope x + intercept. Throws std::invalid_argument with
// fewer than three points or a degenerate x range.
FitResult fit_line(const std::vector<double>& x, const std::vector<double>& y);

enum class FitAxis {
  LogN,           // x = ln n
  RegimeExponent  // x = n^(beta - 1/2), for the exponentially decaying regime
};

// Mean of log_value over seeds for each n, using ok rows only.
std::map<std::size_t, double> seed_mean_log(const SweepTable& table, BoundKind kind, double beta, double alpha);

// Fits log value (seed-averaged) against the chosen axis.
FitResult fit_exponent(const SweepTable& table, BoundKind kind, double beta, double alpha, FitAxis axis);

struct RatioCheck {
  bool bounded = false;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double log_min_ratio = 0.0;
  double log_max_ratio = 0.0;
  std::size_t pairs = 0;
};

// Ratio numerator/denominator over rows matched on (n, beta, alpha, seed);
// bounded when max/min <= threshold. Throws std::invalid_argument when a row
// has no partner.
RatioCheck order_ratio_check(const SweepTable& table, BoundKind numerator, BoundKind denominator,
                             double threshold = 10.0);

}  // namespace aquascale
