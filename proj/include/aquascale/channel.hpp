#pragma once

#include <complex>
#include <cstddef>

#include "aquascale/rng.hpp"

namespace aquascale {

// Empirical (Thorp) absorption fit; frequency in kHz, result in dB/km.
struct AbsorptionCoefficients {
  double a0 = 0.003;
  double a1 = 2.75e-4;
  double a2 = 0.11;
  double a3 = 44.0;
  double b1 = 1.0;
  double b2 = 4100.0;
};

// Ambient noise: 10 log10 N(f) = a4 - 10 a5 log10 f.
struct NoiseCoefficients {
  double a4 = 50.0;
  double a5 = 1.8;
};

struct PhysicalParams {
  double alpha = 1.5;            // spreading factor, [1, 2]
  double c0 = 1.0;               // attenuation scale
  AbsorptionCoefficients absorb;
  NoiseCoefficients noise;
  double c1 = 0.5;               // exponential absorption growth, kHz^-2
  double tx_power = 1e20;        // per-node power, linear (200 dB)
  double unit_length_km = 1.0;   // km per network distance unit
  double f_ref_khz = 10.0;       // carrier used when beta = 0

  // Throws std::invalid_argument naming the first violated constraint.
  void validate() const;
};

double absorption_db_per_km(double f_khz, const PhysicalParams& p);
double absorption_coeff(double f_khz, const PhysicalParams& p);
// ln a(f); stays finite where a(f) itself would overflow.
double log_absorption_coeff(double f_khz, const PhysicalParams& p);
double noise_psd(double f_khz, const PhysicalParams& p);

double attenuation(double r, double f_khz, const PhysicalParams& p);
// ln A(r) = ln c0 + alpha ln r + r ln a.
double log_attenuation(double r, double log_a, const PhysicalParams& p);

struct ChannelGain {
  double r;
  double theta;
  std::complex<double> value;
};

ChannelGain sample_gain(double r, double f_khz, const PhysicalParams& p, Philox& rng);

// Sample mean of (h - mean h)^2 over num_samples gains at distance r.
std::complex<double> pseudocovariance_estimate(double r, double f_khz, std::size_t num_samples,
                                               const PhysicalParams& p, Philox& rng);

// Carrier placing the network in regime beta: e^{c1 f^2} = (1+eps0)^{n^beta}.
double frequency_for_regime(std::size_t n, double beta, double eps0, const PhysicalParams& p);

// Exponential absorption anchored to the empirical fit at f_ref:
// ln a(f) = ln a_emp(f_ref) + c1 (f^2 - f_ref^2).
double log_absorption_exponential(double f_khz, const PhysicalParams& p);

// What a network sees of the channel at one operating point.
struct ChannelState {
  double f_khz;
  double log_a;
  double noise;
};

ChannelState empirical_state(double f_khz, const PhysicalParams& p);
ChannelState regime_state(std::size_t n, double beta, double eps0, const PhysicalParams& p);
ChannelState fixed_state(double a, double noise, double f_khz);

}  // namespace aquascale
