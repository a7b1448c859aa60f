#include "aquascale/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace aquascale {

namespace {

void require_positive_frequency(double f_khz) {
  if (!(f_khz > 0.0) || !std::isfinite(f_khz))
    throw std::domain_error("frequency must be positive and finite, got " + std::to_string(f_khz));
}

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void PhysicalParams::validate() const {
  require(alpha >= 1.0 && alpha <= 2.0, "alpha must lie in [1, 2]");
  require(c0 > 0.0, "c0 must be positive");
  require(absorb.a0 > 0 && absorb.a1 > 0 && absorb.a2 > 0 && absorb.a3 > 0 && absorb.b1 > 0 && absorb.b2 > 0,
          "absorption coefficients must all be positive");
  require(noise.a5 > 0.0, "noise exponent a5 must be positive");
  require(std::isfinite(noise.a4), "noise level a4 must be finite");
  require(c1 > 0.0, "c1 must be positive");
  require(tx_power > 0.0 && std::isfinite(tx_power), "tx_power must be positive");
  require(unit_length_km > 0.0, "unit_length_km must be positive");
  require(f_ref_khz > 0.0, "f_ref_khz must be positive");
}

double absorption_db_per_km(double f_khz, const PhysicalParams& p) {
  require_positive_frequency(f_khz);
  const auto& c = p.absorb;
  const double f2 = f_khz * f_khz;
  return c.a0 + c.a1 * f2 + c.a2 * f2 / (c.b1 + f2) + c.a3 * f2 / (c.b2 + f2);
}

double log_absorption_coeff(double f_khz, const PhysicalParams& p) {
  return absorption_db_per_km(f_khz, p) * p.unit_length_km / 10.0 * std::numbers::ln10;
}

double absorption_coeff(double f_khz, const PhysicalParams& p) {
  return std::pow(10.0, absorption_db_per_km(f_khz, p) * p.unit_length_km / 10.0);
}

double noise_psd(double f_khz, const PhysicalParams& p) {
  require_positive_frequency(f_khz);
  return std::pow(10.0, p.noise.a4 / 10.0) * std::pow(f_khz, -p.noise.a5);
}

double log_attenuation(double r, double log_a, const PhysicalParams& p) {
  if (!(r > 0.0)) throw std::domain_error("attenuation needs r > 0");
  return std::log(p.c0) + p.alpha * std::log(r) + r * log_a;
}

double attenuation(double r, double f_khz, const PhysicalParams& p) {
  if (!(r > 0.0)) throw std::domain_error("attenuation needs r > 0");
  return p.c0 * std::pow(r, p.alpha) * std::pow(absorption_coeff(f_khz, p), r);
}

ChannelGain sample_gain(double r, double f_khz, const PhysicalParams& p, Philox& rng) {
  const double a = attenuation(r, f_khz, p);
  const double theta = 2.0 * std::numbers::pi * rng.uniform01();
  return {r, theta, std::polar(1.0 / std::sqrt(a), theta)};
}

std::complex<double> pseudocovariance_estimate(double r, double f_khz, std::size_t num_samples,
                                               const PhysicalParams& p, Philox& rng) {
  if (num_samples == 0) throw std::invalid_argument("pseudocovariance_estimate needs at least one sample");
  std::vector<std::complex<double>> h(num_samples);
  std::complex<double> mean = 0.0;
  for (auto& v : h) {
    v = sample_gain(r, f_khz, p, rng).value;
    mean += v;
  }
  mean /= static_cast<double>(num_samples);
  std::complex<double> acc = 0.0;
  for (const auto& v : h) acc += (v - mean) * (v - mean);
  return acc / static_cast<double>(num_samples);
}

double frequency_for_regime(std::size_t n, double beta, double eps0, const PhysicalParams& p) {
  if (n < 4) throw std::invalid_argument("frequency_for_regime needs n >= 4");
  if (beta < 0.0) throw std::invalid_argument("beta must be non-negative");
  if (!(eps0 > 0.0)) throw std::invalid_argument("eps0 must be positive");
  if (beta == 0.0) return p.f_ref_khz;
  return std::sqrt(std::pow(static_cast<double>(n), beta) * std::log1p(eps0) / p.c1);
}

double log_absorption_exponential(double f_khz, const PhysicalParams& p) {
  require_positive_frequency(f_khz);
  return log_absorption_coeff(p.f_ref_khz, p) + p.c1 * (f_khz * f_khz - p.f_ref_khz * p.f_ref_khz);
}

ChannelState empirical_state(double f_khz, const PhysicalParams& p) {
  return {f_khz, log_absorption_coeff(f_khz, p), noise_psd(f_khz, p)};
}

ChannelState regime_state(std::size_t n, double beta, double eps0, const PhysicalParams& p) {
  const double f = frequency_for_regime(n, beta, eps0, p);
  const double log_a = log_absorption_exponential(f, p);
  if (!(log_a > 0.0)) throw std::domain_error("regime absorption must exceed 1; check c1 against f_ref");
  return {f, log_a, noise_psd(f, p)};
}

ChannelState fixed_state(double a, double noise, double f_khz) {
  if (!(a > 1.0)) throw std::domain_error("absorption coefficient must exceed 1");
  if (!(noise > 0.0)) throw std::domain_error("noise must be positive");
  return {f_khz, std::log(a), noise};
}

}  // namespace aquascale
