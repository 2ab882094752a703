#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rrm/errors.hpp"

namespace rrm {

/// An edge device taking part in one communication round.
struct Device {
  int id = 0;
  double channel_gain = 0.0;  ///< amplitude h_k; power gain is h_k^2
  double compute_time = 0.0;  ///< local training time in seconds

  [[nodiscard]] double power_gain() const { return channel_gain * channel_gain; }
  void validate() const;
};

/// Round-wide constants, SI units.
struct SystemParams {
  double bandwidth = 1e6;       ///< B, Hz
  double noise = 1e-8;          ///< N0, W
  double model_size = 1e4;      ///< L, bits
  double round_time = 0.02;     ///< T, s
  double tradeoff = 1.0;        ///< lambda, J per scheduled device
  double compute_energy = 0.0;  ///< E^comp, J per scheduled device

  void validate() const;
};

/// Default exponent cap of the energy formula (2^x with x <= cap).
inline constexpr double kDefaultExponentCap = 1024.0;

/// Per-device outcome of an allocation. All vectors have one entry per device.
struct Allocation {
  std::vector<double> gamma;
  std::vector<double> upload_time;
  std::vector<double> beta;
  std::vector<double> energy;  ///< E_k^up, J
  std::vector<double> power;   ///< transmit PSD p_k, W/Hz

  [[nodiscard]] std::size_t size() const { return gamma.size(); }
  [[nodiscard]] double total_upload_energy() const;
  [[nodiscard]] double scheduled_count() const;

  static Allocation empty(std::size_t k);
};

/// T - t_k^comp. Nonpositive means the device cannot upload this round.
double allowed_upload_time(const Device& dev, const SystemParams& params);

/// Exponent beta L / (gamma B t) of the energy formula.
double rate_exponent(const SystemParams& params, double gamma, double t, double beta);

/**
 * Upload energy (gamma B t N0 / h^2)(2^{beta L/(gamma B t)} - 1).
 *
 * Exactly zero when beta == 0. Throws DomainError for h == 0 with beta > 0
 * or nonpositive gamma/t with beta > 0, OverflowError when the exponent
 * exceeds exponent_cap or the result is not finite.
 */
double upload_energy(const Device& dev, const SystemParams& params, double gamma, double t,
                     double beta, double exponent_cap = kDefaultExponentCap);

/// Transmit power spectral density p_k = (N0/h^2)(2^x - 1) implied by the energy formula.
double transmit_psd(const Device& dev, const SystemParams& params, double gamma, double t,
                    double beta, double exponent_cap = kDefaultExponentCap);

/// sum_k E_k^up - lambda sum_k beta_k, recomputing energies from (gamma, t, beta).
double total_objective(std::span<const Device> devices, const SystemParams& params,
                       const Allocation& alloc);

/// Energy actually spent in the round: sum_k E_k^up + E^comp * sum_k beta_k.
double reported_energy(const SystemParams& params, const Allocation& alloc);

/// Fills energy and power for every entry from (gamma, upload_time, beta).
void fill_energies(std::span<const Device> devices, const SystemParams& params, Allocation& alloc);

}  // namespace rrm
