#include "rrm/model.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace rrm {

void Device::validate() const {
  if (!(channel_gain >= 0.0) || !std::isfinite(channel_gain)) {
    throw DomainError("device " + std::to_string(id) + ": channel gain must be finite and >= 0");
  }
  if (!(compute_time >= 0.0) || !std::isfinite(compute_time)) {
    throw DomainError("device " + std::to_string(id) + ": compute time must be finite and >= 0");
  }
}

void SystemParams::validate() const {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(bandwidth)) throw DomainError("bandwidth must be positive");
  if (!positive(noise)) throw DomainError("noise must be positive");
  if (!positive(model_size)) throw DomainError("model_size must be positive");
  if (!positive(round_time)) throw DomainError("round_time must be positive");
  if (!positive(tradeoff)) throw DomainError("tradeoff (lambda) must be positive");
  if (!(compute_energy >= 0.0) || !std::isfinite(compute_energy)) {
    throw DomainError("compute_energy must be finite and >= 0");
  }
}

double Allocation::total_upload_energy() const {
  return std::accumulate(energy.begin(), energy.end(), 0.0);
}

double Allocation::scheduled_count() const { return std::accumulate(beta.begin(), beta.end(), 0.0); }

Allocation Allocation::empty(std::size_t k) {
  Allocation a;
  a.gamma.assign(k, 0.0);
  a.upload_time.assign(k, 0.0);
  a.beta.assign(k, 0.0);
  a.energy.assign(k, 0.0);
  a.power.assign(k, 0.0);
  return a;
}

double allowed_upload_time(const Device& dev, const SystemParams& params) {
  return params.round_time - dev.compute_time;
}

double rate_exponent(const SystemParams& params, double gamma, double t, double beta) {
  return beta * params.model_size / (gamma * params.bandwidth * t);
}

namespace {

double checked_exponent(const Device& dev, const SystemParams& params, double gamma, double t,
                        double beta, double cap) {
  if (dev.channel_gain == 0.0) {
    throw DomainError("device " + std::to_string(dev.id) +
                      ": zero channel gain cannot carry a nonzero payload");
  }
  if (!(gamma > 0.0) || !(t > 0.0)) {
    throw DomainError("device " + std::to_string(dev.id) +
                      ": scheduled device needs positive bandwidth and upload time");
  }
  const double x = rate_exponent(params, gamma, t, beta);
  if (!(x <= cap)) {
    throw OverflowError("device " + std::to_string(dev.id) + ": energy exponent " +
                        std::to_string(x) + " exceeds cap " + std::to_string(cap));
  }
  return x;
}

}  // namespace

double upload_energy(const Device& dev, const SystemParams& params, double gamma, double t,
                     double beta, double exponent_cap) {
  if (beta == 0.0) return 0.0;
  const double x = checked_exponent(dev, params, gamma, t, beta, exponent_cap);
  const double e = gamma * params.bandwidth * t * params.noise / dev.power_gain() * std::expm1(x * std::numbers::ln2);
  if (!std::isfinite(e)) {
    throw OverflowError("device " + std::to_string(dev.id) + ": energy not representable");
  }
  return e;
}

double transmit_psd(const Device& dev, const SystemParams& params, double gamma, double t,
                    double beta, double exponent_cap) {
  if (beta == 0.0) return 0.0;
  const double x = checked_exponent(dev, params, gamma, t, beta, exponent_cap);
  return params.noise / dev.power_gain() * std::expm1(x * std::numbers::ln2);
}

void fill_energies(std::span<const Device> devices, const SystemParams& params, Allocation& alloc) {
  const std::size_t k = devices.size();
  alloc.energy.assign(k, 0.0);
  alloc.power.assign(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    alloc.energy[i] = upload_energy(devices[i], params, alloc.gamma[i], alloc.upload_time[i], alloc.beta[i]);
    alloc.power[i] = transmit_psd(devices[i], params, alloc.gamma[i], alloc.upload_time[i], alloc.beta[i]);
  }
}

double total_objective(std::span<const Device> devices, const SystemParams& params,
                       const Allocation& alloc) {
  if (alloc.gamma.size() != devices.size() || alloc.beta.size() != devices.size() ||
      alloc.upload_time.size() != devices.size()) {
    throw DimensionError("total_objective: allocation does not match device count");
  }
  double energy = 0.0;
  double scheduled = 0.0;
  for (std::size_t i = 0; i < devices.size(); ++i) {
    energy += upload_energy(devices[i], params, alloc.gamma[i], alloc.upload_time[i], alloc.beta[i]);
    scheduled += alloc.beta[i];
  }
  return energy - params.tradeoff * scheduled;
}

double reported_energy(const SystemParams& params, const Allocation& alloc) {
  return alloc.total_upload_energy() + params.compute_energy * alloc.scheduled_count();
}

}  // namespace rrm
