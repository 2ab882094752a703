#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "rrm/model.hpp"

namespace rrm::test {

// Upload energy evaluated the obvious way, independent of the library's expm1 path.
inline double naive_energy(double h2, const SystemParams& p, double gamma, double t, double beta) {
  if (beta == 0.0) return 0.0;
  return gamma * p.bandwidth * t * p.noise / h2 * (std::pow(2.0, beta * p.model_size / (gamma * p.bandwidth * t)) - 1.0);
}

inline Device device_with(double power_gain, double compute_time, int id = 0) {
  return Device{id, std::sqrt(power_gain), compute_time};
}

inline SystemParams reference_params(double round_time = 0.02, double lambda = 1.0) {
  SystemParams p;
  p.bandwidth = 1e6;
  p.noise = 1e-8;
  p.model_size = 1e4;
  p.round_time = round_time;
  p.tradeoff = lambda;
  return p;
}

inline std::vector<Device> random_devices(std::mt19937_64& rng, int k) {
  std::exponential_distribution<double> fade(1.0);
  std::uniform_real_distribution<double> comp(0.0, 0.010);
  std::vector<Device> out;
  for (int i = 0; i < k; ++i) out.push_back(device_with(1e-4 * std::max(fade(rng), 1e-6), comp(rng), i));
  return out;
}

}  // namespace rrm::test
