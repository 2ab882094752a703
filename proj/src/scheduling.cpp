#include "rrm/scheduling.hpp"

#include <algorithm>
#include <string>

#include "rrm/kernels.hpp"

namespace rrm::scheduling {

namespace {

void require_tradeoff(const SystemParams& params) {
  if (!(params.tradeoff > 0.0)) throw DomainError("scheduling: lambda must be positive");
}

double clamp01(double v) { return std::min(std::max(v, 0.0), 1.0); }

}  // namespace

double stationary_priority(const Device& dev, const SystemParams& params, double gamma,
                           double t_allowed) {
  require_tradeoff(params);
  const double h2 = dev.power_gain();
  double out = 0.0;
  kernels::active().stationary_priority({&h2, 1}, {&t_allowed, 1}, {&gamma, 1},
                                        {params.bandwidth, params.noise, params.model_size},
                                        params.tradeoff, {&out, 1});
  return out;
}

double priority(const Device& dev, const SystemParams& params, double gamma, double t_allowed) {
  return clamp01(stationary_priority(dev, params, gamma, t_allowed));
}

PriorityResult schedule_all(std::span<const Device> devices, const SystemParams& params,
                            std::span<const double> gammas, std::span<const double> t_allowed) {
  require_tradeoff(params);
  if (gammas.size() != devices.size() || t_allowed.size() != devices.size()) {
    throw DimensionError("schedule_all: gamma/time vectors do not match " +
                         std::to_string(devices.size()) + " devices");
  }
  std::vector<double> h2(devices.size());
  std::transform(devices.begin(), devices.end(), h2.begin(), [](const Device& d) { return d.power_gain(); });

  PriorityResult result;
  result.unclamped.resize(devices.size());
  kernels::active().stationary_priority(h2, t_allowed, gammas,
                                        {params.bandwidth, params.noise, params.model_size},
                                        params.tradeoff, result.unclamped);
  result.beta.resize(devices.size());
  std::transform(result.unclamped.begin(), result.unclamped.end(), result.beta.begin(), clamp01);
  return result;
}

double device_objective(const Device& dev, const SystemParams& params, double gamma,
                        double t_allowed, double beta) {
  return upload_energy(dev, params, gamma, t_allowed, beta) - params.tradeoff * beta;
}

}  // namespace rrm::scheduling
