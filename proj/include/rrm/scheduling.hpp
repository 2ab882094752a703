#pragma once

#include <span>
#include <vector>

#include "rrm/model.hpp"

namespace rrm::scheduling {

/// Relaxed selection priorities for a fixed bandwidth allocation.
struct PriorityResult {
  std::vector<double> beta;       ///< clamped to [0, 1]
  std::vector<double> unclamped;  ///< stationary points before projection
};

/**
 * Stationary point of the per-device scheduling objective
 *
 *   J_k(beta) = (gamma B T_k N0 / h^2)(2^{beta L / (gamma B T_k)} - 1) - lambda beta,
 *
 * i.e. (gamma B T_k / L) log2(lambda h^2 / (N0 L ln 2)). Zero for gamma <= 0 or
 * T_k <= 0 (no bandwidth or no time means nothing can be uploaded).
 */
double stationary_priority(const Device& dev, const SystemParams& params, double gamma,
                           double t_allowed);

/// Stationary point projected onto [0, 1]. Throws DomainError if lambda <= 0.
double priority(const Device& dev, const SystemParams& params, double gamma, double t_allowed);

/// priority() for every device, vectorized through the active kernel table.
PriorityResult schedule_all(std::span<const Device> devices, const SystemParams& params,
                            std::span<const double> gammas, std::span<const double> t_allowed);

/// J_k(beta) for one device, evaluated with t = t_allowed.
double device_objective(const Device& dev, const SystemParams& params, double gamma,
                        double t_allowed, double beta);

}  // namespace rrm::scheduling
