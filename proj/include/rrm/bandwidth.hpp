#pragma once

#include <span>
#include <utility>
#include <vector>

#include "rrm/kernels.hpp"
#include "rrm/model.hpp"

namespace rrm::bandwidth {

/// Diagnostics of the dual search for the multiplier of sum(gamma) = 1.
struct DualSolveReport {
  double nu_star = 0.0;
  int iterations = 0;
  double residual = 0.0;  ///< |sum gamma(nu*) - 1|
};

struct SolveOptions {
  double tolerance = 1e-12;  ///< on |sum gamma - 1|
  int max_expansions = 200;
};

/**
 * Closed-form bandwidth share of one device at dual value nu:
 *
 *   gamma = beta L ln2 / (B T_k [1 + W0((h^2 nu - B T_k N0) / (B T_k N0 e))])
 *
 * Zero when beta == 0, kernels::kUnboundedDemand at nu == 0. Throws DomainError
 * for a scheduled device with T_k <= 0, h == 0, or nu < 0.
 */
double gamma_of_nu(const Device& dev, const SystemParams& params, double beta, double nu);

/// Dual value at which a device with share gamma sits on its stationarity condition.
double nu_for_gamma(const Device& dev, const SystemParams& params, double beta, double gamma);

/**
 * KKT stationarity residual of the energy-minimizing bandwidth problem for one
 * scheduled device, with mu_k = 0:
 *
 *   (B T_k N0 / h^2)(2^x - x ln2 2^x - 1) + nu,   x = beta L / (gamma B T_k)
 *
 * normalized by max(|nu|, |first term|).
 */
double stationarity_residual(const Device& dev, const SystemParams& params, double beta,
                             double gamma, double nu);

/**
 * Optimal bandwidth fractions and upload times for a fixed (possibly relaxed)
 * schedule beta: t_k = T_k and gamma from the closed form, with the multiplier
 * found by bisection on the strictly decreasing map nu -> sum gamma(nu).
 *
 * Throws InfeasibleError when no beta_k > 0, DomainError when a scheduled
 * device has T_k <= 0 or a zero channel.
 */
std::pair<Allocation, DualSolveReport> solve_p1(std::span<const Device> devices,
                                                const SystemParams& params,
                                                std::span<const double> beta,
                                                const SolveOptions& opts = {});

/// Equal split gamma = 1/K over all devices, t_k = T_k for scheduled ones.
Allocation uniform_baseline(std::span<const Device> devices, const SystemParams& params,
                            std::span<const double> beta);

}  // namespace rrm::bandwidth
