#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rrm/bandwidth.hpp"
#include "rrm/model.hpp"

namespace rrm::joint {

enum class InitMode { random_uniform, all_ones };

struct JointConfig {
  int max_iters = 200;
  double convergence_tol = 1e-6;    ///< on max_k |beta_k - beta_k'| between iterations
  double rounding_threshold = 0.5;  ///< beta >= threshold rounds to 1
  InitMode init_mode = InitMode::random_uniform;
  std::uint64_t rng_seed = 1;
  bool record_trajectory = true;

  void validate() const;
};

struct JointResult {
  Allocation final;                 ///< binary schedule with its optimal bandwidth split
  std::vector<double> relaxed_beta; ///< priorities at the end of the alternation
  std::vector<std::vector<double>> relaxed_trajectory;  ///< beta after every iteration
  /// Relaxed objective after every half-step (bandwidth, scheduling, bandwidth, ...).
  std::vector<double> objective_trajectory;
  bandwidth::DualSolveReport final_dual;
  int iterations_used = 0;
  bool converged = false;
  double objective = 0.0;  ///< sum E^up - lambda sum beta of the final binary allocation

  [[nodiscard]] double scheduled_count() const { return final.scheduled_count(); }
};

/// True when a device can take part in a round at all (T_k > 0 and h > 0).
bool can_participate(const Device& dev, const SystemParams& params);

/// Starting priorities; devices that cannot participate start (and stay) at 0.
std::vector<double> initial_beta(std::span<const Device> devices, const SystemParams& params,
                                 const JointConfig& cfg);

/**
 * Relaxation-and-rounding for joint bandwidth allocation and scheduling.
 *
 * Alternates the closed-form bandwidth step (beta fixed) and the closed-form
 * priority step (gamma, t fixed) until the priorities move by at most
 * convergence_tol or max_iters is reached, then rounds at rounding_threshold
 * and re-solves the bandwidth split for the binary schedule. An all-zero
 * rounded schedule yields the empty allocation with objective 0.
 */
JointResult solve_joint(std::span<const Device> devices, const SystemParams& params,
                        const JointConfig& cfg);

/// Relaxed objective for given priorities and bandwidth split, t_k = T_k.
double relaxed_objective(std::span<const Device> devices, const SystemParams& params,
                         std::span<const double> gamma, std::span<const double> beta);

}  // namespace rrm::joint
