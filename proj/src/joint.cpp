#include "rrm/joint.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "rrm/scheduling.hpp"

namespace rrm::joint {

void JointConfig::validate() const {
  if (max_iters < 1) throw ConfigError("joint.max_iters must be >= 1");
  if (!(convergence_tol >= 0.0)) throw ConfigError("joint.convergence_tol must be >= 0");
  if (!(rounding_threshold > 0.0 && rounding_threshold < 1.0)) {
    throw ConfigError("joint.rounding_threshold must lie in (0, 1)");
  }
}

bool can_participate(const Device& dev, const SystemParams& params) {
  return allowed_upload_time(dev, params) > 0.0 && dev.channel_gain > 0.0;
}

std::vector<double> initial_beta(std::span<const Device> devices, const SystemParams& params,
                                 const JointConfig& cfg) {
  std::vector<double> beta(devices.size(), 1.0);
  if (cfg.init_mode == InitMode::random_uniform) {
    std::mt19937_64 rng(cfg.rng_seed);
    // (0, 1] from the top 53 bits, so no device starts frozen at exactly 0.
    for (double& b : beta) b = static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
  }
  for (std::size_t k = 0; k < devices.size(); ++k) {
    if (!can_participate(devices[k], params)) beta[k] = 0.0;
  }
  return beta;
}

double relaxed_objective(std::span<const Device> devices, const SystemParams& params,
                         std::span<const double> gamma, std::span<const double> beta) {
  double value = 0.0;
  for (std::size_t k = 0; k < devices.size(); ++k) {
    if (beta[k] == 0.0) continue;
    const double tk = allowed_upload_time(devices[k], params);
    value += upload_energy(devices[k], params, gamma[k], tk, beta[k]) - params.tradeoff * beta[k];
  }
  return value;
}

namespace {

// Priorities below this are treated as unscheduled. They only arise from
// geometric decay over iterations, and left alone they underflow gamma to 0.
constexpr double kPriorityFloor = 1e-12;

bool all_zero(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double b) { return b == 0.0; });
}

}  // namespace

JointResult solve_joint(std::span<const Device> devices, const SystemParams& params,
                        const JointConfig& cfg) {
  params.validate();
  cfg.validate();
  if (devices.empty()) throw DimensionError("solve_joint: no devices");
  for (const Device& d : devices) d.validate();

  const std::size_t k_all = devices.size();
  std::vector<double> allowed(k_all);
  std::vector<bool> frozen(k_all);
  for (std::size_t k = 0; k < k_all; ++k) {
    allowed[k] = std::max(allowed_upload_time(devices[k], params), 0.0);
    frozen[k] = !can_participate(devices[k], params);
  }

  JointResult result;
  std::vector<double> beta = initial_beta(devices, params, cfg);

  for (int it = 0; it < cfg.max_iters; ++it) {
    if (all_zero(beta)) {
      result.converged = true;
      break;
    }
    auto [alloc, dual] = bandwidth::solve_p1(devices, params, beta);
    result.objective_trajectory.push_back(relaxed_objective(devices, params, alloc.gamma, beta));

    auto next = scheduling::schedule_all(devices, params, alloc.gamma, allowed).beta;
    for (std::size_t k = 0; k < k_all; ++k) {
      if (frozen[k] || next[k] < kPriorityFloor) next[k] = 0.0;
    }
    result.objective_trajectory.push_back(relaxed_objective(devices, params, alloc.gamma, next));

    double change = 0.0;
    for (std::size_t k = 0; k < k_all; ++k) change = std::max(change, std::abs(next[k] - beta[k]));
    beta = std::move(next);
    result.iterations_used = it + 1;
    if (cfg.record_trajectory) result.relaxed_trajectory.push_back(beta);
    if (change <= cfg.convergence_tol) {
      result.converged = true;
      break;
    }
  }
  result.relaxed_beta = beta;

  std::vector<double> rounded(k_all);
  for (std::size_t k = 0; k < k_all; ++k) {
    rounded[k] = beta[k] >= cfg.rounding_threshold ? 1.0 : 0.0;
  }
  if (all_zero(rounded)) {
    result.final = Allocation::empty(k_all);
    result.final.upload_time = allowed;
    result.objective = 0.0;
    return result;
  }
  auto [alloc, dual] = bandwidth::solve_p1(devices, params, rounded);
  result.objective = alloc.total_upload_energy() - params.tradeoff * alloc.scheduled_count();
  result.final = std::move(alloc);
  result.final_dual = dual;
  return result;
}

}  // namespace rrm::joint
