#pragma once

#include <cstdint>
#include <vector>

#include "rrm/joint.hpp"
#include "rrm/model.hpp"

namespace rrm::sim {

/// Tradeoff factor used by joint sweeps when none is given.
/// calibrate_lambda(ScenarioConfig{}, 0.9, 1e2, 1e4, 16) returns 1530.33: at
/// T = 50 ms about 90% of the 50 devices are then scheduled.
inline constexpr double kDefaultLambda = 1530.0;

struct ScenarioConfig {
  int num_devices = 50;
  double path_loss = 1e-4;      ///< mean channel power gain E[h^2]
  double compute_lo = 0.0;      ///< local training time ~ U(lo, hi], s
  double compute_hi = 0.010;
  SystemParams params;          ///< round_time is overridden by each sweep point
  std::vector<double> t_sweep{0.012, 0.015, 0.020, 0.030, 0.050};
  int trials = 100;
  std::uint64_t rng_seed = 1;
  joint::JointConfig joint;     ///< per-trial seeds are derived from joint.rng_seed
  int threads = 0;              ///< 0: hardware concurrency
  std::vector<Device> fixed_population;  ///< when set, every trial reuses it instead of sampling

  void validate() const;
};

struct SweepResult {
  double T = 0.0;
  double mean_total_energy_proposed = 0.0;
  double mean_total_energy_baseline = 0.0;
  double mean_scheduled_count = 0.0;
  double energy_reduction_ratio = 0.0;
};

/// Mixes (seed, stream) into an independent 64-bit seed (SplitMix64 finalizer).
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream);

/**
 * Random device population for one trial: h^2 = path_loss * Exp(1) (Rayleigh
 * amplitude), compute time uniform on (lo, hi). Identical for identical
 * (rng_seed, trial). Returns cfg.fixed_population when that is set.
 */
std::vector<Device> generate_population(const ScenarioConfig& cfg, int trial);

/// All devices scheduled: optimal split vs equal split at every T.
std::vector<SweepResult> run_sweep_allocation(const ScenarioConfig& cfg);

/// Joint scheduling vs scheduling every device that can participate.
std::vector<SweepResult> run_sweep_joint(const ScenarioConfig& cfg, double lambda);

/// (E_baseline - E_proposed) / E_baseline, or 0 when the baseline spends nothing.
double reduction_ratio(double baseline, double proposed);

/**
 * Finds lambda (log-scale bisection on [lo, hi]) such that the mean scheduled
 * fraction at the largest T of cfg.t_sweep reaches target_fraction.
 */
double calibrate_lambda(const ScenarioConfig& cfg, double target_fraction, double lo = 1e-2,
                        double hi = 1e6, int steps = 30);

}  // namespace rrm::sim
