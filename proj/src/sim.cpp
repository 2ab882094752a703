#include "rrm/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <string>
#include <thread>

#include "rrm/bandwidth.hpp"

namespace rrm::sim {

namespace {

/// Open-interval uniform (0, 1) from the top 53 bits.
double uniform_open(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

/// Runs fn(i) for i in [0, n) on a small pool; rethrows the first failure.
template <class Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  const int workers = std::max(1, std::min(n, threads > 0 ? threads
                                                          : static_cast<int>(std::thread::hardware_concurrency())));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto body = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::jthread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

struct TrialPoint {
  double proposed = 0.0;
  double baseline = 0.0;
  double scheduled = 0.0;
};

std::vector<SweepResult> reduce(const ScenarioConfig& cfg, const std::vector<std::vector<TrialPoint>>& grid) {
  std::vector<SweepResult> rows;
  const double n = static_cast<double>(cfg.trials);
  for (std::size_t j = 0; j < cfg.t_sweep.size(); ++j) {
    SweepResult row;
    row.T = cfg.t_sweep[j];
    // Sum in trial order so the result does not depend on thread scheduling.
    for (int trial = 0; trial < cfg.trials; ++trial) {
      row.mean_total_energy_proposed += grid[trial][j].proposed;
      row.mean_total_energy_baseline += grid[trial][j].baseline;
      row.mean_scheduled_count += grid[trial][j].scheduled;
    }
    row.mean_total_energy_proposed /= n;
    row.mean_total_energy_baseline /= n;
    row.mean_scheduled_count /= n;
    row.energy_reduction_ratio = reduction_ratio(row.mean_total_energy_baseline, row.mean_total_energy_proposed);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

void ScenarioConfig::validate() const {
  if (num_devices < 1) throw ConfigError("scenario.num_devices must be >= 1");
  if (!(path_loss > 0.0)) throw ConfigError("scenario.path_loss must be positive");
  if (!(compute_lo >= 0.0) || !(compute_hi > compute_lo)) {
    throw ConfigError("scenario.compute_time_range must satisfy 0 <= lo < hi");
  }
  if (trials < 1) throw ConfigError("scenario.trials must be >= 1");
  if (t_sweep.empty()) throw ConfigError("scenario.t_sweep must not be empty");
  for (double t : t_sweep) {
    if (!(t > 0.0)) throw ConfigError("scenario.t_sweep entries must be positive");
  }
  try {
    params.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("params: ") + e.what());
  }
  joint.validate();
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<Device> generate_population(const ScenarioConfig& cfg, int trial) {
  if (!cfg.fixed_population.empty()) return cfg.fixed_population;
  std::mt19937_64 rng(stream_seed(cfg.rng_seed, static_cast<std::uint64_t>(trial)));
  std::vector<Device> devices(static_cast<std::size_t>(cfg.num_devices));
  for (int k = 0; k < cfg.num_devices; ++k) {
    const double power_gain = -cfg.path_loss * std::log(uniform_open(rng));
    const double compute = cfg.compute_lo + (cfg.compute_hi - cfg.compute_lo) * uniform_open(rng);
    devices[k] = Device{k, std::sqrt(power_gain), compute};
  }
  return devices;
}

double reduction_ratio(double baseline, double proposed) {
  return baseline > 0.0 ? (baseline - proposed) / baseline : 0.0;
}

std::vector<SweepResult> run_sweep_allocation(const ScenarioConfig& cfg) {
  cfg.validate();
  double slowest = cfg.compute_hi;
  if (!cfg.fixed_population.empty()) {
    slowest = std::max_element(cfg.fixed_population.begin(), cfg.fixed_population.end(),
                               [](const Device& a, const Device& b) { return a.compute_time < b.compute_time; })
                  ->compute_time;
  }
  for (double t : cfg.t_sweep) {
    if (!(t > slowest)) {
      throw ConfigError("allocation sweep needs every T above the largest compute time (" +
                        std::to_string(slowest) + " s), got " + std::to_string(t));
    }
  }
  std::vector<std::vector<TrialPoint>> grid(cfg.trials, std::vector<TrialPoint>(cfg.t_sweep.size()));
  parallel_for(cfg.trials, cfg.threads, [&](int trial) {
    const auto devices = generate_population(cfg, trial);
    const std::vector<double> beta(devices.size(), 1.0);
    for (std::size_t j = 0; j < cfg.t_sweep.size(); ++j) {
      SystemParams p = cfg.params;
      p.round_time = cfg.t_sweep[j];
      const auto [opt, dual] = bandwidth::solve_p1(devices, p, beta);
      const auto uni = bandwidth::uniform_baseline(devices, p, beta);
      grid[trial][j] = {reported_energy(p, opt), reported_energy(p, uni), opt.scheduled_count()};
    }
  });
  return reduce(cfg, grid);
}

std::vector<SweepResult> run_sweep_joint(const ScenarioConfig& cfg, double lambda) {
  cfg.validate();
  if (!(lambda > 0.0)) throw ConfigError("joint sweep needs lambda > 0");
  std::vector<std::vector<TrialPoint>> grid(cfg.trials, std::vector<TrialPoint>(cfg.t_sweep.size()));
  parallel_for(cfg.trials, cfg.threads, [&](int trial) {
    const auto devices = generate_population(cfg, trial);
    joint::JointConfig jc = cfg.joint;
    jc.rng_seed = stream_seed(cfg.joint.rng_seed, static_cast<std::uint64_t>(trial));
    jc.record_trajectory = false;
    for (std::size_t j = 0; j < cfg.t_sweep.size(); ++j) {
      SystemParams p = cfg.params;
      p.round_time = cfg.t_sweep[j];
      p.tradeoff = lambda;

      std::vector<double> all(devices.size());
      for (std::size_t k = 0; k < devices.size(); ++k) {
        all[k] = joint::can_participate(devices[k], p) ? 1.0 : 0.0;
      }
      double baseline = 0.0;
      if (std::any_of(all.begin(), all.end(), [](double b) { return b > 0.0; })) {
        baseline = reported_energy(p, bandwidth::solve_p1(devices, p, all).first);
      }
      const auto proposed = joint::solve_joint(devices, p, jc);
      grid[trial][j] = {reported_energy(p, proposed.final), baseline, proposed.scheduled_count()};
    }
  });
  return reduce(cfg, grid);
}

double calibrate_lambda(const ScenarioConfig& cfg, double target_fraction, double lo, double hi, int steps) {
  if (!(target_fraction > 0.0 && target_fraction <= 1.0)) {
    throw ConfigError("calibrate_lambda: target fraction must lie in (0, 1]");
  }
  ScenarioConfig probe = cfg;
  probe.t_sweep = {*std::max_element(cfg.t_sweep.begin(), cfg.t_sweep.end())};
  auto fraction = [&](double lambda) {
    const double k = probe.fixed_population.empty() ? cfg.num_devices : probe.fixed_population.size();
    return run_sweep_joint(probe, lambda).front().mean_scheduled_count / k;
  };
  double log_lo = std::log(lo);
  double log_hi = std::log(hi);
  for (int i = 0; i < steps; ++i) {
    const double mid = 0.5 * (log_lo + log_hi);
    if (fraction(std::exp(mid)) >= target_fraction) {
      log_hi = mid;
    } else {
      log_lo = mid;
    }
  }
  return std::exp(log_hi);
}

}  // namespace rrm::sim
