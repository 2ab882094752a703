#include "rrm/validate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "rrm/bandwidth.hpp"
#include "rrm/joint.hpp"
#include "rrm/numerics.hpp"
#include "rrm/oracle.hpp"
#include "rrm/scheduling.hpp"
#include "rrm/sim.hpp"

namespace rrm::validate {

double InstanceSampler::uniform(double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng_() >> 11) + 0.5) * 0x1.0p-53;
}

std::vector<Device> InstanceSampler::devices(int count) {
  std::vector<Device> out;
  for (int k = 0; k < count; ++k) {
    const double power_gain = -1e-4 * std::log(uniform(0.0, 1.0));
    out.push_back(Device{k, std::sqrt(power_gain), uniform(0.0, 0.010)});
  }
  return out;
}

SystemParams InstanceSampler::params(double t_lo, double t_hi) {
  SystemParams p;
  p.round_time = uniform(t_lo, t_hi);
  p.tradeoff = sim::kDefaultLambda;
  return p;
}

namespace {

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

CheckResult finish(std::string name, double worst, double tol, int cases, const Timer& t) {
  return {std::move(name), worst <= tol, worst, tol, cases, t.seconds()};
}

CheckResult check_lambert(int points) {
  Timer t;
  const double lo = std::log(1e-12);
  const double hi = std::log(1e9 - numerics::kBranchPoint);
  std::vector<double> x(points), w(points);
  for (int i = 0; i < points; ++i) {
    x[i] = numerics::kBranchPoint + std::exp(lo + (hi - lo) * i / (points - 1));
  }
  kernels::active().lambert_w0(x, w);
  double worst = 0.0;
  for (int i = 0; i < points; ++i) {
    const double r = std::abs(w[i] * std::exp(w[i]) - x[i]) / std::max(std::abs(x[i]), 1e-300);
    worst = std::max(worst, std::isnan(r) ? INFINITY : r);
  }
  return finish("lambert_w0 relative residual", worst, 1e-10, points, t);
}

CheckResult check_p1_grid(int instances, std::uint64_t seed) {
  Timer t;
  InstanceSampler s(seed);
  double worst = 0.0;
  for (int i = 0; i < instances; ++i) {
    const auto devices = s.devices(2 + i % 2);
    const auto params = s.params();
    const std::vector<double> beta(devices.size(), 1.0);
    const double closed = bandwidth::solve_p1(devices, params, beta).first.total_upload_energy();
    const auto grid = oracle::oracle_p1(devices, params, beta,
                                        oracle::GridSpec::for_dimension(static_cast<int>(devices.size()) - 1));
    worst = std::max(worst, std::abs(closed - grid.objective) / grid.objective);
  }
  return finish("bandwidth split vs simplex grid (rel. energy)", worst, 1e-4, instances, t);
}

std::pair<CheckResult, CheckResult> check_kkt(int instances, std::uint64_t seed) {
  Timer t;
  InstanceSampler s(seed);
  double worst_stat = 0.0;
  double worst_sum = 0.0;
  for (int i = 0; i < instances; ++i) {
    const int k = 2 + static_cast<int>(s.uniform(0.0, 49.0));
    const auto devices = s.devices(k);
    const auto params = s.params();
    std::vector<double> beta(k, 1.0);
    if (i % 2 == 1) {
      for (double& b : beta) b = s.uniform(0.05, 1.0);
    }
    const auto [alloc, dual] = bandwidth::solve_p1(devices, params, beta);
    double sum = 0.0;
    for (int j = 0; j < k; ++j) {
      sum += alloc.gamma[j];
      const double r = bandwidth::stationarity_residual(devices[j], params, beta[j], alloc.gamma[j], dual.nu_star);
      worst_stat = std::max(worst_stat, std::isnan(r) ? INFINITY : std::abs(r));
    }
    worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
  }
  const double secs = t.seconds();
  return {CheckResult{"KKT stationarity (rel. residual)", worst_stat <= 1e-6, worst_stat, 1e-6, instances, secs},
          CheckResult{"bandwidth shares sum to one", worst_sum <= 1e-9, worst_sum, 1e-9, instances, secs}};
}

CheckResult check_priority(int tuples, std::uint64_t seed) {
  Timer t;
  InstanceSampler s(seed);
  const oracle::GridSpec grid{2000, 4};
  double worst = 0.0;
  for (int i = 0; i < tuples; ++i) {
    const Device dev = s.devices(1).front();
    SystemParams params = s.params();
    const double tk = allowed_upload_time(dev, params);
    const double gamma = s.uniform(0.005, 0.5);
    // Pick lambda so the stationary point lands in [-0.5, 1.5]: all three clamp cases.
    const double target = s.uniform(-0.5, 1.5);
    const double exponent = target * params.model_size / (gamma * params.bandwidth * tk);
    params.tradeoff = params.noise * params.model_size * std::numbers::ln2 / dev.power_gain() * std::exp2(exponent);
    const double closed = scheduling::priority(dev, params, gamma, tk);
    const double scan = oracle::oracle_p4(dev, params, gamma, tk, params.tradeoff, grid).beta;
    worst = std::max(worst, std::abs(closed - scan));
  }
  return finish("priority vs 1-D scan (abs. beta)", worst, 1e-6, tuples, t);
}

// The alternation creeps near rounding boundaries; 200 steps can stop short.
constexpr int kJointIterBudget = 5000;

CheckResult check_joint(int instances, int k, std::uint64_t seed) {
  Timer t;
  sim::ScenarioConfig sc;
  sc.num_devices = k;
  sc.rng_seed = seed;
  double worst = 0.0;
  for (int i = 0; i < instances; ++i) {
    const auto devices = sim::generate_population(sc, i);
    SystemParams params;
    params.round_time = 0.012;
    params.tradeoff = sim::kDefaultLambda;
    joint::JointConfig jc;
    jc.rng_seed = sim::stream_seed(seed, static_cast<std::uint64_t>(i));
    jc.record_trajectory = false;
    jc.max_iters = kJointIterBudget;
    const double heuristic = joint::solve_joint(devices, params, jc).objective;
    const double best = oracle::oracle_p2_exhaustive(devices, params, params.tradeoff).objective;
    const double gap = best < 0.0 ? (heuristic - best) / -best : heuristic - best;
    worst = std::max(worst, gap);
  }
  return finish("joint rounding vs exhaustive (rel. gap)", worst, 0.05, instances, t);
}

double w_faulty(double x) { return numerics::lambert_w0(x) * (1.0 + 1e-3); }

void w0_faulty(std::span<const double> x, std::span<double> out) {
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = w_faulty(x[i]);
}

double gamma_faulty_one(double h2, double tk, double beta, const kernels::BandParams& p, double nu) {
  if (beta == 0.0) return 0.0;
  const double bt = p.bandwidth * tk;
  const double denom = 1.0 + w_faulty((h2 * nu / (bt * p.noise) - 1.0) * numerics::kInvE);
  if (denom <= 0.0) return kernels::kUnboundedDemand;
  return beta * p.model_size * std::numbers::ln2 / (bt * denom);
}

void gamma_faulty(const kernels::DeviceBlock& b, const kernels::BandParams& p, double nu, std::span<double> out) {
  for (std::size_t k = 0; k < b.size(); ++k) out[k] = gamma_faulty_one(b.power_gain[k], b.allowed_time[k], b.beta[k], p, nu);
}

double sum_gamma_faulty(const kernels::DeviceBlock& b, const kernels::BandParams& p, double nu) {
  double s = 0.0;
  for (std::size_t k = 0; k < b.size(); ++k) s += gamma_faulty_one(b.power_gain[k], b.allowed_time[k], b.beta[k], p, nu);
  return s;
}

}  // namespace

const kernels::KernelTable& faulty_table() {
  static const kernels::KernelTable table{kernels::Isa::scalar, "scalar+faulty-w0", &w0_faulty, &gamma_faulty,
                                          &sum_gamma_faulty, kernels::scalar_table().stationary_priority};
  return table;
}

std::vector<CheckResult> run_validation(Level level, std::uint64_t seed) {
  const bool full = level == Level::full;
  std::vector<CheckResult> out;
  out.push_back(check_lambert(full ? 100000 : 10000));
  out.push_back(check_p1_grid(full ? 100 : 10, sim::stream_seed(seed, 1)));
  auto [stat, sum] = check_kkt(full ? 1000 : 100, sim::stream_seed(seed, 2));
  out.push_back(stat);
  out.push_back(sum);
  out.push_back(check_priority(full ? 1000 : 200, sim::stream_seed(seed, 3)));
  out.push_back(full ? check_joint(10, 10, sim::stream_seed(seed, 4)) : check_joint(5, 6, sim::stream_seed(seed, 4)));
  return out;
}

}  // namespace rrm::validate
