#include "rrm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rrm/bandwidth.hpp"

namespace rrm::oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Window {
  double lo;
  double hi;
};

Window zoom(double center, const Window& w) {
  const double half = (w.hi - w.lo) / 20.0;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

double grid_point(const Window& w, int j, int resolution) {
  return w.lo + (w.hi - w.lo) * static_cast<double>(j) / static_cast<double>(resolution - 1);
}

}  // namespace

void GridSpec::validate() const {
  if (resolution < 10) throw DomainError("GridSpec: resolution must be >= 10");
  if (refine_passes < 0) throw DomainError("GridSpec: refine_passes must be >= 0");
}

GridSpec GridSpec::for_dimension(int free_coordinates) {
  return free_coordinates <= 1 ? GridSpec{2000, 2} : GridSpec{400, 2};
}

double direct_energy(double power_gain, double bandwidth, double noise, double model_size,
                     double gamma, double t, double beta) {
  if (beta == 0.0) return 0.0;
  if (gamma <= 0.0 || t <= 0.0 || power_gain <= 0.0) return kInf;
  const double symbols = gamma * bandwidth * t;
  const double e = symbols * noise / power_gain * (std::exp2(beta * model_size / symbols) - 1.0);
  return std::isfinite(e) ? e : kInf;
}

P1Result oracle_p1(std::span<const Device> devices, const SystemParams& params,
                   std::span<const double> beta, const GridSpec& grid) {
  grid.validate();
  if (beta.size() != devices.size()) throw DimensionError("oracle_p1: schedule size mismatch");

  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < devices.size(); ++k) {
    if (beta[k] > 0.0) idx.push_back(k);
  }
  if (idx.size() > 4) {
    throw DimensionError("oracle_p1: at most 4 scheduled devices, got " + std::to_string(idx.size()));
  }

  P1Result result;
  result.gamma.assign(devices.size(), 0.0);
  if (idx.empty()) return result;

  auto energy_of = [&](std::size_t j, double g) {
    const Device& d = devices[idx[j]];
    return direct_energy(d.power_gain(), params.bandwidth, params.noise, params.model_size, g,
                         params.round_time - d.compute_time, beta[idx[j]]);
  };

  if (idx.size() == 1) {
    result.gamma[idx[0]] = 1.0;
    result.objective = energy_of(0, 1.0);
    return result;
  }

  const std::size_t free = idx.size() - 1;
  std::vector<Window> windows(free, Window{0.0, 1.0});
  std::vector<double> best(free, 0.0);
  double best_value = kInf;

  for (int pass = 0; pass <= grid.refine_passes; ++pass) {
    if (pass > 0) {
      for (std::size_t i = 0; i < free; ++i) windows[i] = zoom(best[i], windows[i]);
    }
    std::vector<int> counter(free, 0);
    std::vector<double> g(free);
    while (true) {
      double used = 0.0;
      bool valid = true;
      for (std::size_t i = 0; i < free; ++i) {
        g[i] = grid_point(windows[i], counter[i], grid.resolution);
        used += g[i];
        if (g[i] <= 0.0) valid = false;
      }
      const double last = 1.0 - used;
      if (valid && last > 0.0) {
        double value = energy_of(free, last);
        for (std::size_t i = 0; i < free && value < best_value; ++i) value += energy_of(i, g[i]);
        if (value < best_value) {
          best_value = value;
          best = g;
        }
      }
      std::size_t pos = 0;
      while (pos < free && ++counter[pos] == grid.resolution) counter[pos++] = 0;
      if (pos == free) break;
    }
  }

  if (!std::isfinite(best_value)) throw InfeasibleError("oracle_p1: no finite-energy grid point");
  double used = 0.0;
  for (std::size_t i = 0; i < free; ++i) {
    result.gamma[idx[i]] = best[i];
    used += best[i];
  }
  result.gamma[idx[free]] = 1.0 - used;
  result.objective = best_value;
  return result;
}

P4Result oracle_p4(const Device& dev, const SystemParams& params, double gamma, double t_allowed,
                   double lambda, const GridSpec& grid) {
  grid.validate();
  if (!(gamma > 0.0) || !(t_allowed > 0.0)) throw DomainError("oracle_p4: needs gamma > 0 and T_k > 0");
  auto objective = [&](double b) {
    return direct_energy(dev.power_gain(), params.bandwidth, params.noise, params.model_size, gamma,
                         t_allowed, b) -
           lambda * b;
  };
  Window w{0.0, 1.0};
  P4Result best{0.0, objective(0.0)};
  for (int pass = 0; pass <= grid.refine_passes; ++pass) {
    if (pass > 0) w = zoom(best.beta, w);
    for (int j = 0; j < grid.resolution; ++j) {
      const double b = grid_point(w, j, grid.resolution);
      const double v = objective(b);
      if (v < best.objective) best = {b, v};
    }
  }
  return best;
}

P2Result oracle_p2_exhaustive(std::span<const Device> devices, const SystemParams& params,
                              double lambda) {
  const std::size_t k_all = devices.size();
  if (k_all > 12) {
    throw DimensionError("oracle_p2_exhaustive: at most 12 devices, got " + std::to_string(k_all));
  }
  SystemParams p = params;
  p.tradeoff = lambda;

  std::uint32_t eligible = 0;
  for (std::size_t k = 0; k < k_all; ++k) {
    if (allowed_upload_time(devices[k], p) > 0.0 && devices[k].channel_gain > 0.0) eligible |= 1u << k;
  }

  P2Result best{std::vector<double>(k_all, 0.0), 0.0};
  std::vector<double> beta(k_all);
  const std::uint32_t count = 1u << k_all;
  for (std::uint32_t mask = 1; mask < count; ++mask) {
    if ((mask & ~eligible) != 0) continue;
    for (std::size_t k = 0; k < k_all; ++k) beta[k] = (mask >> k) & 1u ? 1.0 : 0.0;
    double value = kInf;
    try {
      const auto [alloc, dual] = bandwidth::solve_p1(devices, p, beta);
      value = alloc.total_upload_energy() - lambda * alloc.scheduled_count();
    } catch (const OverflowError&) {
      continue;
    }
    if (value < best.objective) {
      best.objective = value;
      best.beta = beta;
    }
  }
  return best;
}

double oracle_upload_time(const Device& dev, const SystemParams& params, double gamma, double beta,
                          int resolution) {
  const double tk = allowed_upload_time(dev, params);
  if (!(tk > 0.0)) throw DomainError("oracle_upload_time: device has no time to upload");
  double best_t = tk;
  double best_e = kInf;
  for (int j = 1; j <= resolution; ++j) {
    const double t = tk * static_cast<double>(j) / static_cast<double>(resolution);
    const double e = direct_energy(dev.power_gain(), params.bandwidth, params.noise, params.model_size,
                                   gamma, t, beta);
    if (e < best_e) {
      best_e = e;
      best_t = t;
    }
  }
  return best_t;
}

}  // namespace rrm::oracle
