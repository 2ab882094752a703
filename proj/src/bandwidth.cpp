#include "rrm/bandwidth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "rrm/numerics.hpp"

namespace rrm::bandwidth {

namespace {

void require_participant(const Device& dev, const SystemParams& params) {
  if (!(allowed_upload_time(dev, params) > 0.0)) {
    throw DomainError("device " + std::to_string(dev.id) +
                      " is scheduled but has no time left to upload (T_k <= 0)");
  }
  if (!(dev.channel_gain > 0.0)) {
    throw DomainError("device " + std::to_string(dev.id) + " is scheduled but has zero channel gain");
  }
}

void require_schedule(std::span<const Device> devices, const SystemParams& params,
                      std::span<const double> beta) {
  params.validate();
  if (beta.size() != devices.size()) {
    throw DimensionError("schedule has " + std::to_string(beta.size()) + " entries for " +
                         std::to_string(devices.size()) + " devices");
  }
  bool any = false;
  for (std::size_t k = 0; k < devices.size(); ++k) {
    devices[k].validate();
    if (!(beta[k] >= 0.0 && beta[k] <= 1.0)) {
      throw DomainError("beta of device " + std::to_string(devices[k].id) + " outside [0, 1]");
    }
    if (beta[k] > 0.0) {
      require_participant(devices[k], params);
      any = true;
    }
  }
  if (!any) throw InfeasibleError("no device is scheduled; the bandwidth problem is vacuous");
}

std::vector<double> upload_times(std::span<const Device> devices, const SystemParams& params) {
  std::vector<double> t(devices.size());
  for (std::size_t k = 0; k < devices.size(); ++k) {
    t[k] = std::max(allowed_upload_time(devices[k], params), 0.0);
  }
  return t;
}

kernels::BandParams band(const SystemParams& p) { return {p.bandwidth, p.noise, p.model_size}; }

}  // namespace

double gamma_of_nu(const Device& dev, const SystemParams& params, double beta, double nu) {
  if (beta == 0.0) return 0.0;
  require_participant(dev, params);
  if (!(nu >= 0.0)) throw DomainError("gamma_of_nu: dual value must be >= 0");
  const double h2 = dev.power_gain();
  const double tk = allowed_upload_time(dev, params);
  double out = 0.0;
  kernels::DeviceBlock block{{&h2, 1}, {&tk, 1}, {&beta, 1}};
  kernels::active().gamma_at_nu(block, band(params), nu, {&out, 1});
  return out;
}

double nu_for_gamma(const Device& dev, const SystemParams& params, double beta, double gamma) {
  const double tk = allowed_upload_time(dev, params);
  const double scale = params.bandwidth * tk * params.noise / dev.power_gain();
  const double y = rate_exponent(params, gamma, tk, beta) * std::numbers::ln2;
  // (BTN0/h^2)(1 + e^y (y - 1))
  return scale * (std::exp(y) * y - std::expm1(y));
}

double stationarity_residual(const Device& dev, const SystemParams& params, double beta,
                             double gamma, double nu) {
  const double tk = allowed_upload_time(dev, params);
  const double scale = params.bandwidth * tk * params.noise / dev.power_gain();
  const double y = rate_exponent(params, gamma, tk, beta) * std::numbers::ln2;
  // 2^x - x ln2 2^x - 1 with y = x ln2
  const double derivative = scale * (std::expm1(y) - y * std::exp(y));
  const double norm = std::max({std::abs(derivative), std::abs(nu), std::numeric_limits<double>::min()});
  return (derivative + nu) / norm;
}

std::pair<Allocation, DualSolveReport> solve_p1(std::span<const Device> devices,
                                                const SystemParams& params,
                                                std::span<const double> beta,
                                                const SolveOptions& opts) {
  require_schedule(devices, params, beta);
  const std::size_t k_all = devices.size();

  Allocation alloc = Allocation::empty(k_all);
  alloc.beta.assign(beta.begin(), beta.end());
  alloc.upload_time = upload_times(devices, params);

  std::vector<std::size_t> idx;
  std::vector<double> h2, tk, bs;
  for (std::size_t k = 0; k < k_all; ++k) {
    if (beta[k] > 0.0) {
      idx.push_back(k);
      h2.push_back(devices[k].power_gain());
      tk.push_back(alloc.upload_time[k]);
      bs.push_back(beta[k]);
    }
  }

  DualSolveReport report;
  if (idx.size() == 1) {
    const std::size_t k = idx.front();
    alloc.gamma[k] = 1.0;
    report.nu_star = nu_for_gamma(devices[k], params, beta[k], 1.0);
    fill_energies(devices, params, alloc);
    return {std::move(alloc), report};
  }

  const double beta_sum = std::accumulate(bs.begin(), bs.end(), 0.0);
  double hi = 0.0;
  for (std::size_t j = 0; j < idx.size(); ++j) {
    hi = std::max(hi, nu_for_gamma(devices[idx[j]], params, bs[j], bs[j] / beta_sum));
  }
  if (!std::isfinite(hi) || !(hi > 0.0)) hi = std::numeric_limits<double>::max() / 4.0;

  const kernels::DeviceBlock block{h2, tk, bs};
  const kernels::BandParams bp = band(params);
  const kernels::KernelTable& kt = kernels::active();
  auto excess = [&](double nu) { return kt.sum_gamma(block, bp, nu) - 1.0; };

  numerics::BisectOptions bopts;
  bopts.max_expansions = opts.max_expansions;
  const auto root = numerics::bisect_decreasing_report(excess, {0.0, hi, opts.tolerance}, bopts);

  std::vector<double> g(idx.size());
  kt.gamma_at_nu(block, bp, root.root, g);
  const double total = std::accumulate(g.begin(), g.end(), 0.0);
  // Project the last ~1e-12 of bisection slack onto the simplex so the shares
  // sum to one up to rounding; identical devices then get identical shares.
  for (std::size_t j = 0; j < idx.size(); ++j) alloc.gamma[idx[j]] = g[j] / total;
  report.nu_star = root.root;
  report.iterations = root.iterations;
  report.residual = std::abs(total - 1.0);
  fill_energies(devices, params, alloc);
  return {std::move(alloc), report};
}

Allocation uniform_baseline(std::span<const Device> devices, const SystemParams& params,
                            std::span<const double> beta) {
  require_schedule(devices, params, beta);
  const std::size_t k_all = devices.size();
  Allocation alloc = Allocation::empty(k_all);
  alloc.beta.assign(beta.begin(), beta.end());
  alloc.gamma.assign(k_all, 1.0 / static_cast<double>(k_all));
  alloc.upload_time = upload_times(devices, params);
  fill_energies(devices, params, alloc);
  return alloc;
}

}  // namespace rrm::bandwidth
