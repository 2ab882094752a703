#include <cmath>
#include <numbers>

#include "rrm/kernels.hpp"
#include "rrm/numerics.hpp"

namespace rrm::kernels {

namespace {

void w0_scalar(std::span<const double> x, std::span<double> out) {
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = numerics::lambert_w0(x[i]);
}

double gamma_one(double h2, double allowed, double beta, const BandParams& p, double nu) {
  if (beta == 0.0) return 0.0;
  const double bt = p.bandwidth * allowed;
  const double arg = (h2 * nu / (bt * p.noise) - 1.0) * numerics::kInvE;
  const double denom = 1.0 + numerics::lambert_w0(arg);
  if (denom <= 0.0) return kUnboundedDemand;
  return beta * p.model_size * std::numbers::ln2 / (bt * denom);
}

void gamma_scalar(const DeviceBlock& b, const BandParams& p, double nu, std::span<double> out) {
  for (std::size_t k = 0; k < b.size(); ++k) {
    out[k] = gamma_one(b.power_gain[k], b.allowed_time[k], b.beta[k], p, nu);
  }
}

double sum_gamma_scalar(const DeviceBlock& b, const BandParams& p, double nu) {
  double s = 0.0;
  for (std::size_t k = 0; k < b.size(); ++k) {
    s += gamma_one(b.power_gain[k], b.allowed_time[k], b.beta[k], p, nu);
  }
  return s;
}

void priority_scalar(std::span<const double> h2, std::span<const double> allowed,
                     std::span<const double> gamma, const BandParams& p, double tradeoff,
                     std::span<double> out) {
  const double scale = p.noise * p.model_size * std::numbers::ln2;
  for (std::size_t k = 0; k < h2.size(); ++k) {
    if (!(gamma[k] > 0.0) || !(allowed[k] > 0.0)) {
      out[k] = 0.0;
      continue;
    }
    out[k] = gamma[k] * p.bandwidth * allowed[k] / p.model_size * std::log2(tradeoff * h2[k] / scale);
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{Isa::scalar, "scalar", &w0_scalar, &gamma_scalar,
                                 &sum_gamma_scalar, &priority_scalar};
  return table;
}

}  // namespace rrm::kernels
