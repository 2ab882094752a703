#pragma once

// Data-parallel inner loops of the optimizers.
//
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant. The variant is picked once at startup from CPUID; RRM_SIMD=scalar
// in the environment forces the reference path. Both paths agree to a few ulp
// (see tests/test_kernels.cpp); results are deterministic for a fixed path.

#include <cstddef>
#include <limits>
#include <span>
#include <string_view>

namespace rrm::kernels {

enum class Isa { scalar, avx2 };

/// Returned by the gamma kernels when the dual value is too small to bound demand.
inline constexpr double kUnboundedDemand = std::numeric_limits<double>::infinity();

/// Structure-of-arrays view over the devices of one bandwidth problem.
struct DeviceBlock {
  std::span<const double> power_gain;    ///< h_k^2
  std::span<const double> allowed_time;  ///< T_k, > 0 wherever beta_k > 0
  std::span<const double> beta;

  [[nodiscard]] std::size_t size() const { return power_gain.size(); }
};

/// Scalars shared by the bandwidth kernels.
struct BandParams {
  double bandwidth;
  double noise;
  double model_size;
};

struct KernelTable {
  Isa isa;
  std::string_view name;

  /// out[i] = W0(x[i]). Inputs must lie in [-1/e, inf); no domain checks.
  void (*lambert_w0)(std::span<const double> x, std::span<double> out);

  /// out[k] = gamma_k(nu); 0 where beta_k == 0, kUnboundedDemand where 1 + W == 0.
  void (*gamma_at_nu)(const DeviceBlock& block, const BandParams& p, double nu,
                      std::span<double> out);

  /// sum_k gamma_k(nu), kUnboundedDemand if any term is unbounded.
  double (*sum_gamma)(const DeviceBlock& block, const BandParams& p, double nu);

  /// Unclamped stationary points (gamma B T / L) log2(lambda h^2 / (N0 L ln 2));
  /// 0 where gamma <= 0 or T <= 0.
  void (*stationary_priority)(std::span<const double> power_gain,
                              std::span<const double> allowed_time,
                              std::span<const double> gamma, const BandParams& p,
                              double tradeoff, std::span<double> out);
};

const KernelTable& scalar_table();

/// AVX2 table, or nullptr when not compiled in or unsupported by this CPU.
const KernelTable* avx2_table();

bool cpu_has_avx2();

/// Table used by the library.
const KernelTable& active();

/// Replaces the active table (tests, fault injection). Returns the previous one.
const KernelTable& set_active(const KernelTable& table);

/// Restores the active table on scope exit.
class ScopedTable {
 public:
  explicit ScopedTable(const KernelTable& table) : previous_(&set_active(table)) {}
  ~ScopedTable() { set_active(*previous_); }
  ScopedTable(const ScopedTable&) = delete;
  ScopedTable& operator=(const ScopedTable&) = delete;

 private:
  const KernelTable* previous_;
};

}  // namespace rrm::kernels
