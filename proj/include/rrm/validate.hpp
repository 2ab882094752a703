#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rrm/kernels.hpp"
#include "rrm/model.hpp"

namespace rrm::validate {

/// Random instances in the style of the default scenario: h^2 ~ 1e-4 Exp(1),
/// t^comp ~ U(0, 10 ms), B = 1 MHz, N0 = 1e-8 W, L = 1e4 bits.
class InstanceSampler {
 public:
  explicit InstanceSampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi);
  std::vector<Device> devices(int count);
  /// Defaults with T ~ U(t_lo, t_hi), strictly above the largest compute time.
  SystemParams params(double t_lo = 0.012, double t_hi = 0.05);

 private:
  std::mt19937_64 rng_;
};

enum class Level { fast, full };

struct CheckResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;      ///< worst observed error of the check
  double tolerance = 0.0;  ///< pass bar for `worst`
  int cases = 0;
  double seconds = 0.0;
};

/**
 * Oracle agreement suite: Lambert W residuals, bandwidth split vs simplex grid,
 * KKT residuals, priorities vs 1-D scan, joint rounding vs exhaustive search.
 * Deterministic for a given seed and kernel table.
 */
std::vector<CheckResult> run_validation(Level level, std::uint64_t seed);

/// Scalar table with W0 scaled by (1 + 1e-3): every oracle check should catch it.
const kernels::KernelTable& faulty_table();

}  // namespace rrm::validate
