#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rrm/scheduling.hpp"
#include "support.hpp"

using namespace rrm;
using rrm::test::device_with;
using rrm::test::reference_params;

namespace {

// Lambda that puts the log term of the stationary point at log2(ratio).
double lambda_for_ratio(const SystemParams& p, double h2, double ratio) {
  return ratio * p.noise * p.model_size * std::numbers::ln2 / h2;
}

double scan_minimizer(const Device& d, const SystemParams& p, double gamma, double tk) {
  double best = 0.0, best_f = INFINITY;
  const int n = 200000;
  for (int i = 0; i <= n; ++i) {
    const double b = static_cast<double>(i) / n;
    const double f = test::naive_energy(d.power_gain(), p, gamma, tk, b) - p.tradeoff * b;
    if (f < best_f) {
      best_f = f;
      best = b;
    }
  }
  return best;
}

}  // namespace

TEST(Priority, LogArgumentOneGivesZero) {
  auto p = reference_params(0.1);
  const auto d = device_with(1e-4, 0.005);
  p.tradeoff = lambda_for_ratio(p, 1e-4, 1.0);
  EXPECT_NEAR(scheduling::stationary_priority(d, p, 0.02, 0.095), 0.0, 1e-12);
  EXPECT_EQ(scheduling::priority(d, p, 0.02, 0.095), 0.0);
}

TEST(Priority, BelowOneClampsToZero) {
  auto p = reference_params(0.1);
  const auto d = device_with(1e-4, 0.005);
  p.tradeoff = lambda_for_ratio(p, 1e-4, 0.3);
  EXPECT_LT(scheduling::stationary_priority(d, p, 0.02, 0.095), 0.0);
  EXPECT_EQ(scheduling::priority(d, p, 0.02, 0.095), 0.0);
}

TEST(Priority, ClampAtOne) {
  auto p = reference_params(0.1);
  const auto d = device_with(1e-4, 0.005);
  p.tradeoff = lambda_for_ratio(p, 1e-4, 256.0);  // log2 = 8
  EXPECT_NEAR(scheduling::stationary_priority(d, p, 0.02, 0.095), 1.52, 1e-12);
  EXPECT_EQ(scheduling::priority(d, p, 0.02, 0.095), 1.0);
  EXPECT_NEAR(scan_minimizer(d, p, 0.02, 0.095), 1.0, 1e-12);
}

TEST(Priority, InteriorMatchesScan) {
  auto p = reference_params(0.1);
  const auto d = device_with(5e-5, 0.004);
  p.tradeoff = lambda_for_ratio(p, 5e-5, 8.0);
  const double beta = scheduling::priority(d, p, 0.01, 0.096);
  EXPECT_GT(beta, 0.0);
  EXPECT_LT(beta, 1.0);
  EXPECT_NEAR(beta, scan_minimizer(d, p, 0.01, 0.096), 1e-5);
}

TEST(Priority, LinearInAllowedTime) {
  auto p = reference_params(0.1);
  const auto d = device_with(1e-4, 0.0);
  p.tradeoff = lambda_for_ratio(p, 1e-4, 2.0);
  const double b1 = scheduling::stationary_priority(d, p, 0.01, 0.04);
  const double b2 = scheduling::stationary_priority(d, p, 0.01, 0.08);
  EXPECT_NEAR(b2, 2.0 * b1, 1e-14);
}

TEST(Priority, NoBandwidthOrTimeMeansZero) {
  auto p = reference_params(0.1, 1e6);
  const auto d = device_with(1e-4, 0.0);
  EXPECT_EQ(scheduling::priority(d, p, 0.0, 0.05), 0.0);
  EXPECT_EQ(scheduling::priority(d, p, 0.1, -0.01), 0.0);
}

TEST(ScheduleAll, SymmetryAndOrdering) {
  auto p = reference_params(0.1);
  p.tradeoff = lambda_for_ratio(p, 1e-4, 4.0);
  const std::vector<Device> same{device_with(1e-4, 0.0, 0), device_with(1e-4, 0.0, 1), device_with(1e-4, 0.0, 2)};
  const std::vector<double> gamma{0.01, 0.01, 0.01};
  const std::vector<double> t{0.03, 0.03, 0.03};
  const auto r = scheduling::schedule_all(same, p, gamma, t);
  EXPECT_EQ(r.beta[0], r.beta[1]);
  EXPECT_EQ(r.beta[1], r.beta[2]);

  const std::vector<double> t2{0.04, 0.02, 0.03};
  const auto r2 = scheduling::schedule_all(same, p, gamma, t2);
  EXPECT_GE(r2.beta[0], r2.beta[1]);
  EXPECT_THROW(scheduling::schedule_all(same, p, std::vector<double>{0.1}, t), DimensionError);
}

TEST(DeviceObjective, MatchesDefinition) {
  auto p = reference_params(0.1, 3.0);
  const auto d = device_with(1e-4, 0.0);
  const double e = test::naive_energy(1e-4, p, 0.2, 0.05, 0.7);
  EXPECT_NEAR(scheduling::device_objective(d, p, 0.2, 0.05, 0.7), e - 2.1, 1e-12);
}
