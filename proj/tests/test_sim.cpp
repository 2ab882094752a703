#include <gtest/gtest.h>

#include <cmath>

#include "rrm/bandwidth.hpp"
#include "rrm/sim.hpp"
#include "support.hpp"

using namespace rrm;

TEST(Population, MeanPowerGainMatchesPathLoss) {
  sim::ScenarioConfig sc;
  sc.num_devices = 1000000;
  const auto devs = sim::generate_population(sc, 0);
  double sum = 0.0;
  for (const auto& d : devs) sum += d.power_gain();
  EXPECT_NEAR(sum / sc.num_devices, sc.path_loss, 0.01 * sc.path_loss);
}

TEST(Population, ComputeTimesInRange) {
  sim::ScenarioConfig sc;
  for (int trial = 0; trial < 20; ++trial) {
    for (const auto& d : sim::generate_population(sc, trial)) {
      EXPECT_GT(d.compute_time, 0.0);
      EXPECT_LE(d.compute_time, 0.010);
    }
  }
}

TEST(Population, DeterministicPerTrial) {
  sim::ScenarioConfig sc;
  const auto a = sim::generate_population(sc, 4);
  const auto b = sim::generate_population(sc, 4);
  const auto c = sim::generate_population(sc, 5);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].channel_gain, b[k].channel_gain);
    EXPECT_EQ(a[k].compute_time, b[k].compute_time);
  }
  EXPECT_NE(a[0].channel_gain, c[0].channel_gain);
}

TEST(Population, FixedPopulationIsReused) {
  sim::ScenarioConfig sc;
  sc.fixed_population = {test::device_with(1e-4, 0.002, 0), test::device_with(3e-4, 0.001, 1)};
  const auto a = sim::generate_population(sc, 0);
  const auto b = sim::generate_population(sc, 9);
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[1].channel_gain, b[1].channel_gain);
}

TEST(ReductionRatio, Definition) {
  EXPECT_EQ(sim::reduction_ratio(4.0, 1.0), 0.75);
  EXPECT_EQ(sim::reduction_ratio(0.0, 0.0), 0.0);
}

TEST(AllocationSweep, TrendsOnSmallRun) {
  sim::ScenarioConfig sc;
  sc.trials = 8;
  const auto rows = sim::run_sweep_allocation(sc);
  ASSERT_EQ(rows.size(), sc.t_sweep.size());
  for (std::size_t j = 0; j < rows.size(); ++j) {
    EXPECT_LE(rows[j].mean_total_energy_proposed, rows[j].mean_total_energy_baseline);
    EXPECT_EQ(rows[j].mean_scheduled_count, 50.0);
    if (j > 0) {
      EXPECT_LT(rows[j].mean_total_energy_proposed, rows[j - 1].mean_total_energy_proposed);
      EXPECT_LT(rows[j].mean_total_energy_baseline, rows[j - 1].mean_total_energy_baseline);
    }
  }
}

TEST(AllocationSweep, HandCheckedTwoDeviceTrial) {
  sim::ScenarioConfig sc;
  sc.trials = 1;
  sc.t_sweep = {0.02};
  sc.fixed_population = {test::device_with(1e-4, 0.004, 0), test::device_with(2.5e-5, 0.009, 1)};
  const auto row = sim::run_sweep_allocation(sc).front();
  SystemParams p = sc.params;
  p.round_time = 0.02;
  const double baseline = test::naive_energy(1e-4, p, 0.5, 0.016, 1.0) + test::naive_energy(2.5e-5, p, 0.5, 0.011, 1.0);
  EXPECT_NEAR(row.mean_total_energy_baseline, baseline, 1e-12 * baseline);
  const auto opt = bandwidth::solve_p1(sc.fixed_population, p, std::vector<double>{1.0, 1.0}).first;
  const double proposed = test::naive_energy(1e-4, p, opt.gamma[0], 0.016, 1.0) +
                          test::naive_energy(2.5e-5, p, opt.gamma[1], 0.011, 1.0);
  EXPECT_NEAR(row.mean_total_energy_proposed, proposed, 1e-12 * proposed);
}

TEST(AllocationSweep, IdenticalDevicesMatchBaseline) {
  sim::ScenarioConfig sc;
  sc.trials = 2;
  sc.t_sweep = {0.015, 0.03};
  for (int k = 0; k < 4; ++k) sc.fixed_population.push_back(test::device_with(1e-4, 0.005, k));
  for (const auto& r : sim::run_sweep_allocation(sc)) {
    EXPECT_NEAR(r.mean_total_energy_proposed, r.mean_total_energy_baseline, 1e-10 * r.mean_total_energy_baseline);
  }
}

TEST(AllocationSweep, RejectsDeadlineBelowComputeTime) {
  sim::ScenarioConfig sc;
  sc.t_sweep = {0.005};
  EXPECT_THROW(sim::run_sweep_allocation(sc), ConfigError);
}

TEST(JointSweep, ThreadCountDoesNotChangeResults) {
  sim::ScenarioConfig sc;
  sc.num_devices = 12;
  sc.trials = 6;
  sc.t_sweep = {0.015, 0.03};
  sc.threads = 1;
  const auto a = sim::run_sweep_joint(sc, sim::kDefaultLambda);
  sc.threads = 3;
  const auto b = sim::run_sweep_joint(sc, sim::kDefaultLambda);
  for (std::size_t j = 0; j < a.size(); ++j) {
    EXPECT_EQ(a[j].mean_total_energy_proposed, b[j].mean_total_energy_proposed);
    EXPECT_EQ(a[j].mean_total_energy_baseline, b[j].mean_total_energy_baseline);
    EXPECT_EQ(a[j].mean_scheduled_count, b[j].mean_scheduled_count);
  }
}

TEST(JointSweep, ProposedNeverAboveBaselineCount) {
  sim::ScenarioConfig sc;
  sc.num_devices = 10;
  sc.trials = 4;
  for (const auto& r : sim::run_sweep_joint(sc, sim::kDefaultLambda)) {
    EXPECT_LE(r.mean_scheduled_count, 10.0);
    EXPECT_GE(r.energy_reduction_ratio, 0.0);
  }
}

TEST(Calibration, HitsTargetFraction) {
  sim::ScenarioConfig sc;
  sc.num_devices = 10;
  sc.trials = 4;
  sc.t_sweep = {0.03};
  const double lambda = sim::calibrate_lambda(sc, 0.5, 1.0, 1e5, 20);
  const double frac = sim::run_sweep_joint(sc, lambda).front().mean_scheduled_count / 10.0;
  EXPECT_GE(frac, 0.5);
  const double below = sim::run_sweep_joint(sc, lambda * 0.9).front().mean_scheduled_count / 10.0;
  EXPECT_LE(below, frac);
}

TEST(Scenario, Validation) {
  sim::ScenarioConfig sc;
  sc.trials = 0;
  EXPECT_THROW(sc.validate(), ConfigError);
  sc = {};
  sc.compute_hi = 0.0;
  EXPECT_THROW(sc.validate(), ConfigError);
  sc = {};
  sc.t_sweep.clear();
  EXPECT_THROW(sc.validate(), ConfigError);
}
