#include <gtest/gtest.h>

#include <sstream>

#include "farmsim/metrics.hpp"

using namespace farmsim;

TEST(Objective, NoViolationsIsWeightedBattery) {
  EXPECT_DOUBLE_EQ(objective_value(0.8, 0, 1000, 0.5), 0.4);
  EXPECT_DOUBLE_EQ(objective_value(0.8, 0, 0, 0.5), 0.4);
}

TEST(Objective, ViolationTermUsesTaskCountOrTheta) {
  EXPECT_DOUBLE_EQ(objective_value(0.6, 250, 1000, 0.5), 0.3 - 0.5 * 0.25);
  EXPECT_DOUBLE_EQ(objective_value(0.6, 250, 1000, 0.5, 500.0), 0.3 - 0.25);
  EXPECT_DOUBLE_EQ(objective_value(0.6, 250, 1000, 1.0), 0.6);
}

TEST(Objective, MonotoneInBothTerms) {
  for (int v = 0; v < 100; ++v) {
    EXPECT_GT(objective_value(0.5, v, 100, 0.5), objective_value(0.5, v + 1, 100, 0.5));
    EXPECT_LT(objective_value(0.5 + v * 0.001, 7, 100, 0.5), objective_value(0.501 + v * 0.001, 7, 100, 0.5));
  }
}

TEST(Metrics, ViolationPercentAndMinimum) {
  RunMetrics m;
  m.battery_fraction = {0.7, 0.61, 0.9};
  m.violations_per_unit = {10, 0, 5, 5};
  m.total_tasks = 80;
  EXPECT_EQ(m.min_battery(), 0.61);
  EXPECT_EQ(m.total_violations(), 20u);
  EXPECT_DOUBLE_EQ(m.violation_pct(), 25.0);
}

TEST(Metrics, DistributionCountsViolatedTasksPerUnit) {
  std::vector<PlacementRecord> recs(500);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    recs[i].chosen_unit = i % 5;
    recs[i].violated = i < 25 && i % 5 == 4;  // five MEC violations
  }
  const auto d = violation_distribution(recs, 500, 5);
  EXPECT_EQ(d, (std::vector<double>{0, 0, 0, 0, 1.0}));
}

TEST(Smoothing, TrailingWindowWithPrefix) {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const auto s = moving_average(x, 3);
  EXPECT_EQ(s.mean, (std::vector<double>{1, 1.5, 2, 3, 4}));
  EXPECT_EQ(s.band_lo, (std::vector<double>{1, 1, 1, 2, 3}));
  EXPECT_EQ(s.band_hi, (std::vector<double>{1, 2, 3, 4, 5}));
  EXPECT_THROW(moving_average(x, 0), std::invalid_argument);
}

TEST(Smoothing, WindowOneIsIdentity) {
  const std::vector<double> x{3, -1, 4, 1, -5};
  EXPECT_EQ(moving_average(x, 1).mean, x);
}

TEST(Convergence, FirstSustainedRun) {
  const std::vector<double> s{0, 5, 1, 5, 6, 7, 2, 8, 9, 9};
  EXPECT_EQ(convergence_episode(s, 5, 3), 3u);
  EXPECT_EQ(convergence_episode(s, 8, 3), 7u);
  EXPECT_FALSE(convergence_episode(s, 10, 1).has_value());
  EXPECT_FALSE(convergence_episode(s, 8, 4).has_value());
}

TEST(Stats, TailMeanAndSampleStd) {
  const std::vector<double> x{0, 0, 0, 0, 0, 0, 0, 0, 4, 6};
  EXPECT_DOUBLE_EQ(tail_mean(x, 0.2), 5.0);
  const auto ms = mean_std(std::vector<double>{2, 4, 4, 4, 5, 5, 7, 9});
  EXPECT_DOUBLE_EQ(ms.mean, 5.0);
  EXPECT_NEAR(ms.std, std::sqrt(32.0 / 7.0), 1e-12);
  EXPECT_EQ(mean_std(std::vector<double>{3}).std, 0.0);
}

TEST(Csv, MetadataThenHeaderThenRows) {
  std::ostringstream out;
  CsvWriter w(out, {{"seed", "7"}}, {"a", "b", "c"});
  w.field("x").field(0.1).field(std::size_t{3});
  w.end_row();
  EXPECT_EQ(out.str(), "# seed 7\na,b,c\nx,0.1,3\n");
  EXPECT_EQ(strip_metadata(out.str()), "a,b,c\nx,0.1,3\n");
}

TEST(Csv, DoublesRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 570.0, 1e300}) EXPECT_EQ(std::stod(format_double(v)), v);
  EXPECT_EQ(format_double(2.0), "2");
}
