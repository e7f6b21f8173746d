#include <gtest/gtest.h>

#include <sstream>

#include "farmsim/mdp.hpp"
#include "farmsim/tabular.hpp"
#include "snapshot_fixture.hpp"

using namespace farmsim;
using farmsim::testing::fresh_snapshot;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) x(i++) = d;
  return x;
}

}  // namespace

TEST(Discretize, FreshFireState) {
  const Discretizer g;  // 4 UAVs + 1 MEC, 8 delay bins, 10 battery bins
  const auto key = discretize_state(encode_state(fresh_snapshot(TaskType::FireDetection)), g);
  EXPECT_EQ(key, (StateKey{0, 0, 0, 0, 0, 0, 9, 9, 9, 9}));
}

TEST(Discretize, DelayEdgesAreGeometric) {
  const Discretizer g;
  const auto edges = g.delay_edges();
  ASSERT_EQ(edges.size(), 7u);
  EXPECT_DOUBLE_EQ(edges.front(), 10.0 / 64.0);
  EXPECT_DOUBLE_EQ(edges.back(), 10.0);
  for (std::size_t k = 1; k < edges.size(); ++k) EXPECT_DOUBLE_EQ(edges[k] / edges[k - 1], 2.0);
  for (std::size_t k = 0; k < edges.size(); ++k) {
    EXPECT_EQ(g.delay_bin(edges[k]), k + 1);
    EXPECT_EQ(g.delay_bin(std::nextafter(edges[k], 0.0)), k);
  }
}

TEST(Discretize, ClampsBeyondLastEdge) {
  const Discretizer g;
  EXPECT_EQ(g.delay_bin(1e6), 7u);
  EXPECT_EQ(g.battery_bin(1.0), 9u);
  EXPECT_EQ(g.battery_bin(-2.0), 0u);
  EXPECT_EQ(g.battery_bin(0.55), 5u);
}

TEST(Discretize, NearbyStatesShareAKey) {
  const Discretizer g;
  auto a = fresh_snapshot(TaskType::PestDetection, 1);
  auto b = a;
  b.predicted_delay[2] += 0.01;
  b.battery_fraction[3] -= 0.02;
  EXPECT_EQ(discretize_state(encode_state(a), g), discretize_state(encode_state(b), g));
}

TEST(QUpdate, FirstStepFromEmptyTable) {
  QTable t(5, 0.05, 0.85);
  const StateKey s{0, 1}, s2{0, 2};
  q_update(t, s, 3, 2.0, s2);
  EXPECT_NEAR(t.value(s, 3), 0.1, 1e-15);
  EXPECT_EQ(t.value(s, 0), 0.0);
  EXPECT_EQ(t.value(s2, 0), 0.0);
}

TEST(QUpdate, ZeroLearningRateLeavesValues) {
  QTable t(5, 0.0, 0.85);
  const StateKey s{1};
  q_update(t, s, 0, 2.0, s);
  EXPECT_EQ(t.value(s, 0), 0.0);
}

TEST(QUpdate, DecaysTowardZeroReward) {
  // Q(s,a) = 1 loaded from a table dump; r = 0 and gamma = 0 shrink it by alpha.
  std::stringstream io("qtable 2 0.05 0 1\n1 | 0 1\n");
  QTable t = QTable::load(io);
  const StateKey s{1}, s2{2};
  ASSERT_EQ(t.value(s, 1), 1.0);
  q_update(t, s, 1, 0.0, s2);
  EXPECT_NEAR(t.value(s, 1), 0.95, 1e-15);
}

TEST(QUpdate, TerminalDropsBootstrap) {
  QTable t(2, 0.5, 0.9);
  const StateKey s{1}, s2{2};
  t.update(s2, 0, 10.0, s2, true);  // Q(s2,0) = 5
  t.update(s, 0, 0.0, s2, true);
  EXPECT_EQ(t.value(s, 0), 0.0);
  t.update(s, 1, 0.0, s2, false);
  EXPECT_NEAR(t.value(s, 1), 0.5 * 0.9 * 5.0, 1e-12);
  EXPECT_THROW(t.update(s, 2, 0.0, s2), LogicFault);
}

TEST(EpsilonGreedy, GreedyPicksArgmax) {
  Rng rng(1);
  EXPECT_EQ(epsilon_greedy(vec({1, 3, 2, 0, 0}), 0.0, rng), 1u);
}

TEST(EpsilonGreedy, TiesGoToLowestIndex) {
  Rng rng(1);
  EXPECT_EQ(epsilon_greedy(vec({5, 5, 0, 0, 0}), 0.0, rng), 0u);
  EXPECT_EQ(greedy_action(vec({-1, 2, 2})), 1u);
}

TEST(EpsilonGreedy, FullExplorationIsUniform) {
  Rng rng(2024);
  std::vector<int> counts(5, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[epsilon_greedy(vec({9, 0, 0, 0, 0}), 1.0, rng)];
  for (int c : counts) EXPECT_NEAR(static_cast<double>(c) / n, 0.2, 0.01);
}

TEST(EpsilonGreedy, ZeroEpsilonIsPureFunctionOfValues) {
  Rng a(1), b(999);
  const auto q = vec({0.3, -1, 0.7, 0.7, 0.1});
  for (int i = 0; i < 100; ++i) EXPECT_EQ(epsilon_greedy(q, 0.0, a), epsilon_greedy(q, 0.0, b));
}

TEST(QTableIo, RoundTripIsExact) {
  QTable t(3, 0.05, 0.85);
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    const StateKey s{static_cast<std::uint16_t>(uniform_index(rng, 3)), static_cast<std::uint16_t>(uniform_index(rng, 8))};
    const StateKey s2{static_cast<std::uint16_t>(uniform_index(rng, 3)), static_cast<std::uint16_t>(uniform_index(rng, 8))};
    t.update(s, uniform_index(rng, 3), uniform01(rng) * 4 - 2, s2);
  }
  std::stringstream io;
  t.save(io);
  const QTable back = QTable::load(io);
  EXPECT_TRUE(back == t);
  EXPECT_EQ(back.size(), t.size());
}

TEST(QTableIo, RejectsGarbage) {
  std::stringstream io("qtable 3 0.05 0.85 1\n1 2 | 0 1\n");
  EXPECT_THROW(QTable::load(io), std::runtime_error);
  std::stringstream bad("nonsense");
  EXPECT_THROW(QTable::load(bad), std::runtime_error);
}

TEST(QTableProperty, ValuesStayWithinRewardBounds) {
  // |Q| is bounded by r_max / (1 - gamma) for rewards in [-41, 2].
  QTable t(5, 0.05, 0.85);
  Rng rng(8);
  const double rewards[] = {2, 1, 0, -1, -2, -10, -20, -40, -41};
  for (int i = 0; i < 200000; ++i) {
    const StateKey s{static_cast<std::uint16_t>(uniform_index(rng, 20))};
    const StateKey s2{static_cast<std::uint16_t>(uniform_index(rng, 20))};
    t.update(s, uniform_index(rng, 5), rewards[uniform_index(rng, 9)], s2);
  }
  for (std::uint16_t k = 0; k < 20; ++k)
    for (ActionId a = 0; a < 5; ++a) {
      EXPECT_LE(t.value({k}, a), 2.0 / 0.15 + 1e-9);
      EXPECT_GE(t.value({k}, a), -41.0 / 0.15 - 1e-9);
    }
}
