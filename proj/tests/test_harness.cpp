#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "farmsim/harness.hpp"

using namespace farmsim;
namespace fs = std::filesystem;

namespace {

Config tiny() {
  Config cfg;
  cfg.sim.num_uavs = 2;
  cfg.sim.num_mecs = 1;
  cfg.sim.episode_duration = 3.0;
  cfg.rl.deep.batch_size = 32;
  cfg.experiment.policies = {"rr", "qhef", "qlearning", "dql"};
  cfg.experiment.num_seeds = 3;
  cfg.experiment.training_episodes = {{"qlearning", 6}, {"dql", 3}};
  cfg.experiment.smoothing_window = 2;
  cfg.experiment.workers = 2;
  return cfg;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("farmsim_harness_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST(Seeds, StreamsAreSeparated) {
  EXPECT_NE(evaluation_arrival_seed(1, 0, 0), training_arrival_seed(1, 0, 0));
  EXPECT_NE(evaluation_arrival_seed(1, 0, 0), evaluation_arrival_seed(1, 1, 0));
  EXPECT_NE(evaluation_arrival_seed(1, 0, 0), evaluation_arrival_seed(2, 0, 0));
  EXPECT_NE(policy_seed(1, "dql", 0), policy_seed(1, "qlearning", 0));
  EXPECT_EQ(policy_seed(1, "dql", 4), policy_seed(1, "dql", 4));
}

TEST(Training, IsReproducible) {
  const Config cfg = tiny();
  TrainingOptions opt;
  opt.episodes = 4;
  const auto a = train(cfg, "qlearning", opt);
  const auto b = train(cfg, "qlearning", opt);
  ASSERT_EQ(a.rewards.size(), 4u);
  EXPECT_EQ(a.rewards, b.rewards);
  EXPECT_EQ(a.mean_rewards().size(), 4u);
}

TEST(Training, CheckpointCallbackCadence) {
  Config cfg = tiny();
  cfg.rl.checkpoint_every = 2;
  TrainingOptions opt;
  opt.episodes = 5;
  std::vector<std::size_t> calls;
  opt.on_checkpoint = [&](std::size_t done, const AgentSet&) { calls.push_back(done); };
  train(cfg, "qlearning", opt);
  EXPECT_EQ(calls, (std::vector<std::size_t>{2, 4}));
}

TEST(Checkpoint, RoundTripPreservesGreedyBehaviour) {
  const Config cfg = tiny();
  TrainingOptions opt;
  opt.episodes = 2;
  for (const char* p : {"qlearning", "dql"}) {
    const auto run = train(cfg, p, opt);
    const auto dir = scratch(std::string("ckpt_") + p);
    save_checkpoint(dir, cfg, p, run.agents, 2, 1);
    std::string name;
    const auto back = load_checkpoint(dir, cfg, &name);
    EXPECT_EQ(name, p);
    const auto e1 = evaluate(cfg, p, &run.agents, 1, 2);
    const auto e2 = evaluate(cfg, p, &back, 1, 2);
    ASSERT_EQ(e1.size(), 2u);
    for (std::size_t i = 0; i < e1.size(); ++i) {
      EXPECT_EQ(e1[i].metrics.battery_fraction, e2[i].metrics.battery_fraction);
      EXPECT_EQ(e1[i].metrics.violations_per_unit, e2[i].metrics.violations_per_unit);
    }
    EXPECT_NE(describe_checkpoint(dir).find(p), std::string::npos);
  }
}

TEST(Checkpoint, ShapeMismatchIsRejected) {
  const Config cfg = tiny();
  TrainingOptions opt;
  opt.episodes = 1;
  const auto run = train(cfg, "dql", opt);
  const auto dir = scratch("shape");
  save_checkpoint(dir, cfg, "dql", run.agents, 1, 1);
  Config other = cfg;
  other.sim.num_uavs = 3;
  EXPECT_THROW(load_checkpoint(dir, other), ConfigError);
  Config layout = cfg;
  layout.mdp.layout = StateLayout::Extended;
  EXPECT_THROW(load_checkpoint(dir, layout), ConfigError);
  EXPECT_THROW(load_checkpoint(scratch("missing"), cfg), std::runtime_error);
}

TEST(Evaluation, LearnerWithoutParametersIsRejected) {
  EXPECT_THROW(evaluate(tiny(), "dql", nullptr, 1, 1), std::exception);
}

TEST(Compare, ObjectiveRecomputesFromRuns) {
  const Config cfg = tiny();
  const auto r = run_compare(cfg, 5);
  ASSERT_EQ(r.runs.size(), 4u * 3u);
  ASSERT_EQ(r.summary.size(), 4u);
  for (const auto& run : r.runs) {
    const auto& m = run.metrics;
    EXPECT_DOUBLE_EQ(m.objective, objective_value(m.min_battery(), m.total_violations(), m.total_tasks, 0.5));
  }
  for (std::size_t i = 1; i < r.summary.size(); ++i)
    EXPECT_GE(r.summary[i - 1].objective.mean, r.summary[i].objective.mean);
  EXPECT_EQ(r.training.size(), 2u);
}

TEST(Compare, OutputsAreDeterministicAcrossWorkerCounts) {
  Config cfg = tiny();
  const auto a = scratch("det_a"), b = scratch("det_b");
  write_compare_outputs(a, cfg, 5, run_compare(cfg, 5));
  cfg.experiment.workers = 1;
  write_compare_outputs(b, cfg, 5, run_compare(cfg, 5));
  for (const char* f : {"battery.csv", "violations.csv", "summary.csv", "convergence.csv"}) {
    auto slurp = [](const fs::path& p) {
      std::ifstream in(p);
      std::stringstream ss;
      ss << in.rdbuf();
      return ss.str();
    };
    const auto ta = slurp(a / f), tb = slurp(b / f);
    EXPECT_FALSE(ta.empty()) << f;
    EXPECT_EQ(strip_metadata(ta), strip_metadata(tb)) << f;
  }
}

TEST(Compare, MissingTrainingBudgetIsAnError) {
  Config cfg = tiny();
  cfg.experiment.training_episodes.erase("dql");
  EXPECT_THROW(run_compare(cfg, 1), std::exception);
}

TEST(ParallelFor, RunsEveryJobAndRethrows) {
  std::vector<int> hit(50, 0);
  parallel_for(50, 4, [&](std::size_t i) { hit[i] = 1; });
  EXPECT_EQ(std::count(hit.begin(), hit.end(), 1), 50);
  EXPECT_THROW(parallel_for(10, 3,
                            [](std::size_t i) {
                              if (i == 6) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
}
