#include <gtest/gtest.h>

#include <cstdlib>
#include <string>
#include <vector>

#include "farmsim/config.hpp"

using namespace farmsim;

TEST(Config, DefaultsMatchWorkloadTable) {
  const Config c;
  EXPECT_EQ(c.sim.num_uavs, 4u);
  EXPECT_EQ(c.sim.num_mecs, 1u);
  const auto& fire = c.task(TaskType::FireDetection);
  EXPECT_DOUBLE_EQ(fire.mean_interarrival, 0.25);
  EXPECT_DOUBLE_EQ(fire.deadline, 0.3);
  EXPECT_DOUBLE_EQ(fire.proc_time_uav, 0.1);
  EXPECT_DOUBLE_EQ(fire.proc_time_mec, 0.05);
  const auto& pest = c.task(TaskType::PestDetection);
  EXPECT_DOUBLE_EQ(pest.mean_interarrival, 0.25);
  EXPECT_DOUBLE_EQ(pest.deadline, 0.8);
  EXPECT_DOUBLE_EQ(pest.proc_time_uav, 0.5);
  EXPECT_DOUBLE_EQ(pest.proc_time_mec, 0.25);
  const auto& growth = c.task(TaskType::GrowthMonitoring);
  EXPECT_DOUBLE_EQ(growth.mean_interarrival, 0.5);
  EXPECT_DOUBLE_EQ(growth.deadline, 5.0);
  EXPECT_DOUBLE_EQ(growth.proc_time_uav, 0.1);
  EXPECT_DOUBLE_EQ(growth.proc_time_mec, 0.05);
  EXPECT_DOUBLE_EQ(c.max_deadline(), 5.0);

  EXPECT_DOUBLE_EQ(c.energy.battery_capacity_wh, 570.0);
  EXPECT_DOUBLE_EQ(c.energy.hover_power, 211.0);
  EXPECT_DOUBLE_EQ(c.energy.antenna_power, 17.0);
  EXPECT_DOUBLE_EQ(c.energy.cpu_idle_power, 4320.0);
  EXPECT_DOUBLE_EQ(c.energy.cpu_busy_power, 12960.0);

  EXPECT_DOUBLE_EQ(c.rl.tabular.learning_rate, 0.05);
  EXPECT_DOUBLE_EQ(c.rl.tabular.discount, 0.85);
  EXPECT_EQ(c.rl.deep.batch_size, 500u);
  EXPECT_EQ(c.rl.deep.replay_capacity, 100000u);
  EXPECT_DOUBLE_EQ(c.rl.deep.learning_rate, 0.001);
  EXPECT_FALSE(c.rl.deep.target_network);
  EXPECT_EQ(c.mdp.layout, StateLayout::Base);
  EXPECT_DOUBLE_EQ(c.mdp.reward.energy_threshold_e, 0.001);
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, EmptyDocumentGivesDefaults) {
  const Config c = parse_config("{}");
  EXPECT_EQ(to_json(c), to_json(Config{}));
  EXPECT_EQ(config_hash(c), config_hash(Config{}));
}

TEST(Config, PartialSectionsKeepOtherDefaults) {
  const Config c = parse_config(R"({
    // comments are allowed
    "sim": {"num_uavs": 2, "episode_duration": 12.5},
    "tasks": {"pest": {"deadline": 1.5}},
    "rl": {"epsilon": {"decay_episodes": 40}}
  })");
  EXPECT_EQ(c.sim.num_uavs, 2u);
  EXPECT_DOUBLE_EQ(c.sim.episode_duration, 12.5);
  EXPECT_EQ(c.sim.num_mecs, 1u);
  EXPECT_DOUBLE_EQ(c.task(TaskType::PestDetection).deadline, 1.5);
  EXPECT_DOUBLE_EQ(c.task(TaskType::PestDetection).proc_time_uav, 0.5);
  ASSERT_TRUE(c.rl.epsilon.decay_episodes.has_value());
  EXPECT_EQ(*c.rl.epsilon.decay_episodes, 40u);
}

TEST(Config, UnknownKeyIsNamed) {
  try {
    parse_config(R"({"sim": {"num_uav": 3}})");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("sim.num_uav"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_config(R"({"bogus": {}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"tasks": {"rain": {"deadline": 1}}})"), ConfigError);
}

TEST(Config, TypeErrorsAndBadValuesAreRejected) {
  EXPECT_THROW(parse_config(R"({"sim": {"num_uavs": "four"}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"sim": {"num_uavs": 0}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"energy": {"cpu_busy_power": 1.0}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"mdp": {"state_layout": "wide"}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"experiment": {"policies": []}})"), ConfigError);
  EXPECT_THROW(parse_config("[1, 2]"), ConfigError);
  EXPECT_THROW(parse_config("{ not json"), ConfigError);
}

TEST(Config, ZeroLengthEpisodeIsAllowed) {
  EXPECT_NO_THROW(parse_config(R"({"sim": {"episode_duration": 0}})"));
  EXPECT_THROW(parse_config(R"({"sim": {"episode_duration": -1}})"), ConfigError);
}

TEST(Config, JsonRoundTrip) {
  Config c;
  c.sim.num_uavs = 3;
  c.sim.violation_scale_theta = 250.0;
  c.mdp.layout = StateLayout::Extended;
  c.rl.deep.hidden = {16, 8};
  c.rl.epsilon.decay_episodes = 7;
  c.experiment.training_episodes["dql"] = 12;
  const Config back = parse_config(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
  EXPECT_EQ(config_hash(back), config_hash(c));
  ASSERT_TRUE(back.sim.violation_scale_theta.has_value());
  EXPECT_DOUBLE_EQ(*back.sim.violation_scale_theta, 250.0);
}

TEST(Config, HashTracksContent) {
  Config a, b;
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.energy.cpu_scale = 0.5;
  EXPECT_NE(config_hash(a), config_hash(b));
  Config c;
  c.experiment.output_dir = "elsewhere";
  c.experiment.workers = 8;
  EXPECT_EQ(config_hash(a), config_hash(c));
}

TEST(Config, EnvironmentOverrides) {
  Config c;
  std::vector<std::string> vars = {"FARMSIM_SIM__NUM_UAVS=2", "FARMSIM_TASKS__FIRE__DEADLINE=0.4",
                                   "FARMSIM_RL__DEEP__TARGET_NETWORK=true", "FARMSIM_MDP__STATE_LAYOUT=extended",
                                   "PATH=/usr/bin", "FARMSIM_NO_EQUALS"};
  std::vector<char*> envp;
  for (auto& v : vars) envp.push_back(v.data());
  envp.push_back(nullptr);
  apply_env_overrides(c, envp.data());
  EXPECT_EQ(c.sim.num_uavs, 2u);
  EXPECT_DOUBLE_EQ(c.task(TaskType::FireDetection).deadline, 0.4);
  EXPECT_TRUE(c.rl.deep.target_network);
  EXPECT_EQ(c.mdp.layout, StateLayout::Extended);
}

TEST(Config, UnknownEnvironmentOverrideIsNamed) {
  Config c;
  std::string bad = "FARMSIM_SIM__WINGSPAN=3";
  char* envp[] = {bad.data(), nullptr};
  try {
    apply_env_overrides(c, envp);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("sim.wingspan"), std::string::npos) << e.what();
  }
}

TEST(Config, EpsilonSchedule) {
  EpsilonSchedule s;
  EXPECT_DOUBLE_EQ(s.at(0, 100), 1.0);
  EXPECT_DOUBLE_EQ(s.at(80, 100), 0.05);
  EXPECT_DOUBLE_EQ(s.at(99, 100), 0.05);
  EXPECT_NEAR(s.at(40, 100), 0.525, 1e-12);
  for (std::size_t e = 1; e < 100; ++e) EXPECT_LE(s.at(e, 100), s.at(e - 1, 100));
  s.decay_episodes = 10;
  EXPECT_DOUBLE_EQ(s.at(0, 1000), 1.0);
  EXPECT_NEAR(s.at(5, 1000), 0.525, 1e-12);
  EXPECT_DOUBLE_EQ(s.at(10, 1000), 0.05);
  EXPECT_DOUBLE_EQ(s.at(500, 1000), 0.05);
}

TEST(Config, TransferDelays) {
  const SimConfig s;
  EXPECT_DOUBLE_EQ(s.transfer_delay(1, 1), 0.0);
  EXPECT_DOUBLE_EQ(s.transfer_delay(1, 2), 0.015);
  EXPECT_DOUBLE_EQ(s.transfer_delay(1, 4), 0.020);
  EXPECT_EQ(s.kind_of(3), UnitKind::Uav);
  EXPECT_EQ(s.kind_of(4), UnitKind::Mec);
}
