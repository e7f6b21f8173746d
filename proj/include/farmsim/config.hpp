#ifndef FARMSIM_CONFIG_HPP_
#define FARMSIM_CONFIG_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "farmsim/types.hpp"

namespace farmsim {

/// Per-type workload and service parameters. Defaults follow the smart-farm
/// workload table (fire / pest / growth).
struct TaskTypeSpec {
  TaskType type = TaskType::FireDetection;
  Seconds mean_interarrival = 0.25;
  Seconds deadline = 0.3;
  Seconds proc_time_uav = 0.1;
  Seconds proc_time_mec = 0.05;

  Seconds proc_time(UnitKind kind) const { return kind == UnitKind::Uav ? proc_time_uav : proc_time_mec; }
  void validate() const;
};

using TaskTable = std::array<TaskTypeSpec, kNumTaskTypes>;

TaskTable default_task_table();

struct SimConfig {
  std::size_t num_uavs = 4;
  std::size_t num_mecs = 1;
  Seconds episode_duration = 60.0;
  // Transmission delays are not modelled at the radio level; these are
  // fixed per-hop latencies.
  Seconds iot_to_uav_delay = 0.010;
  Seconds uav_to_uav_delay = 0.015;
  Seconds uav_to_mec_delay = 0.020;
  std::uint64_t seed = 1;
  double objective_weight_w = 0.5;
  /// Violation normaliser. Empty means "total tasks generated in the run".
  std::optional<double> violation_scale_theta;

  std::size_t num_units() const { return num_uavs + num_mecs; }
  UnitKind kind_of(UnitId u) const { return u < num_uavs ? UnitKind::Uav : UnitKind::Mec; }
  /// Hop latency for a task decided at `from` (a UAV) and processed at `to`.
  Seconds transfer_delay(UnitId from, UnitId to) const {
    if (from == to) return 0.0;
    return kind_of(to) == UnitKind::Uav ? uav_to_uav_delay : uav_to_mec_delay;
  }
  void validate() const;
};

/// Average power draws in watts; capacity in watt-hours.
struct EnergyParams {
  double battery_capacity_wh = 570.0;
  double hover_power = 211.0;
  double antenna_power = 17.0;
  double cpu_idle_power = 4320.0;
  double cpu_busy_power = 12960.0;
  /// Multiplier applied to both CPU rates (1.0 keeps the inflated defaults).
  double cpu_scale = 1.0;

  double idle_cpu() const { return cpu_idle_power * cpu_scale; }
  double busy_cpu() const { return cpu_busy_power * cpu_scale; }
  void validate() const;
};

enum class StateLayout { Base, Extended };
enum class RewardTiming { Immediate, Deferred };

std::string_view to_string(StateLayout l);
StateLayout parse_state_layout(std::string_view s);

struct RewardConfig {
  /// Battery-fraction threshold separating the reward tiers.
  double energy_threshold_e = 0.001;
  double tier_best = 2.0;
  double tier_worst = 0.0;
  double tier_middle = 1.0;
  double penalty_mec_avoidable = -40.0;
  double penalty_local_avoidable = -20.0;
  double penalty_other_avoidable = -10.0;
  double penalty_unavoidable = -1.0;
  void validate() const;
};

struct MdpConfig {
  RewardConfig reward;
  StateLayout layout = StateLayout::Base;
  RewardTiming timing = RewardTiming::Immediate;
  /// Mark the last transition of an episode terminal (no bootstrap).
  bool terminal_at_episode_end = true;
};

struct HeuristicParams {
  /// Battery-fraction margin a remote UAV must exceed to attract a task.
  double hef_threshold = 0.01;
  double qhef_threshold = 0.01;
  /// Delays within this distance of the minimum count as minimal.
  Seconds queue_tie_tolerance = 1e-12;
};

struct EpsilonSchedule {
  double start = 1.0;
  double end = 0.05;
  /// Fraction of the training run over which epsilon decays linearly.
  double decay_fraction = 0.8;
  /// Absolute decay length in episodes; overrides decay_fraction when set.
  std::optional<std::size_t> decay_episodes;

  double at(std::size_t episode, std::size_t total_episodes) const;
  void validate() const;
};

struct TabularParams {
  double learning_rate = 0.05;
  double discount = 0.85;
  std::size_t delay_bins = 8;
  std::size_t battery_bins = 10;
};

struct DeepParams {
  std::vector<std::size_t> hidden = {32, 32};
  std::size_t batch_size = 500;
  std::size_t replay_capacity = 100000;
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double discount = 0.85;
  bool target_network = false;
  std::size_t target_sync_steps = 200;
  /// Decisions between gradient steps once the buffer holds a full batch.
  std::size_t train_every = 1;
};

struct RlConfig {
  TabularParams tabular;
  DeepParams deep;
  EpsilonSchedule epsilon;
  /// Save a checkpoint every N training episodes (0 = only at the end).
  std::size_t checkpoint_every = 0;
};

struct ExperimentPlan {
  std::vector<std::string> policies = {"rr", "hef", "qhef", "qlearning", "dql"};
  std::size_t num_seeds = 10;
  std::map<std::string, std::size_t> training_episodes = {{"qlearning", 600}, {"dql", 60}};
  std::size_t evaluation_episodes = 1;
  std::filesystem::path output_dir = "out";
  /// Directory holding one trained checkpoint per learner (`<dir>/<policy>`).
  /// Empty means `compare` trains learners inline.
  std::filesystem::path checkpoint_dir;
  std::size_t smoothing_window = 100;
  double convergence_threshold = 100.0;
  std::size_t convergence_patience = 10;
  std::size_t workers = 1;
  void validate() const;
};

/// Full configuration, one member per file section.
struct Config {
  SimConfig sim;
  EnergyParams energy;
  TaskTable tasks = default_task_table();
  MdpConfig mdp;
  HeuristicParams heuristics;
  RlConfig rl;
  ExperimentPlan experiment;

  void validate() const;
  const TaskTypeSpec& task(TaskType t) const { return tasks[index_of(t)]; }
  Seconds max_deadline() const;
};

/// Reads a JSON configuration file. Missing keys keep their defaults; unknown
/// keys raise ConfigError naming the offending key.
Config load_config(const std::filesystem::path& path);
Config parse_config(const std::string& json_text);
/// Applies FARMSIM_<SECTION>__<KEY>=value environment overrides.
void apply_env_overrides(Config& cfg, char** envp);
std::string to_json(const Config& cfg);
/// Stable 64-bit digest of the canonical JSON form.
std::uint64_t config_hash(const Config& cfg);

}  // namespace farmsim

#endif  // FARMSIM_CONFIG_HPP_
