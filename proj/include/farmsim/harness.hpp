#ifndef FARMSIM_HARNESS_HPP_
#define FARMSIM_HARNESS_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "farmsim/config.hpp"
#include "farmsim/metrics.hpp"
#include "farmsim/policy.hpp"
#include "farmsim/simulator.hpp"

namespace farmsim {

/// Arrivals depend only on (master, seed index, episode) so every policy
/// sees the same task streams for a given seed index.
std::uint64_t evaluation_arrival_seed(std::uint64_t master, std::size_t seed_index, std::size_t episode);
std::uint64_t training_arrival_seed(std::uint64_t master, std::size_t seed_index, std::size_t episode);
/// Exploration, tie-breaking and weight initialisation streams.
std::uint64_t policy_seed(std::uint64_t master, std::string_view policy, std::size_t seed_index);

using AgentSet = std::vector<std::unique_ptr<LearningAgent>>;

struct TrainingRun {
  std::string policy;
  AgentSet agents;
  /// rewards[episode][agent]: cumulative reward of each UAV's agent.
  std::vector<std::vector<double>> rewards;

  /// Network average per episode.
  std::vector<double> mean_rewards() const;
};

struct TrainingOptions {
  std::size_t episodes = 0;
  std::uint64_t master_seed = 1;
  std::size_t seed_index = 0;
  /// Called with the number of completed episodes whenever a periodic
  /// checkpoint is due.
  std::function<void(std::size_t, const AgentSet&)> on_checkpoint;
};

AgentSet make_agents(const Config& cfg, std::string_view policy, std::uint64_t seed);
TrainingRun train(const Config& cfg, std::string_view policy, const TrainingOptions& opt);

/// Untrained copy of the learned parameters with exploration off.
std::unique_ptr<LearningAgent> frozen_copy(const LearningAgent& agent, const Config& cfg);

// Checkpoint directory: meta.json plus one agent_<j>.txt per UAV.
void save_checkpoint(const std::filesystem::path& dir, const Config& cfg, std::string_view policy,
                     const AgentSet& agents, std::size_t episodes, std::uint64_t master_seed);
AgentSet load_checkpoint(const std::filesystem::path& dir, const Config& cfg, std::string* policy = nullptr);
/// Human-readable description of a checkpoint directory.
std::string describe_checkpoint(const std::filesystem::path& dir);

struct EvaluationRun {
  std::string policy;
  std::size_t seed_index = 0;
  RunMetrics metrics;
};

/// Greedy rollouts of one policy over `seed_count` seed indices. `trained`
/// must be given for learning policies and is copied, never modified.
std::vector<EvaluationRun> evaluate(const Config& cfg, std::string_view policy, const AgentSet* trained,
                                    std::uint64_t master_seed, std::size_t seed_count);

struct PolicySummary {
  std::string policy;
  MeanStd min_battery;
  MeanStd violation_pct;
  MeanStd objective;
};

/// Per-policy aggregates ordered by objective mean, best first; ties keep
/// policy-name order.
std::vector<PolicySummary> summarize(const std::vector<EvaluationRun>& runs);

using Metadata = std::vector<std::pair<std::string, std::string>>;
Metadata csv_metadata(const Config& cfg, std::uint64_t master_seed);

void write_convergence_csv(std::ostream& out, const Metadata& meta, const std::vector<TrainingRun>& runs,
                           std::size_t window);
/// One row per (episode, UAV agent).
void write_agent_convergence_csv(std::ostream& out, const Metadata& meta, const std::vector<TrainingRun>& runs);
void write_battery_csv(std::ostream& out, const Metadata& meta, const std::vector<EvaluationRun>& runs);
void write_violations_csv(std::ostream& out, const Metadata& meta, const std::vector<EvaluationRun>& runs,
                          std::size_t num_uavs);
void write_summary_csv(std::ostream& out, const Metadata& meta, const std::vector<PolicySummary>& rows);

struct CompareResult {
  std::vector<TrainingRun> training;  // learners trained inline
  std::vector<EvaluationRun> runs;    // plan order: policy, then seed index
  std::vector<PolicySummary> summary;
};

/// Runs the whole plan. Learners come from experiment.checkpoint_dir when set
/// and are trained inline otherwise. Throws on the first failed run.
CompareResult run_compare(const Config& cfg, std::uint64_t master_seed);

/// Writes the compare CSVs into `dir` only after every run succeeded.
void write_compare_outputs(const std::filesystem::path& dir, const Config& cfg, std::uint64_t master_seed,
                           const CompareResult& r);

/// Runs `n` independent jobs on up to `workers` threads. Job results must be
/// written to caller-owned slots indexed by the job number.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& job);

}  // namespace farmsim

#endif  // FARMSIM_HARNESS_HPP_
