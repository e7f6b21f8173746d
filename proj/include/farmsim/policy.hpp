#ifndef FARMSIM_POLICY_HPP_
#define FARMSIM_POLICY_HPP_

#include <cstdint>
#include <deque>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "farmsim/config.hpp"
#include "farmsim/dqn.hpp"
#include "farmsim/heuristics.hpp"
#include "farmsim/mdp.hpp"
#include "farmsim/tabular.hpp"
#include "farmsim/task.hpp"

namespace farmsim {

struct DecisionContext {
  const TaskInstance& task;
  const NetworkSnapshot& snapshot;
  const StateVector& state;
};

/// Per-UAV offloading policy. The simulator calls select() once per task that
/// reaches the UAV and reports the shaped reward for that task via reward().
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  virtual void begin_episode(std::uint64_t seed) = 0;
  virtual ActionId select(const DecisionContext& ctx) = 0;
  virtual void reward(TaskId /*task*/, double /*r*/) {}
  virtual void end_episode() {}
};

class RoundRobinPolicy final : public Policy {
 public:
  /// The cursor restarts at `start` every episode.
  explicit RoundRobinPolicy(std::size_t start = 0) : counter_(start), start_(start) {}
  std::string name() const override { return "rr"; }
  void begin_episode(std::uint64_t) override { counter_ = start_; }
  ActionId select(const DecisionContext& ctx) override { return rr_select(counter_, ctx.snapshot); }
  std::size_t counter() const { return counter_; }

 private:
  std::size_t counter_;
  std::size_t start_;
};

class HefPolicy final : public Policy {
 public:
  explicit HefPolicy(double threshold = 0.01) : threshold_(threshold) {}
  std::string name() const override { return "hef"; }
  void begin_episode(std::uint64_t seed) override { rng_.seed(seed); }
  ActionId select(const DecisionContext& ctx) override { return hef_select(ctx.snapshot, rng_, threshold_); }

 private:
  double threshold_;
  Rng rng_;
};

class QhefPolicy final : public Policy {
 public:
  explicit QhefPolicy(HeuristicParams p = {}) : params_(p) {}
  std::string name() const override { return "qhef"; }
  void begin_episode(std::uint64_t) override {}
  ActionId select(const DecisionContext& ctx) override {
    return qhef_select(ctx.snapshot, params_.qhef_threshold, params_.queue_tie_tolerance);
  }

 private:
  HeuristicParams params_;
};

/// Shared bookkeeping for the learners: pairs each decision with the next
/// decision's state and with its (possibly late) reward, then hands complete
/// transitions to learn() in decision order.
class LearningAgent : public Policy {
 public:
  LearningAgent(std::size_t num_actions, bool terminal_at_episode_end)
      : num_actions_(num_actions), terminal_at_end_(terminal_at_episode_end) {}

  void begin_episode(std::uint64_t seed) override;
  ActionId select(const DecisionContext& ctx) override;
  void reward(TaskId task, double r) override;
  void end_episode() override;

  void set_epsilon(double e) { epsilon_ = e; }
  double epsilon() const { return epsilon_; }
  /// Frozen agents act greedily on their current estimates and never learn.
  void set_training(bool on) { training_ = on; }
  bool training() const { return training_; }
  std::size_t num_actions() const { return num_actions_; }

  virtual void save(const std::filesystem::path& file) const = 0;

 protected:
  virtual ActionId choose(const StateVector& state, double epsilon, Rng& rng) = 0;
  virtual void learn(const Transition& t) = 0;
  Rng& rng() { return rng_; }

 private:
  struct Step {
    TaskId task;
    StateVector state;
    ActionId action;
    std::optional<double> reward;
    std::optional<StateVector> next_state;
    bool terminal = false;
  };
  void flush();

  std::size_t num_actions_;
  bool terminal_at_end_;
  double epsilon_ = 0.0;
  bool training_ = true;
  Rng rng_;
  std::deque<Step> pending_;
};

class QLearningAgent final : public LearningAgent {
 public:
  QLearningAgent(const Config& cfg);
  QLearningAgent(const Config& cfg, QTable table);
  std::string name() const override { return "qlearning"; }
  const QTable& table() const { return table_; }
  const Discretizer& grid() const { return grid_; }
  void save(const std::filesystem::path& file) const override;
  static QLearningAgent load(const Config& cfg, const std::filesystem::path& file);

 protected:
  ActionId choose(const StateVector& state, double epsilon, Rng& rng) override;
  void learn(const Transition& t) override;

 private:
  Discretizer grid_;
  QTable table_;
};

class DqlAgent final : public LearningAgent {
 public:
  /// `init_seed` seeds the weight initialisation.
  DqlAgent(const Config& cfg, std::uint64_t init_seed);
  DqlAgent(const Config& cfg, QNetwork net);
  std::string name() const override { return "dql"; }
  const QNetwork& network() const { return net_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  std::size_t train_steps() const { return train_steps_; }
  double last_loss() const { return last_loss_; }
  void save(const std::filesystem::path& file) const override;
  static DqlAgent load(const Config& cfg, const std::filesystem::path& file);

 protected:
  ActionId choose(const StateVector& state, double epsilon, Rng& rng) override;
  void learn(const Transition& t) override;

 private:
  DeepParams params_;
  QNetwork net_;
  std::optional<QNetwork> target_;
  AdamState<double> adam_;
  ReplayBuffer buffer_;
  std::size_t decisions_ = 0;
  std::size_t train_steps_ = 0;
  double last_loss_ = 0;
};

Discretizer make_discretizer(const Config& cfg);
std::vector<std::size_t> network_widths(const Config& cfg);

bool is_learning_policy(std::string_view name);
bool is_known_policy(std::string_view name);

/// Fresh (untrained) policy instance for one UAV. `agent_seed` seeds learned
/// parameters where applicable.
std::unique_ptr<Policy> make_policy(std::string_view name, const Config& cfg, UnitId uav, std::uint64_t agent_seed);

}  // namespace farmsim

#endif  // FARMSIM_POLICY_HPP_
