#include "farmsim/policy.hpp"

#include <fstream>

namespace farmsim {

void LearningAgent::begin_episode(std::uint64_t seed) {
  rng_.seed(seed);
  pending_.clear();
}

ActionId LearningAgent::select(const DecisionContext& ctx) {
  if (!pending_.empty() && !pending_.back().next_state) pending_.back().next_state = ctx.state;
  flush();
  const ActionId a = choose(ctx.state, training_ ? epsilon_ : 0.0, rng_);
  if (training_) pending_.push_back({ctx.task.id, ctx.state, a, std::nullopt, std::nullopt, false});
  return a;
}

void LearningAgent::reward(TaskId task, double r) {
  if (!training_) return;
  for (auto it = pending_.rbegin(); it != pending_.rend(); ++it) {
    if (it->task == task) {
      it->reward = r;
      break;
    }
  }
  flush();
}

void LearningAgent::end_episode() {
  if (training_ && !pending_.empty()) {
    auto& last = pending_.back();
    if (!last.next_state) {
      last.next_state = last.state;
      last.terminal = terminal_at_end_;
    }
    flush();
  }
  pending_.clear();
}

void LearningAgent::flush() {
  while (!pending_.empty() && pending_.front().reward && pending_.front().next_state) {
    Step& s = pending_.front();
    learn(Transition{std::move(s.state), s.action, *s.reward, std::move(*s.next_state), s.terminal});
    pending_.pop_front();
  }
}

// ---------------------------------------------------------------------------

Discretizer make_discretizer(const Config& cfg) {
  Discretizer g;
  g.num_units = cfg.sim.num_units();
  g.num_uavs = cfg.sim.num_uavs;
  g.delay_bins = cfg.rl.tabular.delay_bins;
  g.battery_bins = cfg.rl.tabular.battery_bins;
  g.top_delay_edge = 2.0 * cfg.max_deadline();
  return g;
}

QLearningAgent::QLearningAgent(const Config& cfg)
    : QLearningAgent(cfg, QTable(cfg.sim.num_units(), cfg.rl.tabular.learning_rate, cfg.rl.tabular.discount)) {}

QLearningAgent::QLearningAgent(const Config& cfg, QTable table)
    : LearningAgent(cfg.sim.num_units(), cfg.mdp.terminal_at_episode_end),
      grid_(make_discretizer(cfg)),
      table_(std::move(table)) {
  if (table_.num_actions() != cfg.sim.num_units())
    throw ConfigError("q-table has " + std::to_string(table_.num_actions()) + " actions, network has " +
                      std::to_string(cfg.sim.num_units()) + " units");
}

ActionId QLearningAgent::choose(const StateVector& state, double epsilon, Rng& rng) {
  return epsilon_greedy(table_.values(discretize_state(state, grid_)), epsilon, rng);
}

void QLearningAgent::learn(const Transition& t) {
  table_.update(discretize_state(t.state, grid_), t.action, t.reward, discretize_state(t.next_state, grid_),
                t.terminal);
}

void QLearningAgent::save(const std::filesystem::path& file) const {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  table_.save(out);
}

QLearningAgent QLearningAgent::load(const Config& cfg, const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read checkpoint " + file.string());
  return QLearningAgent(cfg, QTable::load(in));
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> network_widths(const Config& cfg) {
  std::vector<std::size_t> w{state_width(cfg.mdp.layout, cfg.sim.num_uavs, cfg.sim.num_mecs)};
  w.insert(w.end(), cfg.rl.deep.hidden.begin(), cfg.rl.deep.hidden.end());
  w.push_back(cfg.sim.num_units());
  return w;
}

namespace {

AdamParams adam_params(const DeepParams& p) { return {p.learning_rate, p.beta1, p.beta2, p.adam_epsilon}; }

QNetwork initial_network(const Config& cfg, std::uint64_t seed) {
  Rng rng(seed);
  return QNetwork::glorot_uniform(network_widths(cfg), rng);
}

}  // namespace

DqlAgent::DqlAgent(const Config& cfg, std::uint64_t init_seed) : DqlAgent(cfg, initial_network(cfg, init_seed)) {}

DqlAgent::DqlAgent(const Config& cfg, QNetwork net)
    : LearningAgent(cfg.sim.num_units(), cfg.mdp.terminal_at_episode_end),
      params_(cfg.rl.deep),
      net_(std::move(net)),
      adam_(net_, adam_params(cfg.rl.deep)),
      buffer_(cfg.rl.deep.replay_capacity) {
  if (net_.widths() != network_widths(cfg))
    throw ConfigError("network shape does not match the configured state layout and unit count");
  if (params_.target_network) target_ = net_;
}

ActionId DqlAgent::choose(const StateVector& state, double epsilon, Rng& rng) {
  return dql_act(net_, state, epsilon, rng);
}

void DqlAgent::learn(const Transition& t) {
  buffer_.push(t);
  ++decisions_;
  if (buffer_.size() < params_.batch_size || decisions_ % params_.train_every != 0) return;
  const auto batch = buffer_.sample(params_.batch_size, rng());
  last_loss_ = train_batch(net_, adam_, batch, params_.discount, target_ ? &*target_ : nullptr);
  ++train_steps_;
  if (target_ && params_.target_sync_steps > 0 && train_steps_ % params_.target_sync_steps == 0) *target_ = net_;
}

void DqlAgent::save(const std::filesystem::path& file) const {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  save_mlp(out, net_);
}

DqlAgent DqlAgent::load(const Config& cfg, const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read checkpoint " + file.string());
  return DqlAgent(cfg, load_mlp<double>(in));
}

// ---------------------------------------------------------------------------

bool is_learning_policy(std::string_view name) { return name == "qlearning" || name == "dql"; }

bool is_known_policy(std::string_view name) {
  return name == "rr" || name == "hef" || name == "qhef" || is_learning_policy(name);
}

std::unique_ptr<Policy> make_policy(std::string_view name, const Config& cfg, UnitId uav, std::uint64_t agent_seed) {
  if (name == "rr") return std::make_unique<RoundRobinPolicy>();
  if (name == "hef") return std::make_unique<HefPolicy>(cfg.heuristics.hef_threshold);
  if (name == "qhef") return std::make_unique<QhefPolicy>(cfg.heuristics);
  if (name == "qlearning") return std::make_unique<QLearningAgent>(cfg);
  if (name == "dql") return std::make_unique<DqlAgent>(cfg, derive_seed(agent_seed, {tag_of("init"), uav}));
  throw ConfigError("unknown policy '" + std::string(name) + "' (expected rr, hef, qhef, qlearning or dql)");
}

}  // namespace farmsim
