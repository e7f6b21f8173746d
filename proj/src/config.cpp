#include "farmsim/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace farmsim {

using nlohmann::json;

std::string_view to_string(TaskType t) {
  switch (t) {
    case TaskType::FireDetection: return "fire";
    case TaskType::PestDetection: return "pest";
    case TaskType::GrowthMonitoring: return "growth";
  }
  return "unknown";
}

std::optional<TaskType> parse_task_type(std::string_view s) {
  for (auto t : kAllTaskTypes)
    if (to_string(t) == s) return t;
  return std::nullopt;
}

std::string_view to_string(StateLayout l) { return l == StateLayout::Base ? "paper10" : "extended"; }

StateLayout parse_state_layout(std::string_view s) {
  if (s == "paper10" || s == "base") return StateLayout::Base;
  if (s == "extended") return StateLayout::Extended;
  throw ConfigError("unknown state layout '" + std::string(s) + "' (expected paper10 or extended)");
}

TaskTable default_task_table() {
  return {{
      {TaskType::FireDetection, 0.25, 0.3, 0.1, 0.05},
      {TaskType::PestDetection, 0.25, 0.8, 0.5, 0.25},
      {TaskType::GrowthMonitoring, 0.5, 5.0, 0.1, 0.05},
  }};
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

void TaskTypeSpec::validate() const {
  const std::string name(to_string(type));
  require(mean_interarrival > 0 && deadline > 0 && proc_time_uav > 0 && proc_time_mec > 0,
          "tasks." + name + ": all values must be positive");
  require(proc_time_mec <= proc_time_uav, "tasks." + name + ": proc_time_mec must not exceed proc_time_uav");
  require(deadline > proc_time_mec, "tasks." + name + ": deadline must exceed proc_time_mec");
}

void SimConfig::validate() const {
  require(num_uavs >= 1, "sim.num_uavs must be at least 1");
  require(episode_duration >= 0, "sim.episode_duration must be non-negative");
  require(iot_to_uav_delay >= 0 && uav_to_uav_delay >= 0 && uav_to_mec_delay >= 0,
          "sim delays must be non-negative");
  require(objective_weight_w >= 0 && objective_weight_w <= 1, "sim.objective_weight_w must lie in [0,1]");
  require(!violation_scale_theta || *violation_scale_theta > 0, "sim.violation_scale_theta must be positive");
}

void EnergyParams::validate() const {
  require(battery_capacity_wh > 0, "energy.battery_capacity_wh must be positive");
  require(cpu_idle_power >= 0 && cpu_busy_power >= cpu_idle_power,
          "energy: require cpu_busy_power >= cpu_idle_power >= 0");
  require(hover_power >= 0 && antenna_power >= 0 && cpu_scale >= 0, "energy: powers must be non-negative");
}

void RewardConfig::validate() const {
  require(energy_threshold_e > 0, "mdp.energy_threshold_e must be positive");
}

double EpsilonSchedule::at(std::size_t episode, std::size_t total_episodes) const {
  const double span = decay_episodes ? static_cast<double>(*decay_episodes)
                                     : decay_fraction * static_cast<double>(total_episodes);
  if (span <= 0.0) return end;
  const double progress = static_cast<double>(episode) / span;
  if (progress >= 1.0) return end;
  return start + (end - start) * progress;
}

void EpsilonSchedule::validate() const {
  require(start >= 0 && start <= 1 && end >= 0 && end <= 1, "rl.epsilon values must lie in [0,1]");
  require(decay_fraction >= 0 && decay_fraction <= 1, "rl.epsilon.decay_fraction must lie in [0,1]");
}

void ExperimentPlan::validate() const {
  require(!policies.empty(), "experiment.policies must not be empty");
  require(num_seeds >= 1, "experiment.num_seeds must be at least 1");
  require(smoothing_window >= 1 && convergence_patience >= 1, "experiment window/patience must be >= 1");
  require(workers >= 1, "experiment.workers must be >= 1");
}

void Config::validate() const {
  sim.validate();
  energy.validate();
  for (const auto& t : tasks) t.validate();
  mdp.reward.validate();
  rl.epsilon.validate();
  require(rl.tabular.delay_bins >= 2 && rl.tabular.battery_bins >= 1, "rl.tabular bins too small");
  require(rl.deep.batch_size >= 1 && rl.deep.replay_capacity >= rl.deep.batch_size,
          "rl.deep.replay_capacity must be >= batch_size");
  require(rl.deep.train_every >= 1, "rl.deep.train_every must be >= 1");
  require(!rl.deep.hidden.empty(), "rl.deep.hidden must list at least one layer");
  experiment.validate();
}

Seconds Config::max_deadline() const {
  Seconds m = 0;
  for (const auto& t : tasks) m = std::max(m, t.deadline);
  return m;
}

// ---------------------------------------------------------------------------
// JSON mapping

namespace {

json task_json(const TaskTypeSpec& t) {
  return {{"mean_interarrival", t.mean_interarrival},
          {"deadline", t.deadline},
          {"proc_time_uav", t.proc_time_uav},
          {"proc_time_mec", t.proc_time_mec}};
}

json to_json_tree(const Config& c) {
  json j;
  j["sim"] = {{"num_uavs", c.sim.num_uavs},
              {"num_mecs", c.sim.num_mecs},
              {"episode_duration", c.sim.episode_duration},
              {"iot_to_uav_delay", c.sim.iot_to_uav_delay},
              {"uav_to_uav_delay", c.sim.uav_to_uav_delay},
              {"uav_to_mec_delay", c.sim.uav_to_mec_delay},
              {"seed", c.sim.seed},
              {"objective_weight_w", c.sim.objective_weight_w},
              {"violation_scale_theta",
               c.sim.violation_scale_theta ? json(*c.sim.violation_scale_theta) : json(nullptr)}};
  j["energy"] = {{"battery_capacity_wh", c.energy.battery_capacity_wh},
                 {"hover_power", c.energy.hover_power},
                 {"antenna_power", c.energy.antenna_power},
                 {"cpu_idle_power", c.energy.cpu_idle_power},
                 {"cpu_busy_power", c.energy.cpu_busy_power},
                 {"cpu_scale", c.energy.cpu_scale}};
  j["tasks"] = json::object();
  for (const auto& t : c.tasks) j["tasks"][std::string(to_string(t.type))] = task_json(t);
  const auto& r = c.mdp.reward;
  j["mdp"] = {{"energy_threshold_e", r.energy_threshold_e},
              {"tier_best", r.tier_best},
              {"tier_middle", r.tier_middle},
              {"tier_worst", r.tier_worst},
              {"penalty_mec_avoidable", r.penalty_mec_avoidable},
              {"penalty_local_avoidable", r.penalty_local_avoidable},
              {"penalty_other_avoidable", r.penalty_other_avoidable},
              {"penalty_unavoidable", r.penalty_unavoidable},
              {"state_layout", std::string(to_string(c.mdp.layout))},
              {"reward_timing", c.mdp.timing == RewardTiming::Immediate ? "immediate" : "deferred"},
              {"terminal_at_episode_end", c.mdp.terminal_at_episode_end}};
  j["heuristics"] = {{"hef_threshold", c.heuristics.hef_threshold},
                     {"qhef_threshold", c.heuristics.qhef_threshold},
                     {"queue_tie_tolerance", c.heuristics.queue_tie_tolerance}};
  const auto& e = c.rl.epsilon;
  const auto& d = c.rl.deep;
  j["rl"] = {{"tabular",
              {{"learning_rate", c.rl.tabular.learning_rate},
               {"discount", c.rl.tabular.discount},
               {"delay_bins", c.rl.tabular.delay_bins},
               {"battery_bins", c.rl.tabular.battery_bins}}},
             {"deep",
              {{"hidden", d.hidden},
               {"batch_size", d.batch_size},
               {"replay_capacity", d.replay_capacity},
               {"learning_rate", d.learning_rate},
               {"beta1", d.beta1},
               {"beta2", d.beta2},
               {"adam_epsilon", d.adam_epsilon},
               {"discount", d.discount},
               {"target_network", d.target_network},
               {"target_sync_steps", d.target_sync_steps},
               {"train_every", d.train_every}}},
             {"epsilon",
              {{"start", e.start},
               {"end", e.end},
               {"decay_fraction", e.decay_fraction},
               {"decay_episodes", e.decay_episodes ? json(*e.decay_episodes) : json(nullptr)}}},
             {"checkpoint_every", c.rl.checkpoint_every}};
  const auto& x = c.experiment;
  j["experiment"] = {{"policies", x.policies},
                     {"num_seeds", x.num_seeds},
                     {"training_episodes", x.training_episodes},
                     {"evaluation_episodes", x.evaluation_episodes},
                     {"output_dir", x.output_dir.string()},
                     {"checkpoint_dir", x.checkpoint_dir.string()},
                     {"smoothing_window", x.smoothing_window},
                     {"convergence_threshold", x.convergence_threshold},
                     {"convergence_patience", x.convergence_patience},
                     {"workers", x.workers}};
  return j;
}

// Keys whose value is an open-ended map rather than a fixed record.
bool is_open_map(const std::string& path) { return path == "experiment.training_episodes"; }

void check_known_keys(const json& input, const json& defaults, const std::string& path) {
  if (!input.is_object()) return;
  for (auto it = input.begin(); it != input.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!defaults.contains(it.key())) throw ConfigError("unknown config key '" + key + "'");
    const auto& def = defaults.at(it.key());
    if (def.is_object() && !is_open_map(key)) {
      if (!it.value().is_object()) throw ConfigError("config key '" + key + "' must be a section");
      check_known_keys(it.value(), def, key);
    }
  }
}

template <class T>
void read(const json& j, const char* section, const char* key, T& out) {
  try {
    out = j.at(section).at(key).get<T>();
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("config key '") + section + "." + key + "': " + ex.what());
  }
}

template <class T>
void read(const json& j, const char* section, const char* sub, const char* key, T& out) {
  try {
    out = j.at(section).at(sub).at(key).get<T>();
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("config key '") + section + "." + sub + "." + key + "': " + ex.what());
  }
}

Config from_json_tree(const json& j) {
  Config c;
  read(j, "sim", "num_uavs", c.sim.num_uavs);
  read(j, "sim", "num_mecs", c.sim.num_mecs);
  read(j, "sim", "episode_duration", c.sim.episode_duration);
  read(j, "sim", "iot_to_uav_delay", c.sim.iot_to_uav_delay);
  read(j, "sim", "uav_to_uav_delay", c.sim.uav_to_uav_delay);
  read(j, "sim", "uav_to_mec_delay", c.sim.uav_to_mec_delay);
  read(j, "sim", "seed", c.sim.seed);
  read(j, "sim", "objective_weight_w", c.sim.objective_weight_w);
  if (const auto& th = j.at("sim").at("violation_scale_theta"); !th.is_null()) {
    double v = 0;
    read(j, "sim", "violation_scale_theta", v);
    c.sim.violation_scale_theta = v;
  }

  read(j, "energy", "battery_capacity_wh", c.energy.battery_capacity_wh);
  read(j, "energy", "hover_power", c.energy.hover_power);
  read(j, "energy", "antenna_power", c.energy.antenna_power);
  read(j, "energy", "cpu_idle_power", c.energy.cpu_idle_power);
  read(j, "energy", "cpu_busy_power", c.energy.cpu_busy_power);
  read(j, "energy", "cpu_scale", c.energy.cpu_scale);

  for (auto& t : c.tasks) {
    const std::string name(to_string(t.type));
    read(j, "tasks", name.c_str(), "mean_interarrival", t.mean_interarrival);
    read(j, "tasks", name.c_str(), "deadline", t.deadline);
    read(j, "tasks", name.c_str(), "proc_time_uav", t.proc_time_uav);
    read(j, "tasks", name.c_str(), "proc_time_mec", t.proc_time_mec);
  }

  auto& r = c.mdp.reward;
  read(j, "mdp", "energy_threshold_e", r.energy_threshold_e);
  read(j, "mdp", "tier_best", r.tier_best);
  read(j, "mdp", "tier_middle", r.tier_middle);
  read(j, "mdp", "tier_worst", r.tier_worst);
  read(j, "mdp", "penalty_mec_avoidable", r.penalty_mec_avoidable);
  read(j, "mdp", "penalty_local_avoidable", r.penalty_local_avoidable);
  read(j, "mdp", "penalty_other_avoidable", r.penalty_other_avoidable);
  read(j, "mdp", "penalty_unavoidable", r.penalty_unavoidable);
  std::string layout, timing;
  read(j, "mdp", "state_layout", layout);
  c.mdp.layout = parse_state_layout(layout);
  read(j, "mdp", "reward_timing", timing);
  if (timing == "immediate")
    c.mdp.timing = RewardTiming::Immediate;
  else if (timing == "deferred")
    c.mdp.timing = RewardTiming::Deferred;
  else
    throw ConfigError("config key 'mdp.reward_timing': expected immediate or deferred");
  read(j, "mdp", "terminal_at_episode_end", c.mdp.terminal_at_episode_end);

  read(j, "heuristics", "hef_threshold", c.heuristics.hef_threshold);
  read(j, "heuristics", "qhef_threshold", c.heuristics.qhef_threshold);
  read(j, "heuristics", "queue_tie_tolerance", c.heuristics.queue_tie_tolerance);

  read(j, "rl", "tabular", "learning_rate", c.rl.tabular.learning_rate);
  read(j, "rl", "tabular", "discount", c.rl.tabular.discount);
  read(j, "rl", "tabular", "delay_bins", c.rl.tabular.delay_bins);
  read(j, "rl", "tabular", "battery_bins", c.rl.tabular.battery_bins);
  auto& d = c.rl.deep;
  read(j, "rl", "deep", "hidden", d.hidden);
  read(j, "rl", "deep", "batch_size", d.batch_size);
  read(j, "rl", "deep", "replay_capacity", d.replay_capacity);
  read(j, "rl", "deep", "learning_rate", d.learning_rate);
  read(j, "rl", "deep", "beta1", d.beta1);
  read(j, "rl", "deep", "beta2", d.beta2);
  read(j, "rl", "deep", "adam_epsilon", d.adam_epsilon);
  read(j, "rl", "deep", "discount", d.discount);
  read(j, "rl", "deep", "target_network", d.target_network);
  read(j, "rl", "deep", "target_sync_steps", d.target_sync_steps);
  read(j, "rl", "deep", "train_every", d.train_every);
  auto& e = c.rl.epsilon;
  read(j, "rl", "epsilon", "start", e.start);
  read(j, "rl", "epsilon", "end", e.end);
  read(j, "rl", "epsilon", "decay_fraction", e.decay_fraction);
  if (!j.at("rl").at("epsilon").at("decay_episodes").is_null()) {
    std::size_t n = 0;
    read(j, "rl", "epsilon", "decay_episodes", n);
    e.decay_episodes = n;
  }
  read(j, "rl", "checkpoint_every", c.rl.checkpoint_every);

  auto& x = c.experiment;
  read(j, "experiment", "policies", x.policies);
  read(j, "experiment", "num_seeds", x.num_seeds);
  read(j, "experiment", "training_episodes", x.training_episodes);
  read(j, "experiment", "evaluation_episodes", x.evaluation_episodes);
  std::string out;
  read(j, "experiment", "output_dir", out);
  x.output_dir = out;
  std::string ckpt = x.checkpoint_dir.string();
  read(j, "experiment", "checkpoint_dir", ckpt);
  x.checkpoint_dir = ckpt;
  read(j, "experiment", "smoothing_window", x.smoothing_window);
  read(j, "experiment", "convergence_threshold", x.convergence_threshold);
  read(j, "experiment", "convergence_patience", x.convergence_patience);
  read(j, "experiment", "workers", x.workers);
  return c;
}

Config overlay(const json& input) {
  const json defaults = to_json_tree(Config{});
  check_known_keys(input, defaults, "");
  json merged = defaults;
  merged.merge_patch(input);
  // merge_patch drops keys explicitly set to null; restore them as null.
  for (const char* k : {"violation_scale_theta"})
    if (!merged["sim"].contains(k)) merged["sim"][k] = nullptr;
  if (!merged["rl"]["epsilon"].contains("decay_episodes")) merged["rl"]["epsilon"]["decay_episodes"] = nullptr;
  Config c = from_json_tree(merged);
  c.validate();
  return c;
}

}  // namespace

Config parse_config(const std::string& json_text) {
  json input;
  try {
    input = json::parse(json_text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& ex) {
    throw ConfigError(std::string("config parse error: ") + ex.what());
  }
  if (!input.is_object()) throw ConfigError("config root must be an object");
  return overlay(input);
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void apply_env_overrides(Config& cfg, char** envp) {
  if (envp == nullptr) return;
  static constexpr std::string_view kPrefix = "FARMSIM_";
  json patch = json::object();
  bool any = false;
  for (char** e = envp; *e != nullptr; ++e) {
    std::string_view entry(*e);
    if (entry.substr(0, kPrefix.size()) != kPrefix) continue;
    const auto eq = entry.find('=');
    if (eq == std::string_view::npos) continue;
    std::string name(entry.substr(kPrefix.size(), eq - kPrefix.size()));
    const std::string value(entry.substr(eq + 1));
    std::transform(name.begin(), name.end(), name.begin(), [](unsigned char ch) { return std::tolower(ch); });
    // SECTION__SUB__KEY -> nested path
    json* node = &patch;
    std::size_t pos = 0;
    while (true) {
      const auto next = name.find("__", pos);
      const std::string part = name.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
      if (next == std::string::npos) {
        json parsed = json::parse(value, nullptr, false);
        (*node)[part] = parsed.is_discarded() ? json(value) : parsed;
        break;
      }
      node = &(*node)[part];
      pos = next + 2;
    }
    any = true;
  }
  if (!any) return;
  json base = to_json_tree(cfg);
  check_known_keys(patch, base, "");
  base.merge_patch(patch);
  if (!base["sim"].contains("violation_scale_theta")) base["sim"]["violation_scale_theta"] = nullptr;
  if (!base["rl"]["epsilon"].contains("decay_episodes")) base["rl"]["epsilon"]["decay_episodes"] = nullptr;
  cfg = from_json_tree(base);
  cfg.validate();
}

std::string to_json(const Config& cfg) { return to_json_tree(cfg).dump(2); }

std::uint64_t config_hash(const Config& cfg) {
  // FNV-1a over the compact canonical dump (nlohmann sorts object keys).
  // Where outputs go and how many threads run them does not change results.
  auto tree = to_json_tree(cfg);
  for (const char* k : {"output_dir", "checkpoint_dir", "workers"}) tree["experiment"].erase(k);
  const std::string s = tree.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace farmsim
