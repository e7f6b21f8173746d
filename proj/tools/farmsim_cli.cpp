// farmsim command-line front end.
//
//   farmsim train --policy dql --episodes 50 --seed 1 --out runs/dql
//   farmsim evaluate --policy qlearning --checkpoint runs/ql/checkpoint
//   farmsim compare --config farm.json --out runs/compare
//   farmsim inspect-checkpoint runs/dql/checkpoint
//
// Settings resolve as defaults < config file < FARMSIM_<SECTION>__<KEY>
// environment variables < command-line flags.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "farmsim/config.hpp"
#include "farmsim/harness.hpp"

extern char** environ;

namespace {

using namespace farmsim;

constexpr int kUsageError = 2;
constexpr int kRunError = 1;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> episodes;
  std::string policy;
  std::string out;
  std::string layout;
  std::string target;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "JSON configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "master seed (default: sim.seed)");
  cmd->add_option("--out", f.out, "output directory (default: experiment.output_dir)");
  cmd->add_option("--state-layout", f.layout, "state encoding")->check(CLI::IsMember({"paper10", "extended"}));
  cmd->add_option("--target-network", f.target, "DQL target network")->check(CLI::IsMember({"on", "off"}));
}

Config resolve(const CommonFlags& f) {
  Config cfg = f.config.empty() ? Config{} : load_config(f.config);
  apply_env_overrides(cfg, environ);
  if (f.seed) cfg.sim.seed = *f.seed;
  if (!f.out.empty()) cfg.experiment.output_dir = f.out;
  if (!f.layout.empty()) cfg.mdp.layout = parse_state_layout(f.layout);
  if (!f.target.empty()) cfg.rl.deep.target_network = f.target == "on";
  cfg.validate();
  return cfg;
}

void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  if (!out || !(out << s)) throw std::runtime_error("cannot write " + p.string());
}

int cmd_train(const CommonFlags& f) {
  if (f.policy.empty()) throw UsageError("train: --policy is required");
  if (!is_learning_policy(f.policy))
    throw UsageError("train: policy '" + f.policy + "' does not learn; use qlearning or dql");
  const Config cfg = resolve(f);
  const auto out = cfg.experiment.output_dir;
  TrainingOptions opt;
  opt.master_seed = cfg.sim.seed;
  if (f.episodes) {
    opt.episodes = *f.episodes;
  } else {
    const auto it = cfg.experiment.training_episodes.find(f.policy);
    if (it == cfg.experiment.training_episodes.end())
      throw UsageError("train: no episode count for " + f.policy + "; pass --episodes");
    opt.episodes = it->second;
  }
  opt.on_checkpoint = [&](std::size_t done, const AgentSet& agents) {
    save_checkpoint(out / "checkpoints" / ("episode_" + std::to_string(done)), cfg, f.policy, agents, done,
                    opt.master_seed);
  };
  std::vector<TrainingRun> runs;
  runs.push_back(train(cfg, f.policy, opt));

  const auto meta = csv_metadata(cfg, opt.master_seed);
  std::ostringstream conv, agents;
  write_convergence_csv(conv, meta, runs, cfg.experiment.smoothing_window);
  write_agent_convergence_csv(agents, meta, runs);
  std::filesystem::create_directories(out);
  save_checkpoint(out / "checkpoint", cfg, f.policy, runs[0].agents, opt.episodes, opt.master_seed);
  write_text(out / "convergence.csv", conv.str());
  write_text(out / "convergence_agents.csv", agents.str());

  const auto smoothed = moving_average(runs[0].mean_rewards(), cfg.experiment.smoothing_window).mean;
  const auto conv_ep =
      convergence_episode(smoothed, cfg.experiment.convergence_threshold, cfg.experiment.convergence_patience);
  std::cout << f.policy << ": trained " << opt.episodes << " episodes";
  if (!smoothed.empty()) std::cout << ", final smoothed reward " << smoothed.back();
  std::cout << ", convergence episode " << (conv_ep ? std::to_string(*conv_ep) : std::string("none")) << '\n'
            << "wrote " << (out / "convergence.csv").string() << " and " << (out / "checkpoint").string() << '\n';
  return 0;
}

int cmd_evaluate(const CommonFlags& f, const std::string& checkpoint, std::optional<std::size_t> seeds) {
  if (f.policy.empty()) throw UsageError("evaluate: --policy is required");
  if (!is_known_policy(f.policy)) throw UsageError("evaluate: unknown policy '" + f.policy + "'");
  Config cfg = resolve(f);
  if (f.episodes) cfg.experiment.evaluation_episodes = *f.episodes;
  AgentSet trained;
  if (is_learning_policy(f.policy)) {
    if (checkpoint.empty()) throw UsageError("evaluate: --checkpoint is required for " + f.policy);
    std::string stored;
    trained = load_checkpoint(checkpoint, cfg, &stored);
    if (stored != f.policy)
      throw UsageError("evaluate: checkpoint holds a " + stored + " agent, not " + f.policy);
  }
  const auto runs = evaluate(cfg, f.policy, trained.empty() ? nullptr : &trained, cfg.sim.seed,
                             seeds.value_or(cfg.experiment.num_seeds));
  const auto meta = csv_metadata(cfg, cfg.sim.seed);
  std::ostringstream battery, violations, summary;
  write_battery_csv(battery, meta, runs);
  write_violations_csv(violations, meta, runs, cfg.sim.num_uavs);
  write_summary_csv(summary, meta, summarize(runs));
  const auto out = cfg.experiment.output_dir;
  std::filesystem::create_directories(out);
  write_text(out / "battery.csv", battery.str());
  write_text(out / "violations.csv", violations.str());
  write_text(out / "summary.csv", summary.str());
  std::cout << summary.str();
  return 0;
}

int cmd_compare(const CommonFlags& f, const std::string& checkpoints) {
  Config cfg = resolve(f);
  if (!checkpoints.empty()) cfg.experiment.checkpoint_dir = checkpoints;
  if (f.episodes)
    for (auto& [name, n] : cfg.experiment.training_episodes) n = *f.episodes;
  const auto result = run_compare(cfg, cfg.sim.seed);
  write_compare_outputs(cfg.experiment.output_dir, cfg, cfg.sim.seed, result);
  std::ostringstream summary;
  write_summary_csv(summary, {}, result.summary);
  std::cout << summary.str();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UAV/MEC smart-farm task offloading simulator"};
  app.require_subcommand(1);

  CommonFlags train_f, eval_f, cmp_f;
  auto* train_cmd = app.add_subcommand("train", "train a learning policy and save a checkpoint");
  add_common(train_cmd, train_f);
  train_cmd->add_option("--policy", train_f.policy, "qlearning or dql");
  train_cmd->add_option("--episodes", train_f.episodes, "training episodes");

  std::string checkpoint;
  std::optional<std::size_t> seeds;
  auto* eval_cmd = app.add_subcommand("evaluate", "greedy rollouts of one policy over several seeds");
  add_common(eval_cmd, eval_f);
  eval_cmd->add_option("--policy", eval_f.policy, "rr, hef, qhef, qlearning or dql");
  eval_cmd->add_option("--episodes", eval_f.episodes, "evaluation episodes per seed");
  eval_cmd->add_option("--checkpoint", checkpoint, "checkpoint directory for learned policies");
  eval_cmd->add_option("--seeds", seeds, "number of seed indices (default: experiment.num_seeds)");

  std::string checkpoints;
  auto* cmp_cmd = app.add_subcommand("compare", "run every policy of the experiment plan and rank them");
  add_common(cmp_cmd, cmp_f);
  cmp_cmd->add_option("--episodes", cmp_f.episodes, "training episodes for every learner");
  cmp_cmd->add_option("--checkpoints", checkpoints, "directory with <policy>/ checkpoints; skips training");

  std::string inspect_dir;
  auto* inspect_cmd = app.add_subcommand("inspect-checkpoint", "print what a checkpoint holds");
  inspect_cmd->add_option("dir", inspect_dir, "checkpoint directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) return cmd_train(train_f);
    if (*eval_cmd) return cmd_evaluate(eval_f, checkpoint, seeds);
    if (*cmp_cmd) return cmd_compare(cmp_f, checkpoints);
    if (*inspect_cmd) {
      std::cout << describe_checkpoint(inspect_dir);
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRunError;
  }
  return kUsageError;
}
