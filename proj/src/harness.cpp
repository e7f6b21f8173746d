#include "farmsim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace farmsim {

using nlohmann::json;

std::uint64_t evaluation_arrival_seed(std::uint64_t master, std::size_t seed_index, std::size_t episode) {
  return derive_seed(master, {tag_of("evaluate"), seed_index, episode});
}

std::uint64_t training_arrival_seed(std::uint64_t master, std::size_t seed_index, std::size_t episode) {
  return derive_seed(master, {tag_of("train"), seed_index, episode});
}

std::uint64_t policy_seed(std::uint64_t master, std::string_view policy, std::size_t seed_index) {
  return derive_seed(master, {tag_of("policy"), tag_of(policy), seed_index});
}

std::vector<double> TrainingRun::mean_rewards() const {
  std::vector<double> out;
  out.reserve(rewards.size());
  for (const auto& ep : rewards) {
    double s = 0;
    for (double r : ep) s += r;
    out.push_back(ep.empty() ? 0.0 : s / static_cast<double>(ep.size()));
  }
  return out;
}

namespace {

std::vector<Policy*> raw_pointers(const AgentSet& agents) {
  std::vector<Policy*> p;
  for (const auto& a : agents) p.push_back(a.get());
  return p;
}

std::string hex(std::uint64_t v) {
  std::ostringstream s;
  s << "0x" << std::hex << v;
  return s.str();
}

std::string unit_label(std::size_t unit, std::size_t num_uavs) {
  return unit < num_uavs ? "uav" + std::to_string(unit) : "mec" + std::to_string(unit - num_uavs);
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + p.string());
}

std::filesystem::path agent_file(const std::filesystem::path& dir, std::size_t j) {
  return dir / ("agent_" + std::to_string(j) + ".txt");
}

}  // namespace

AgentSet make_agents(const Config& cfg, std::string_view policy, std::uint64_t seed) {
  if (!is_learning_policy(policy))
    throw ConfigError("policy '" + std::string(policy) + "' does not learn (expected qlearning or dql)");
  AgentSet agents;
  for (std::size_t j = 0; j < cfg.sim.num_uavs; ++j) {
    if (policy == "qlearning")
      agents.push_back(std::make_unique<QLearningAgent>(cfg));
    else
      agents.push_back(std::make_unique<DqlAgent>(cfg, derive_seed(seed, {tag_of("init"), j})));
  }
  return agents;
}

TrainingRun train(const Config& cfg, std::string_view policy, const TrainingOptions& opt) {
  const std::uint64_t seed = policy_seed(opt.master_seed, policy, opt.seed_index);
  TrainingRun run{std::string(policy), make_agents(cfg, policy, seed), {}};
  const auto ptrs = raw_pointers(run.agents);
  run.rewards.reserve(opt.episodes);
  for (std::size_t ep = 0; ep < opt.episodes; ++ep) {
    const double eps = cfg.rl.epsilon.at(ep, opt.episodes);
    for (auto& a : run.agents) {
      a->set_training(true);
      a->set_epsilon(eps);
    }
    const EpisodeSeeds seeds{training_arrival_seed(opt.master_seed, opt.seed_index, ep),
                             derive_seed(seed, {tag_of("episode"), ep})};
    run.rewards.push_back(run_episode(cfg, ptrs, seeds).cumulative_reward);
    const std::size_t done = ep + 1;
    if (opt.on_checkpoint && cfg.rl.checkpoint_every > 0 && done % cfg.rl.checkpoint_every == 0 &&
        done < opt.episodes)
      opt.on_checkpoint(done, run.agents);
  }
  for (auto& a : run.agents) a->set_training(false);
  return run;
}

std::unique_ptr<LearningAgent> frozen_copy(const LearningAgent& agent, const Config& cfg) {
  std::unique_ptr<LearningAgent> out;
  if (const auto* q = dynamic_cast<const QLearningAgent*>(&agent))
    out = std::make_unique<QLearningAgent>(cfg, q->table());
  else if (const auto* d = dynamic_cast<const DqlAgent*>(&agent))
    out = std::make_unique<DqlAgent>(cfg, d->network());
  else
    throw LogicFault("frozen_copy: unsupported agent type");
  out->set_training(false);
  out->set_epsilon(0.0);
  return out;
}

// ---------------------------------------------------------------------------

void save_checkpoint(const std::filesystem::path& dir, const Config& cfg, std::string_view policy,
                     const AgentSet& agents, std::size_t episodes, std::uint64_t master_seed) {
  std::filesystem::create_directories(dir);
  json meta = {{"format", "farmsim-checkpoint"},
               {"version", FARMSIM_VERSION},
               {"policy", policy},
               {"num_uavs", cfg.sim.num_uavs},
               {"num_mecs", cfg.sim.num_mecs},
               {"state_layout", to_string(cfg.mdp.layout)},
               {"episodes", episodes},
               {"master_seed", master_seed},
               {"config_hash", hex(config_hash(cfg))}};
  if (policy == "dql") meta["widths"] = network_widths(cfg);
  for (std::size_t j = 0; j < agents.size(); ++j) agents[j]->save(agent_file(dir, j));
  write_file(dir / "meta.json", meta.dump(2) + "\n");
}

AgentSet load_checkpoint(const std::filesystem::path& dir, const Config& cfg, std::string* policy_out) {
  const auto meta_path = dir / "meta.json";
  if (!std::filesystem::exists(meta_path)) throw std::runtime_error("checkpoint not found: " + dir.string());
  const json meta = json::parse(read_file(meta_path));
  const auto policy = meta.at("policy").get<std::string>();
  const auto uavs = meta.at("num_uavs").get<std::size_t>();
  const auto mecs = meta.at("num_mecs").get<std::size_t>();
  const auto layout = meta.at("state_layout").get<std::string>();
  if (uavs != cfg.sim.num_uavs || mecs != cfg.sim.num_mecs)
    throw ConfigError("checkpoint " + dir.string() + " was trained for " + std::to_string(uavs) + " UAVs + " +
                      std::to_string(mecs) + " MECs, config has " + std::to_string(cfg.sim.num_uavs) + " + " +
                      std::to_string(cfg.sim.num_mecs));
  if (parse_state_layout(layout) != cfg.mdp.layout)
    throw ConfigError("checkpoint " + dir.string() + " uses state layout " + layout);
  AgentSet agents;
  for (std::size_t j = 0; j < uavs; ++j) {
    const auto file = agent_file(dir, j);
    if (policy == "qlearning")
      agents.push_back(std::make_unique<QLearningAgent>(QLearningAgent::load(cfg, file)));
    else if (policy == "dql")
      agents.push_back(std::make_unique<DqlAgent>(DqlAgent::load(cfg, file)));
    else
      throw ConfigError("checkpoint " + dir.string() + " names unknown policy '" + policy + "'");
    agents.back()->set_training(false);
  }
  if (policy_out) *policy_out = policy;
  return agents;
}

std::string describe_checkpoint(const std::filesystem::path& dir) {
  const auto meta_path = dir / "meta.json";
  if (!std::filesystem::exists(meta_path)) throw std::runtime_error("checkpoint not found: " + dir.string());
  const json meta = json::parse(read_file(meta_path));
  std::ostringstream out;
  for (const auto& [k, v] : meta.items()) out << k << ": " << v.dump() << '\n';
  const auto policy = meta.at("policy").get<std::string>();
  const auto uavs = meta.at("num_uavs").get<std::size_t>();
  for (std::size_t j = 0; j < uavs; ++j) {
    std::ifstream in(agent_file(dir, j));
    if (!in) throw std::runtime_error("missing agent file " + agent_file(dir, j).string());
    out << "agent " << j << ": ";
    if (policy == "qlearning") {
      const auto t = QTable::load(in);
      out << t.size() << " visited states, " << t.num_actions() << " actions\n";
    } else {
      const auto net = load_mlp<double>(in);
      out << "widths";
      for (auto w : net.widths()) out << ' ' << w;
      out << ", " << net.parameter_count() << " parameters\n";
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& job) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  std::vector<std::exception_ptr> errors(n);
  auto run = [&](std::size_t i) {
    try {
      job(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) run(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) run(i);
      });
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

namespace {

EvaluationRun evaluate_one(const Config& cfg, std::string_view policy, const AgentSet* trained,
                           std::uint64_t master, std::size_t seed_index) {
  std::vector<std::unique_ptr<Policy>> owned;
  const std::uint64_t seed = policy_seed(master, policy, seed_index);
  for (std::size_t j = 0; j < cfg.sim.num_uavs; ++j) {
    if (is_learning_policy(policy)) {
      if (!trained || trained->size() != cfg.sim.num_uavs)
        throw ConfigError("policy '" + std::string(policy) + "' needs a trained agent per UAV");
      owned.push_back(frozen_copy(*(*trained)[j], cfg));
    } else {
      owned.push_back(make_policy(policy, cfg, j, seed));
    }
  }
  std::vector<Policy*> ptrs;
  for (auto& p : owned) ptrs.push_back(p.get());
  std::vector<EpisodeResult> episodes;
  for (std::size_t e = 0; e < cfg.experiment.evaluation_episodes; ++e) {
    const EpisodeSeeds seeds{evaluation_arrival_seed(master, seed_index, e),
                             derive_seed(seed, {tag_of("evaluate"), e})};
    episodes.push_back(run_episode(cfg, ptrs, seeds));
  }
  return {std::string(policy), seed_index,
          pool_metrics(episodes, cfg.sim.objective_weight_w, cfg.sim.violation_scale_theta)};
}

template <typename F>
auto with_context(const std::string& what, F&& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    throw std::runtime_error(what + ": " + e.what());
  }
}

}  // namespace

std::vector<EvaluationRun> evaluate(const Config& cfg, std::string_view policy, const AgentSet* trained,
                                    std::uint64_t master_seed, std::size_t seed_count) {
  if (!is_known_policy(policy)) throw ConfigError("unknown policy '" + std::string(policy) + "'");
  std::vector<EvaluationRun> runs(seed_count);
  parallel_for(seed_count, cfg.experiment.workers, [&](std::size_t i) {
    runs[i] = with_context(std::string(policy) + " seed " + std::to_string(i),
                           [&] { return evaluate_one(cfg, policy, trained, master_seed, i); });
  });
  return runs;
}

std::vector<PolicySummary> summarize(const std::vector<EvaluationRun>& runs) {
  std::vector<std::string> order;
  for (const auto& r : runs)
    if (std::find(order.begin(), order.end(), r.policy) == order.end()) order.push_back(r.policy);
  std::vector<PolicySummary> rows;
  for (const auto& name : order) {
    std::vector<double> mb, vp, obj;
    for (const auto& r : runs) {
      if (r.policy != name) continue;
      mb.push_back(r.metrics.min_battery());
      vp.push_back(r.metrics.violation_pct());
      obj.push_back(r.metrics.objective);
    }
    rows.push_back({name, mean_std(mb), mean_std(vp), mean_std(obj)});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const PolicySummary& a, const PolicySummary& b) {
    if (a.objective.mean != b.objective.mean) return a.objective.mean > b.objective.mean;
    return a.policy < b.policy;
  });
  return rows;
}

// ---------------------------------------------------------------------------

Metadata csv_metadata(const Config& cfg, std::uint64_t master_seed) {
  const auto grid = make_discretizer(cfg);
  std::ostringstream g;
  g << "delay " << grid.delay_bins << " geometric bins (ratio 2, top edge " << format_double(grid.top_delay_edge)
    << " s), battery " << grid.battery_bins << " uniform bins";
  return {{"farmsim_version", FARMSIM_VERSION},
          {"config_hash", hex(config_hash(cfg))},
          {"master_seed", std::to_string(master_seed)},
          {"state_layout", std::string(to_string(cfg.mdp.layout))},
          {"tabular_grid", g.str()}};
}

void write_convergence_csv(std::ostream& out, const Metadata& meta, const std::vector<TrainingRun>& runs,
                           std::size_t window) {
  Metadata m = meta;
  m.emplace_back("raw_reward", "episode cumulative reward averaged over UAV agents");
  m.emplace_back("band", "min/max of raw_reward over the trailing " + std::to_string(window) + "-episode window");
  CsvWriter csv(out, m, {"episode", "raw_reward", "smoothed", "band_lo", "band_hi", "agent"});
  for (const auto& run : runs) {
    const auto raw = run.mean_rewards();
    const auto s = moving_average(raw, window);
    for (std::size_t i = 0; i < raw.size(); ++i) {
      csv.field(i).field(raw[i]).field(s.mean[i]).field(s.band_lo[i]).field(s.band_hi[i]).field(run.policy);
      csv.end_row();
    }
  }
}

void write_agent_convergence_csv(std::ostream& out, const Metadata& meta, const std::vector<TrainingRun>& runs) {
  CsvWriter csv(out, meta, {"episode", "agent", "policy", "reward"});
  for (const auto& run : runs)
    for (std::size_t i = 0; i < run.rewards.size(); ++i)
      for (std::size_t j = 0; j < run.rewards[i].size(); ++j) {
        csv.field(i).field("uav" + std::to_string(j)).field(run.policy).field(run.rewards[i][j]);
        csv.end_row();
      }
}

void write_battery_csv(std::ostream& out, const Metadata& meta, const std::vector<EvaluationRun>& runs) {
  Metadata m = meta;
  m.emplace_back("fraction", "remaining battery fraction at the horizon, mean over evaluation episodes");
  CsvWriter csv(out, m, {"policy", "seed", "uav", "fraction"});
  for (const auto& r : runs)
    for (std::size_t j = 0; j < r.metrics.battery_fraction.size(); ++j) {
      csv.field(r.policy).field(r.seed_index).field(j).field(r.metrics.battery_fraction[j]);
      csv.end_row();
    }
}

void write_violations_csv(std::ostream& out, const Metadata& meta, const std::vector<EvaluationRun>& runs,
                          std::size_t num_uavs) {
  Metadata m = meta;
  m.emplace_back("pct", "violations at the unit over all generated tasks, percent");
  CsvWriter csv(out, m, {"policy", "seed", "unit", "pct"});
  for (const auto& r : runs) {
    const auto total = static_cast<double>(r.metrics.total_tasks);
    for (std::size_t u = 0; u < r.metrics.violations_per_unit.size(); ++u) {
      const double pct =
          total > 0 ? 100.0 * static_cast<double>(r.metrics.violations_per_unit[u]) / total : 0.0;
      csv.field(r.policy).field(r.seed_index).field(unit_label(u, num_uavs)).field(pct);
      csv.end_row();
    }
  }
}

void write_summary_csv(std::ostream& out, const Metadata& meta, const std::vector<PolicySummary>& rows) {
  Metadata m = meta;
  m.emplace_back("ranking", "objective_mean, best first");
  CsvWriter csv(out, m,
                {"rank", "policy", "min_battery_mean", "min_battery_std", "violation_pct_mean", "violation_pct_std",
                 "objective_mean", "objective_std"});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    csv.field(i + 1)
        .field(r.policy)
        .field(r.min_battery.mean)
        .field(r.min_battery.std)
        .field(r.violation_pct.mean)
        .field(r.violation_pct.std)
        .field(r.objective.mean)
        .field(r.objective.std);
    csv.end_row();
  }
}

// ---------------------------------------------------------------------------

CompareResult run_compare(const Config& cfg, std::uint64_t master_seed) {
  const auto& plan = cfg.experiment;
  for (const auto& p : plan.policies)
    if (!is_known_policy(p)) throw ConfigError("experiment.policies: unknown policy '" + p + "'");

  std::vector<std::string> learners;
  for (const auto& p : plan.policies)
    if (is_learning_policy(p)) learners.push_back(p);

  CompareResult result;
  std::vector<AgentSet> trained(learners.size());
  if (!plan.checkpoint_dir.empty()) {
    for (std::size_t i = 0; i < learners.size(); ++i)
      trained[i] = with_context("loading " + learners[i],
                                [&] { return load_checkpoint(plan.checkpoint_dir / learners[i], cfg); });
  } else {
    result.training.resize(learners.size());
    parallel_for(learners.size(), plan.workers, [&](std::size_t i) {
      const auto it = plan.training_episodes.find(learners[i]);
      if (it == plan.training_episodes.end())
        throw ConfigError("experiment.training_episodes has no entry for " + learners[i]);
      TrainingOptions opt;
      opt.episodes = it->second;
      opt.master_seed = master_seed;
      result.training[i] =
          with_context("training " + learners[i], [&] { return train(cfg, learners[i], opt); });
    });
    for (std::size_t i = 0; i < learners.size(); ++i) trained[i] = std::move(result.training[i].agents);
  }

  struct Job {
    std::string policy;
    const AgentSet* agents;
    std::size_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& p : plan.policies) {
    const AgentSet* a = nullptr;
    if (const auto it = std::find(learners.begin(), learners.end(), p); it != learners.end())
      a = &trained[static_cast<std::size_t>(it - learners.begin())];
    for (std::size_t s = 0; s < plan.num_seeds; ++s) jobs.push_back({p, a, s});
  }
  result.runs.resize(jobs.size());
  parallel_for(jobs.size(), plan.workers, [&](std::size_t i) {
    const auto& j = jobs[i];
    result.runs[i] = with_context(j.policy + " seed " + std::to_string(j.seed),
                                  [&] { return evaluate_one(cfg, j.policy, j.agents, master_seed, j.seed); });
  });
  result.summary = summarize(result.runs);
  return result;
}

void write_compare_outputs(const std::filesystem::path& dir, const Config& cfg, std::uint64_t master_seed,
                           const CompareResult& r) {
  const auto meta = csv_metadata(cfg, master_seed);
  std::ostringstream battery, violations, summary, convergence, agents;
  write_battery_csv(battery, meta, r.runs);
  write_violations_csv(violations, meta, r.runs, cfg.sim.num_uavs);
  write_summary_csv(summary, meta, r.summary);
  if (!r.training.empty()) {
    write_convergence_csv(convergence, meta, r.training, cfg.experiment.smoothing_window);
    write_agent_convergence_csv(agents, meta, r.training);
  }
  std::filesystem::create_directories(dir);
  write_file(dir / "battery.csv", battery.str());
  write_file(dir / "violations.csv", violations.str());
  write_file(dir / "summary.csv", summary.str());
  if (!r.training.empty()) {
    write_file(dir / "convergence.csv", convergence.str());
    write_file(dir / "convergence_agents.csv", agents.str());
  }
}

}  // namespace farmsim
