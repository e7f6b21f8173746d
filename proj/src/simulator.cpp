#include "farmsim/simulator.hpp"

#include <algorithm>
#include <queue>
#include <string>
#include <tuple>

namespace farmsim {

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::TaskComplete: return "complete";
    case EventKind::TaskStartService: return "start";
    case EventKind::TransferArrival: return "transfer";
    case EventKind::TaskArrival: return "arrival";
    case EventKind::EpisodeEnd: return "end";
  }
  return "unknown";
}

bool Event::operator<(const Event& o) const {
  return std::tie(time, kind, task, unit) < std::tie(o.time, o.kind, o.task, o.unit);
}

std::size_t EpisodeResult::total_violations() const {
  std::size_t n = 0;
  for (auto v : violations_per_unit) n += v;
  return n;
}

double EpisodeResult::min_battery_fraction() const {
  return battery_fraction.empty() ? 0.0 : *std::min_element(battery_fraction.begin(), battery_fraction.end());
}

namespace {

bool same_placement(const PlacementRecord& a, const PlacementRecord& b) {
  return std::tie(a.task_id, a.type, a.origin, a.chosen_unit, a.emission, a.arrival, a.start, a.finish,
                  a.deadline_abs, a.iot_delay, a.transfer_delay, a.queue_wait, a.service_time, a.completed,
                  a.violated) == std::tie(b.task_id, b.type, b.origin, b.chosen_unit, b.emission, b.arrival, b.start,
                                          b.finish, b.deadline_abs, b.iot_delay, b.transfer_delay, b.queue_wait,
                                          b.service_time, b.completed, b.violated);
}

bool same_event(const Event& a, const Event& b) {
  return a.time == b.time && a.kind == b.kind && a.task == b.task && a.unit == b.unit;
}

}  // namespace

bool EpisodeResult::operator==(const EpisodeResult& o) const {
  if (placements.size() != o.placements.size() || event_log.size() != o.event_log.size() ||
      steps.size() != o.steps.size())
    return false;
  for (std::size_t i = 0; i < placements.size(); ++i)
    if (!same_placement(placements[i], o.placements[i])) return false;
  for (std::size_t i = 0; i < event_log.size(); ++i)
    if (!same_event(event_log[i], o.event_log[i])) return false;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& a = steps[i];
    const auto& b = o.steps[i];
    if (a.agent != b.agent || a.task != b.task || a.action != b.action || a.reward != b.reward || a.state != b.state)
      return false;
  }
  return battery_wh == o.battery_wh && battery_fraction == o.battery_fraction && busy_seconds == o.busy_seconds &&
         violations_per_unit == o.violations_per_unit && cumulative_reward == o.cumulative_reward &&
         decisions == o.decisions && generated == o.generated && completed == o.completed &&
         in_queue == o.in_queue && in_service == o.in_service && in_transit == o.in_transit;
}

std::vector<TaskInstance> generate_workload(const Config& cfg, std::uint64_t arrival_seed) {
  std::vector<TaskInstance> all;
  for (UnitId uav = 0; uav < cfg.sim.num_uavs; ++uav) {
    for (const auto& spec : cfg.tasks) {
      Rng rng(derive_seed(arrival_seed, {tag_of("arrivals"), uav, index_of(spec.type)}));
      auto part = generate_arrivals(spec, uav, cfg.sim.episode_duration, cfg.sim.iot_to_uav_delay, rng);
      all.insert(all.end(), part.begin(), part.end());
    }
  }
  std::stable_sort(all.begin(), all.end(), [](const TaskInstance& a, const TaskInstance& b) {
    return std::tie(a.arrival_time, a.origin_uav, a.type) < std::tie(b.arrival_time, b.origin_uav, b.type);
  });
  for (std::size_t i = 0; i < all.size(); ++i) all[i].id = i;
  return all;
}

NetworkSnapshot make_snapshot(const Config& cfg, UnitId uav, TaskType type, Seconds now,
                              std::span<const UnitQueue> queues, std::span<const EnergyLedger> ledgers) {
  NetworkSnapshot s;
  const std::size_t n = cfg.sim.num_units();
  s.deciding_uav = uav;
  s.task_type = type;
  s.num_uavs = cfg.sim.num_uavs;
  s.now = now;
  s.iot_delay = cfg.sim.iot_to_uav_delay;
  s.deadline = cfg.task(type).deadline;
  s.predicted_delay.resize(n);
  s.transfer_delay.resize(n);
  s.battery_fraction.resize(n);
  s.battery_after.resize(n);
  for (UnitId u = 0; u < n; ++u) {
    s.predicted_delay[u] = queues[u].predicted_unit_delay(type, now);
    s.transfer_delay[u] = cfg.sim.transfer_delay(uav, u);
    if (u < cfg.sim.num_uavs) {
      const auto& ledger = ledgers[u];
      const double cap = ledger.params().battery_capacity_wh;
      s.battery_fraction[u] = remaining_battery(ledger) / cap;
      s.battery_after[u] = hypothetical_battery_after(ledger, queues[u].service_time(type)) / cap;
    } else {
      s.battery_fraction[u] = kUnlimitedBattery;
      s.battery_after[u] = kUnlimitedBattery;
    }
  }
  return s;
}

namespace {

class Episode {
 public:
  Episode(const Config& cfg, std::span<Policy* const> policies, const EpisodeSeeds& seeds,
          const EpisodeOptions& options)
      : cfg_(cfg), policies_(policies), seeds_(seeds), options_(options) {}

  EpisodeResult run();

 private:
  void schedule(Event e) { events_.push(e); }
  void log(const Event& e) {
    if (options_.record_events) result_.event_log.push_back(e);
  }
  void on_arrival(const Event& e);
  void enqueue_at(UnitId unit, TaskId id, Seconds now);
  void on_started(UnitId unit, const ServiceRecord& rec);
  void on_complete(const Event& e);
  void deliver_reward(TaskId id, double r);
  void finish();

  struct Decision {
    NetworkSnapshot snapshot;
    ActionId action = 0;
    double predicted_reward = 0;
    bool reward_delivered = false;
  };

  const Config& cfg_;
  std::span<Policy* const> policies_;
  EpisodeSeeds seeds_;
  EpisodeOptions options_;

  std::vector<TaskInstance> tasks_;
  std::vector<Decision> decisions_;
  std::vector<UnitQueue> queues_;
  std::vector<EnergyLedger> ledgers_;
  std::priority_queue<Event, std::vector<Event>, decltype([](const Event& a, const Event& b) { return b < a; })>
      events_;
  Seconds clock_ = 0;
  std::size_t in_transit_ = 0;
  EpisodeResult result_;
};

EpisodeResult Episode::run() {
  const auto& sim = cfg_.sim;
  if (policies_.size() != sim.num_uavs)
    throw ConfigError("expected one policy per UAV (" + std::to_string(sim.num_uavs) + "), got " +
                      std::to_string(policies_.size()));
  for (const auto* p : policies_)
    if (p == nullptr) throw ConfigError("missing policy");

  const std::size_t n = sim.num_units();
  for (UnitId u = 0; u < n; ++u) queues_.emplace_back(u, sim.kind_of(u), cfg_.tasks);
  ledgers_.assign(sim.num_uavs, EnergyLedger(cfg_.energy));

  result_.num_uavs = sim.num_uavs;
  result_.num_units = n;
  result_.horizon = sim.episode_duration;
  result_.violations_per_unit.assign(n, 0);
  result_.cumulative_reward.assign(sim.num_uavs, 0.0);
  result_.decisions.assign(sim.num_uavs, 0);

  tasks_ = generate_workload(cfg_, seeds_.arrivals);
  result_.generated = tasks_.size();
  decisions_.resize(tasks_.size());
  result_.placements.resize(tasks_.size());
  for (const auto& t : tasks_) {
    auto& p = result_.placements[t.id];
    p.task_id = t.id;
    p.type = t.type;
    p.origin = t.origin_uav;
    p.emission = t.emission_time;
    p.arrival = t.arrival_time;
    p.deadline_abs = t.deadline_abs;
    p.iot_delay = t.arrival_time - t.emission_time;
    schedule({t.arrival_time, EventKind::TaskArrival, t.id, t.origin_uav});
  }
  schedule({sim.episode_duration, EventKind::EpisodeEnd, 0, 0});

  for (UnitId j = 0; j < sim.num_uavs; ++j)
    policies_[j]->begin_episode(derive_seed(seeds_.agents, {tag_of("agent"), j}));

  while (!events_.empty()) {
    const Event e = events_.top();
    events_.pop();
    if (e.time < clock_) throw LogicFault("event time went backwards");
    clock_ = e.time;
    if (e.kind == EventKind::EpisodeEnd) {
      log(e);
      break;
    }
    switch (e.kind) {
      case EventKind::TaskArrival:
        log(e);
        on_arrival(e);
        break;
      case EventKind::TransferArrival:
        log(e);
        --in_transit_;
        enqueue_at(e.unit, e.task, e.time);
        break;
      case EventKind::TaskComplete:
        on_complete(e);
        break;
      default:
        throw LogicFault("unexpected event kind in queue");
    }
  }
  finish();
  return std::move(result_);
}

void Episode::on_arrival(const Event& e) {
  const TaskInstance& task = tasks_[e.task];
  const UnitId uav = task.origin_uav;
  for (auto& l : ledgers_) l.advance_to(e.time);

  auto& d = decisions_[task.id];
  d.snapshot = make_snapshot(cfg_, uav, task.type, e.time, queues_, ledgers_);
  const StateVector state = encode_state(d.snapshot, cfg_.mdp.layout);
  const ActionId action = policies_[uav]->select(DecisionContext{task, d.snapshot, state});
  if (action >= cfg_.sim.num_units())
    throw ConfigError("policy '" + policies_[uav]->name() + "' chose nonexistent unit " + std::to_string(action));
  d.action = action;
  d.predicted_reward = compute_reward(action, d.snapshot, cfg_.mdp.reward);
  ++result_.decisions[uav];

  auto& p = result_.placements[task.id];
  p.chosen_unit = action;
  p.transfer_delay = cfg_.sim.transfer_delay(uav, action);

  if (options_.record_steps) result_.steps.push_back({uav, task.id, action, d.predicted_reward, state});
  if (cfg_.mdp.timing == RewardTiming::Immediate) deliver_reward(task.id, d.predicted_reward);

  if (action == uav)
    enqueue_at(action, task.id, e.time);
  else {
    ++in_transit_;
    schedule({e.time + p.transfer_delay, EventKind::TransferArrival, task.id, action});
  }
}

void Episode::enqueue_at(UnitId unit, TaskId id, Seconds now) {
  if (auto started = queues_[unit].enqueue(tasks_[id], now)) on_started(unit, *started);
}

void Episode::on_started(UnitId unit, const ServiceRecord& rec) {
  if (unit < cfg_.sim.num_uavs) ledgers_[unit].begin_busy(rec.start_time);
  log({rec.start_time, EventKind::TaskStartService, rec.task.id, unit});
  schedule({rec.finish_time, EventKind::TaskComplete, rec.task.id, unit});
}

void Episode::on_complete(const Event& e) {
  const ServiceRecord rec = queues_[e.unit].complete(e.time);
  if (rec.task.id != e.task) throw LogicFault("completion for a task not in service");
  if (e.unit < cfg_.sim.num_uavs) ledgers_[e.unit].end_busy(e.time);
  log(e);

  auto& p = result_.placements[rec.task.id];
  p.start = rec.start_time;
  p.finish = rec.finish_time;
  p.transfer_delay = rec.enqueue_time - p.arrival;
  p.queue_wait = rec.start_time - rec.enqueue_time;
  p.service_time = rec.finish_time - rec.start_time;
  p.completed = true;
  p.violated = check_violation(p, tasks_[rec.task.id].relative_deadline());
  ++result_.completed;
  if (p.violated) ++result_.violations_per_unit[e.unit];

  if (cfg_.mdp.timing == RewardTiming::Deferred) {
    const auto& d = decisions_[rec.task.id];
    deliver_reward(rec.task.id, compute_reward_realized(d.action, d.snapshot, cfg_.mdp.reward, p.violated));
  }
  if (auto next = queues_[e.unit].start_next(e.time)) on_started(e.unit, *next);
}

void Episode::deliver_reward(TaskId id, double r) {
  auto& d = decisions_[id];
  if (d.reward_delivered) throw LogicFault("reward delivered twice");
  d.reward_delivered = true;
  const UnitId agent = tasks_[id].origin_uav;
  result_.cumulative_reward[agent] += r;
  policies_[agent]->reward(id, r);
}

void Episode::finish() {
  const Seconds horizon = cfg_.sim.episode_duration;
  for (auto& l : ledgers_) l.advance_to(horizon);

  // Tasks still waiting: their deadline is already known to be missed if it
  // lies before the horizon.
  for (auto& p : result_.placements) {
    if (p.completed || p.arrival >= horizon) continue;
    if (p.deadline_abs < horizon) {
      p.violated = true;
      ++result_.violations_per_unit[p.chosen_unit];
    }
  }
  for (const auto& q : queues_) {
    result_.in_queue += q.pending_count();
    result_.in_service += q.in_service() ? 1 : 0;
  }
  result_.in_transit = in_transit_;

  // Deferred rewards for tasks that never finished fall back to the prediction.
  for (const auto& t : tasks_)
    if (!decisions_[t.id].reward_delivered) deliver_reward(t.id, decisions_[t.id].predicted_reward);
  for (auto* p : policies_) p->end_episode();

  for (const auto& l : ledgers_) {
    result_.battery_wh.push_back(remaining_battery(l));
    result_.battery_fraction.push_back(remaining_battery_fraction(l));
    result_.busy_seconds.push_back(l.busy_seconds());
  }
}

}  // namespace

EpisodeResult run_episode(const Config& cfg, std::span<Policy* const> policies, const EpisodeSeeds& seeds,
                          const EpisodeOptions& options) {
  return Episode(cfg, policies, seeds, options).run();
}

}  // namespace farmsim
