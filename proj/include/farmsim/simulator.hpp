#ifndef FARMSIM_SIMULATOR_HPP_
#define FARMSIM_SIMULATOR_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "farmsim/config.hpp"
#include "farmsim/energy.hpp"
#include "farmsim/mdp.hpp"
#include "farmsim/policy.hpp"
#include "farmsim/queue.hpp"
#include "farmsim/task.hpp"

namespace farmsim {

/// Lower value is served first among events at the same timestamp.
enum class EventKind : std::uint8_t {
  TaskComplete = 0,
  TaskStartService = 1,
  TransferArrival = 2,  // offloaded task reaches its processing unit
  TaskArrival = 3,      // task reaches its origin UAV and is placed
  EpisodeEnd = 4,
};

std::string_view to_string(EventKind k);

struct Event {
  Seconds time = 0;
  EventKind kind = EventKind::TaskArrival;
  TaskId task = 0;
  UnitId unit = 0;

  /// Strict ordering by (time, kind, task id, unit).
  bool operator<(const Event& o) const;
};

/// Per-decision record kept when EpisodeOptions::record_steps is set.
struct StepRecord {
  UnitId agent = 0;
  TaskId task = 0;
  ActionId action = 0;
  double reward = 0;
  StateVector state;
};

struct EpisodeSeeds {
  std::uint64_t arrivals = 0;  // task streams
  std::uint64_t agents = 0;    // exploration / tie-breaking streams
};

struct EpisodeOptions {
  bool record_events = false;
  bool record_steps = false;
};

struct EpisodeResult {
  std::size_t num_uavs = 0;
  std::size_t num_units = 0;
  Seconds horizon = 0;

  /// Indexed by task id.
  std::vector<PlacementRecord> placements;
  std::vector<Event> event_log;
  std::vector<StepRecord> steps;

  std::vector<double> battery_wh;        // per UAV at the horizon
  std::vector<double> battery_fraction;  // per UAV, unclamped
  std::vector<Seconds> busy_seconds;     // per UAV
  std::vector<std::size_t> violations_per_unit;
  std::vector<double> cumulative_reward;  // per agent
  std::vector<std::size_t> decisions;     // per agent

  std::size_t generated = 0;
  std::size_t completed = 0;
  std::size_t in_queue = 0;
  std::size_t in_service = 0;
  std::size_t in_transit = 0;

  std::size_t total_violations() const;
  double min_battery_fraction() const;
  bool operator==(const EpisodeResult&) const;
};

/// All tasks for one episode, merged across (UAV, type) streams, ordered by
/// arrival and numbered from zero.
std::vector<TaskInstance> generate_workload(const Config& cfg, std::uint64_t arrival_seed);

/// Runs one episode from a full reset. `policies` holds one entry per UAV.
EpisodeResult run_episode(const Config& cfg, std::span<Policy* const> policies, const EpisodeSeeds& seeds,
                          const EpisodeOptions& options = {});

/// Builds the decision-time view for a task reaching `uav`.
NetworkSnapshot make_snapshot(const Config& cfg, UnitId uav, TaskType type, Seconds now,
                              std::span<const UnitQueue> queues, std::span<const EnergyLedger> ledgers);

}  // namespace farmsim

#endif  // FARMSIM_SIMULATOR_HPP_
