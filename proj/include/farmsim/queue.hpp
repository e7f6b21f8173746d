#ifndef FARMSIM_QUEUE_HPP_
#define FARMSIM_QUEUE_HPP_

#include <deque>
#include <optional>
#include <unordered_set>

#include "farmsim/config.hpp"
#include "farmsim/task.hpp"

namespace farmsim {

struct ServiceRecord {
  TaskInstance task;
  Seconds enqueue_time = 0;
  Seconds start_time = 0;
  Seconds finish_time = 0;
};

/// One processing unit: non-preemptive FIFO service with a per-class
/// processing time for every task type.
class UnitQueue {
 public:
  UnitQueue(UnitId id, UnitKind kind, const TaskTable& tasks) : id_(id), kind_(kind), tasks_(tasks) {}

  UnitId id() const { return id_; }
  UnitKind kind() const { return kind_; }
  Seconds service_time(TaskType t) const { return tasks_[index_of(t)].proc_time(kind_); }

  /// Appends the task; if the unit is idle service starts at `now` and the
  /// started record is returned.
  std::optional<ServiceRecord> enqueue(const TaskInstance& task, Seconds now);

  /// Finishes the task in service. `now` must equal its finish time.
  ServiceRecord complete(Seconds now);

  /// Starts the head of the pending queue, if any.
  std::optional<ServiceRecord> start_next(Seconds now);

  /// Remaining work ahead of a newly arriving task.
  Seconds backlog(Seconds now) const;

  /// Backlog plus this unit's processing time for `type`.
  Seconds predicted_unit_delay(TaskType type, Seconds now) const { return backlog(now) + service_time(type); }

  const std::optional<ServiceRecord>& in_service() const { return in_service_; }
  std::size_t pending_count() const { return pending_.size(); }
  bool idle() const { return !in_service_.has_value(); }

 private:
  struct Pending {
    TaskInstance task;
    Seconds enqueue_time;
  };

  UnitId id_;
  UnitKind kind_;
  TaskTable tasks_;
  std::deque<Pending> pending_;
  Seconds pending_work_ = 0;
  std::optional<ServiceRecord> in_service_;
  std::unordered_set<TaskId> seen_;
};

/// Outcome of one task: where it ran and how its end-to-end latency splits.
struct PlacementRecord {
  TaskId task_id = 0;
  TaskType type = TaskType::FireDetection;
  UnitId origin = 0;
  UnitId chosen_unit = 0;
  Seconds emission = 0;
  Seconds arrival = 0;  // at the origin UAV
  Seconds start = 0;
  Seconds finish = 0;
  Seconds deadline_abs = 0;
  Seconds iot_delay = 0;
  Seconds transfer_delay = 0;
  Seconds queue_wait = 0;
  Seconds service_time = 0;
  bool completed = false;
  bool violated = false;

  Seconds end_to_end() const { return iot_delay + transfer_delay + queue_wait + service_time; }
};

/// True iff the latency components exceed the relative deadline.
bool check_violation(const PlacementRecord& record, Seconds deadline);

/// Same predicate on explicit components.
bool exceeds_deadline(Seconds iot_delay, Seconds transfer_delay, Seconds unit_delay, Seconds deadline);

}  // namespace farmsim

#endif  // FARMSIM_QUEUE_HPP_
