#include "farmsim/queue.hpp"

#include <algorithm>
#include <string>

namespace farmsim {

std::optional<ServiceRecord> UnitQueue::enqueue(const TaskInstance& task, Seconds now) {
  if (!seen_.insert(task.id).second)
    throw LogicFault("unit " + std::to_string(id_) + ": duplicate task id " + std::to_string(task.id));
  pending_.push_back({task, now});
  pending_work_ += service_time(task.type);
  if (in_service_) return std::nullopt;
  return start_next(now);
}

ServiceRecord UnitQueue::complete(Seconds now) {
  if (!in_service_) throw LogicFault("unit " + std::to_string(id_) + ": completion while idle");
  if (now != in_service_->finish_time)
    throw LogicFault("unit " + std::to_string(id_) + ": completion at the wrong time");
  ServiceRecord done = *in_service_;
  in_service_.reset();
  return done;
}

std::optional<ServiceRecord> UnitQueue::start_next(Seconds now) {
  if (in_service_) throw LogicFault("unit " + std::to_string(id_) + ": already serving");
  if (pending_.empty()) return std::nullopt;
  const Pending head = pending_.front();
  pending_.pop_front();
  const Seconds service = service_time(head.task.type);
  pending_work_ = pending_.empty() ? 0.0 : pending_work_ - service;
  in_service_ = ServiceRecord{head.task, head.enqueue_time, now, now + service};
  return in_service_;
}

Seconds UnitQueue::backlog(Seconds now) const {
  Seconds remaining = 0;
  if (in_service_) remaining = std::max(0.0, in_service_->finish_time - now);
  return remaining + pending_work_;
}

bool exceeds_deadline(Seconds iot_delay, Seconds transfer_delay, Seconds unit_delay, Seconds deadline) {
  return iot_delay + transfer_delay + unit_delay > deadline;
}

bool check_violation(const PlacementRecord& record, Seconds deadline) {
  return exceeds_deadline(record.iot_delay, record.transfer_delay, record.queue_wait + record.service_time,
                          deadline);
}

}  // namespace farmsim
