#include <gtest/gtest.h>

#include <cmath>

#include "farmsim/config.hpp"
#include "farmsim/queue.hpp"

using namespace farmsim;

namespace {

TaskInstance make_task(TaskId id, TaskType type, Seconds at = 0) {
  TaskInstance t;
  t.id = id;
  t.type = type;
  t.emission_time = at;
  t.arrival_time = at;
  return t;
}

UnitQueue uav_queue() { return UnitQueue(0, UnitKind::Uav, default_task_table()); }
UnitQueue mec_queue() { return UnitQueue(4, UnitKind::Mec, default_task_table()); }

}  // namespace

TEST(Queue, IdleUnitStartsImmediately) {
  auto q = uav_queue();
  const auto started = q.enqueue(make_task(1, TaskType::FireDetection), 2.0);
  ASSERT_TRUE(started.has_value());
  EXPECT_DOUBLE_EQ(started->start_time - started->enqueue_time, 0.0);
  EXPECT_DOUBLE_EQ(started->finish_time, 2.1);
}

TEST(Queue, WaitBehindBusyUnit) {
  // Busy until now + 0.3 with nothing pending: a fire task needing 0.1 s from
  // t = 0.2 keeps a UAV busy until 0.3; a newcomer at t = 0 waits 0.3.
  UnitQueue q(0, UnitKind::Uav, [] {
    auto t = default_task_table();
    t[0].proc_time_uav = 0.3;
    return t;
  }());
  q.enqueue(make_task(1, TaskType::FireDetection), 0.0);
  EXPECT_FALSE(q.enqueue(make_task(2, TaskType::GrowthMonitoring), 0.0).has_value());
  const auto first = q.complete(0.3);
  EXPECT_EQ(first.task.id, 1u);
  const auto second = q.start_next(0.3);
  ASSERT_TRUE(second.has_value());
  EXPECT_DOUBLE_EQ(second->start_time - second->enqueue_time, 0.3);
}

TEST(Queue, BackToBackPestTasks) {
  auto q = uav_queue();
  q.enqueue(make_task(1, TaskType::PestDetection), 0.0);
  q.enqueue(make_task(2, TaskType::PestDetection), 0.0);
  q.complete(0.5);
  const auto second = q.start_next(0.5);
  ASSERT_TRUE(second.has_value());
  EXPECT_DOUBLE_EQ(second->start_time - second->enqueue_time, 0.5);
  EXPECT_DOUBLE_EQ(second->finish_time, 1.0);
}

TEST(Queue, PredictedDelayOnEmptyUnits) {
  EXPECT_DOUBLE_EQ(uav_queue().predicted_unit_delay(TaskType::FireDetection, 0.0), 0.1);
  EXPECT_DOUBLE_EQ(mec_queue().predicted_unit_delay(TaskType::FireDetection, 0.0), 0.05);
}

TEST(Queue, PredictedDelayWithServiceAndPending) {
  auto q = uav_queue();
  q.enqueue(make_task(1, TaskType::GrowthMonitoring), 1.0);
  q.enqueue(make_task(2, TaskType::FireDetection), 1.0);
  // Growth started at 1.0, now 1.02: 0.08 left + 0.1 pending + 0.1 own.
  EXPECT_NEAR(q.predicted_unit_delay(TaskType::FireDetection, 1.02), 0.28, 1e-12);
}

TEST(Queue, DuplicateTaskIsLogicFault) {
  auto q = uav_queue();
  q.enqueue(make_task(7, TaskType::FireDetection), 0.0);
  EXPECT_THROW(q.enqueue(make_task(7, TaskType::FireDetection), 0.0), LogicFault);
}

TEST(Queue, CompletionMustMatchSchedule) {
  auto q = uav_queue();
  EXPECT_THROW(q.complete(0.0), LogicFault);
  q.enqueue(make_task(1, TaskType::FireDetection), 0.0);
  EXPECT_THROW(q.complete(0.05), LogicFault);
  EXPECT_THROW(q.start_next(0.0), LogicFault);
}

TEST(Queue, BacklogDrainsToZero) {
  auto q = mec_queue();
  q.enqueue(make_task(1, TaskType::PestDetection), 0.0);
  q.enqueue(make_task(2, TaskType::FireDetection), 0.0);
  q.enqueue(make_task(3, TaskType::GrowthMonitoring), 0.0);
  EXPECT_NEAR(q.backlog(0.0), 0.35, 1e-12);
  q.complete(0.25);
  q.start_next(0.25);
  q.complete(0.30);
  q.start_next(0.30);
  q.complete(0.35);
  EXPECT_FALSE(q.start_next(0.35).has_value());
  EXPECT_EQ(q.backlog(0.35), 0.0);
  EXPECT_TRUE(q.idle());
}

TEST(Violation, LocalFireMeetsDeadline) {
  PlacementRecord r;
  r.iot_delay = 0.01;
  r.transfer_delay = 0.0;
  r.queue_wait = 0.0;
  r.service_time = 0.1;
  EXPECT_NEAR(r.end_to_end(), 0.11, 1e-15);
  EXPECT_FALSE(check_violation(r, 0.3));
}

TEST(Violation, RemotePestBehindQueueMisses) {
  PlacementRecord r;
  r.iot_delay = 0.01;
  r.transfer_delay = 0.015;
  r.queue_wait = 0.4;
  r.service_time = 0.5;
  EXPECT_NEAR(r.end_to_end(), 0.925, 1e-15);
  EXPECT_TRUE(check_violation(r, 0.8));
}

TEST(Violation, GrowthWithModestQueueIsSafe) {
  for (double wait : {0.0, 1.0, 2.5, 3.99}) {
    PlacementRecord r;
    r.iot_delay = 0.01;
    r.transfer_delay = 0.02;
    r.queue_wait = wait;
    r.service_time = 0.1;
    EXPECT_FALSE(check_violation(r, 5.0)) << wait;
  }
}

TEST(Violation, BoundaryIsNotAViolation) {
  EXPECT_FALSE(exceeds_deadline(0.0, 0.0, 0.5, 0.5));
  EXPECT_TRUE(exceeds_deadline(0.0, 0.0, std::nextafter(0.5, 1.0), 0.5));
}
