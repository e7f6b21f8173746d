#ifndef FARMSIM_NETWORK_HPP_
#define FARMSIM_NETWORK_HPP_

#include <vector>

#include "farmsim/types.hpp"

namespace farmsim {

/// What a deciding UAV knows at the moment a task reaches it. UAVs share
/// their battery levels and queue delays with each other.
///
/// Per-unit vectors have one entry per processing unit (UAVs first, then MEC
/// servers). MEC battery entries hold kUnlimitedBattery.
struct NetworkSnapshot {
  UnitId deciding_uav = 0;
  TaskType task_type = TaskType::FireDetection;
  std::size_t num_uavs = 0;
  Seconds now = 0;
  Seconds iot_delay = 0;
  Seconds deadline = 0;  // relative deadline of this task's type

  std::vector<Seconds> predicted_delay;  // backlog + own processing time
  std::vector<Seconds> transfer_delay;   // hop latency from the deciding UAV
  std::vector<double> battery_fraction;  // unclamped
  std::vector<double> battery_after;     // fraction if the task were placed on the unit

  std::size_t num_units() const { return predicted_delay.size(); }
  bool is_mec(UnitId u) const { return u >= num_uavs; }
  void validate() const;
};

}  // namespace farmsim

#endif  // FARMSIM_NETWORK_HPP_
