#ifndef FARMSIM_TASK_HPP_
#define FARMSIM_TASK_HPP_

#include <vector>

#include "farmsim/config.hpp"
#include "farmsim/random.hpp"
#include "farmsim/types.hpp"

namespace farmsim {

struct TaskInstance {
  TaskId id = 0;
  TaskType type = TaskType::FireDetection;
  UnitId origin_uav = 0;
  Seconds emission_time = 0;  // leaves the IoT sensor
  Seconds arrival_time = 0;   // reaches the origin UAV
  Seconds deadline_abs = 0;   // emission_time + relative deadline
  Seconds deadline = 0;       // relative, kept exact for the violation test

  Seconds relative_deadline() const { return deadline; }
};

/// Poisson arrivals of one task type at one UAV over [0, horizon).
/// Ids are left at zero; the caller numbers the merged stream.
std::vector<TaskInstance> generate_arrivals(const TaskTypeSpec& spec, UnitId uav, Seconds horizon,
                                            Seconds iot_to_uav_delay, Rng& rng);

/// Draws an exponential variate with the given mean.
double exponential(Rng& rng, double mean);

}  // namespace farmsim

#endif  // FARMSIM_TASK_HPP_
