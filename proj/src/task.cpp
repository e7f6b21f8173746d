#include "farmsim/task.hpp"

#include <cmath>

namespace farmsim {

double exponential(Rng& rng, double mean) { return -mean * std::log1p(-uniform01(rng)); }

std::vector<TaskInstance> generate_arrivals(const TaskTypeSpec& spec, UnitId uav, Seconds horizon,
                                            Seconds iot_to_uav_delay, Rng& rng) {
  std::vector<TaskInstance> out;
  if (horizon <= 0) return out;
  Seconds emitted = 0;
  while (true) {
    emitted += exponential(rng, spec.mean_interarrival);
    const Seconds arrival = emitted + iot_to_uav_delay;
    if (arrival >= horizon) break;
    TaskInstance t;
    t.type = spec.type;
    t.origin_uav = uav;
    t.emission_time = emitted;
    t.arrival_time = arrival;
    t.deadline_abs = emitted + spec.deadline;
    t.deadline = spec.deadline;
    out.push_back(t);
  }
  return out;
}

}  // namespace farmsim
