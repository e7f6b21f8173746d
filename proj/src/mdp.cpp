#include "farmsim/mdp.hpp"

#include <algorithm>
#include <cmath>

#include "farmsim/queue.hpp"

namespace farmsim {

std::size_t state_width(StateLayout layout, std::size_t num_uavs, std::size_t num_mecs) {
  const std::size_t units = num_uavs + num_mecs;
  const std::size_t base = 1 + units + num_uavs;
  return layout == StateLayout::Base ? base : base + units;
}

double task_type_code(TaskType t) {
  switch (t) {
    case TaskType::FireDetection: return 0.0;
    case TaskType::PestDetection: return 0.5;
    case TaskType::GrowthMonitoring: return 1.0;
  }
  return 0.0;
}

StateVector encode_state(const NetworkSnapshot& s, StateLayout layout) {
  const std::size_t units = s.num_units();
  const std::size_t uavs = s.num_uavs;
  StateVector x(static_cast<Eigen::Index>(state_width(layout, uavs, units - uavs)));
  Eigen::Index i = 0;
  x(i++) = task_type_code(s.task_type);
  for (std::size_t u = 0; u < units; ++u) x(i++) = s.predicted_delay[u];
  for (std::size_t u = 0; u < uavs; ++u) x(i++) = std::clamp(s.battery_fraction[u], 0.0, 1.0);
  if (layout == StateLayout::Extended)
    for (std::size_t u = 0; u < units; ++u) x(i++) = s.transfer_delay[u];
  return x;
}

bool counterfactual_violation(const NetworkSnapshot& s, UnitId unit) {
  return exceeds_deadline(s.iot_delay, s.transfer_delay[unit], s.predicted_delay[unit], s.deadline);
}

double battery_tier(ActionId action, const NetworkSnapshot& s, const RewardConfig& cfg) {
  // Expected battery of each UAV if this action is taken: only the chosen
  // unit pays for the task.
  auto expected = [&](UnitId u) { return u == action ? s.battery_after[u] : s.battery_fraction[u]; };
  double fullest = expected(0);
  for (UnitId u = 1; u < s.num_uavs; ++u) fullest = std::max(fullest, expected(u));
  const double gap = expected(action) - fullest;
  if (gap >= -cfg.energy_threshold_e) return cfg.tier_best;
  if (gap <= -2.0 * cfg.energy_threshold_e) return cfg.tier_worst;
  return cfg.tier_middle;
}

double violation_penalty(ActionId action, const NetworkSnapshot& s, const RewardConfig& cfg) {
  for (UnitId m = s.num_uavs; m < s.num_units(); ++m)
    if (m != action && !counterfactual_violation(s, m)) return cfg.penalty_mec_avoidable;
  const UnitId local = s.deciding_uav;
  if (local != action && !counterfactual_violation(s, local)) return cfg.penalty_local_avoidable;
  for (UnitId u = 0; u < s.num_uavs; ++u)
    if (u != local && u != action && !counterfactual_violation(s, u)) return cfg.penalty_other_avoidable;
  return cfg.penalty_unavoidable;
}

double reward_from_parts(double tier, bool violated, double penalty) {
  const double v = violated ? 1.0 : 0.0;
  return (tier - 1.0) + (1.0 - v) + penalty * v;
}

double compute_reward_realized(ActionId action, const NetworkSnapshot& s, const RewardConfig& cfg, bool violated) {
  const double tier = battery_tier(action, s, cfg);
  const double penalty = violated ? violation_penalty(action, s, cfg) : 0.0;
  return reward_from_parts(tier, violated, penalty);
}

double compute_reward(ActionId action, const NetworkSnapshot& s, const RewardConfig& cfg) {
  return compute_reward_realized(action, s, cfg, counterfactual_violation(s, action));
}

}  // namespace farmsim
