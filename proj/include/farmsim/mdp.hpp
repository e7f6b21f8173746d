#ifndef FARMSIM_MDP_HPP_
#define FARMSIM_MDP_HPP_

#include <Eigen/Dense>

#include "farmsim/config.hpp"
#include "farmsim/network.hpp"

namespace farmsim {

/// [type code, unit delays (J+), UAV battery fractions (J)] and, in the
/// extended layout, the hop latencies from the deciding UAV (J+).
using StateVector = Eigen::VectorXd;

/// Index into the processing units: UAVs first, MEC servers after.
using ActionId = std::size_t;

std::size_t state_width(StateLayout layout, std::size_t num_uavs, std::size_t num_mecs);

/// Fire 0, pest 0.5, growth 1.
double task_type_code(TaskType t);

StateVector encode_state(const NetworkSnapshot& snapshot, StateLayout layout = StateLayout::Base);

/// Would placing the task on `unit` miss the deadline, judged from the
/// decision-time snapshot?
bool counterfactual_violation(const NetworkSnapshot& snapshot, UnitId unit);

/// Battery tier of an action: compares the chosen unit's expected battery with
/// the fullest UAV's expected battery under that action.
double battery_tier(ActionId action, const NetworkSnapshot& snapshot, const RewardConfig& cfg);

/// Severity of a predicted violation, by which unit could have avoided it.
double violation_penalty(ActionId action, const NetworkSnapshot& snapshot, const RewardConfig& cfg);

/// Combines the tier and penalty for a given violation outcome at the chosen unit.
double reward_from_parts(double tier, bool violated, double penalty);

/// Decision-time shaped reward.
double compute_reward(ActionId action, const NetworkSnapshot& snapshot, const RewardConfig& cfg);

/// Same reward with the chosen unit's violation replaced by the observed
/// outcome (deferred mode).
double compute_reward_realized(ActionId action, const NetworkSnapshot& snapshot, const RewardConfig& cfg,
                               bool violated);

}  // namespace farmsim

#endif  // FARMSIM_MDP_HPP_
