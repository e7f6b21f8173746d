#ifndef FARMSIM_HEURISTICS_HPP_
#define FARMSIM_HEURISTICS_HPP_

#include <cstddef>

#include "farmsim/config.hpp"
#include "farmsim/network.hpp"
#include "farmsim/random.hpp"

namespace farmsim {

/// Round robin over all processing units. `counter` is the per-UAV cursor.
UnitId rr_select(std::size_t& counter, const NetworkSnapshot& snapshot);

/// Highest energy first. One uniform draw decides the MEC branch (each MEC
/// with probability 1/J+); otherwise the task goes to the fullest UAV when it
/// leads the deciding UAV by more than the threshold.
UnitId hef_select(const NetworkSnapshot& snapshot, Rng& rng, double threshold = 0.01);

/// Variant of hef_select taking the MEC roll explicitly (u in [0,1)).
UnitId hef_select_with_roll(const NetworkSnapshot& snapshot, double roll, double threshold = 0.01);

/// Lowest queue then highest energy first.
UnitId qhef_select(const NetworkSnapshot& snapshot, double threshold = 0.01, Seconds tie_tolerance = 1e-12);

}  // namespace farmsim

#endif  // FARMSIM_HEURISTICS_HPP_
