#include "farmsim/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

namespace farmsim {

void NetworkSnapshot::validate() const {
  const std::size_t n = predicted_delay.size();
  if (n == 0 || num_uavs == 0 || num_uavs > n) throw LogicFault("snapshot: bad unit count");
  if (transfer_delay.size() != n || battery_fraction.size() != n || battery_after.size() != n)
    throw LogicFault("snapshot: per-unit vectors differ in length");
  if (deciding_uav >= num_uavs) throw LogicFault("snapshot: deciding unit is not a UAV");
  for (std::size_t u = 0; u < n; ++u) {
    if (!std::isfinite(predicted_delay[u]) || !std::isfinite(transfer_delay[u]))
      throw LogicFault("snapshot: non-finite delay at unit " + std::to_string(u));
    if (is_mec(u) && battery_fraction[u] != kUnlimitedBattery)
      throw LogicFault("snapshot: MEC battery must be the unlimited sentinel");
  }
}

UnitId rr_select(std::size_t& counter, const NetworkSnapshot& snapshot) {
  const std::size_t n = snapshot.num_units();
  const UnitId chosen = counter % n;
  counter = (chosen + 1) % n;
  return chosen;
}

namespace {

// Fullest UAV, lowest index on ties.
UnitId fullest_uav(const NetworkSnapshot& s) {
  UnitId best = 0;
  for (UnitId u = 1; u < s.num_uavs; ++u)
    if (s.battery_fraction[u] > s.battery_fraction[best]) best = u;
  return best;
}

UnitId offload_if_ahead(const NetworkSnapshot& s, UnitId candidate, double threshold) {
  const double lead = s.battery_fraction[candidate] - s.battery_fraction[s.deciding_uav];
  return lead > threshold ? candidate : s.deciding_uav;
}

}  // namespace

UnitId hef_select_with_roll(const NetworkSnapshot& s, double roll, double threshold) {
  const std::size_t n = s.num_units();
  const std::size_t num_mecs = n - s.num_uavs;
  // Slot k of [0,1) split into J+ equal parts selects MEC k.
  const auto slot = static_cast<std::size_t>(roll * static_cast<double>(n));
  if (slot < num_mecs) return s.num_uavs + slot;
  return offload_if_ahead(s, fullest_uav(s), threshold);
}

UnitId hef_select(const NetworkSnapshot& s, Rng& rng, double threshold) {
  return hef_select_with_roll(s, uniform01(rng), threshold);
}

UnitId qhef_select(const NetworkSnapshot& s, double threshold, Seconds tie_tolerance) {
  const auto& d = s.predicted_delay;
  const Seconds q_min = *std::min_element(d.begin(), d.end());
  std::optional<UnitId> best;
  for (UnitId u = 0; u < s.num_units(); ++u) {
    if (d[u] > q_min + tie_tolerance) continue;
    if (!best || s.battery_fraction[u] > s.battery_fraction[*best]) best = u;
  }
  return offload_if_ahead(s, *best, threshold);
}

}  // namespace farmsim
