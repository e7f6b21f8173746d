#ifndef FARMSIM_ENERGY_HPP_
#define FARMSIM_ENERGY_HPP_

#include <optional>
#include <utility>
#include <vector>

#include "farmsim/config.hpp"
#include "farmsim/types.hpp"

namespace farmsim {

struct BusyInterval {
  Seconds start = 0;
  Seconds end = 0;
};

/// Battery accounting for one UAV: constant hover/antenna/idle-CPU drain over
/// the elapsed time plus the busy-over-idle CPU surcharge while processing.
///
/// Busy intervals are appended in time order and never overlap. An interval
/// may be left open while a task is in service; it is counted up to `elapsed`.
class EnergyLedger {
 public:
  explicit EnergyLedger(EnergyParams params = {}) : params_(params) {}

  const EnergyParams& params() const { return params_; }
  Seconds elapsed() const { return elapsed_; }
  const std::vector<BusyInterval>& intervals() const { return intervals_; }

  void advance_to(Seconds now);
  void begin_busy(Seconds start);
  void end_busy(Seconds end);
  /// Closed interval in one call; must not overlap the previous one.
  void add_busy(Seconds start, Seconds end);
  bool busy() const { return open_start_.has_value(); }

  /// Total busy seconds within [0, elapsed].
  Seconds busy_seconds() const;

 private:
  EnergyParams params_;
  Seconds elapsed_ = 0;
  Seconds closed_busy_ = 0;
  std::vector<BusyInterval> intervals_;
  std::optional<Seconds> open_start_;
};

/// Remaining charge in watt-hours. May go negative once the battery is exhausted.
double remaining_battery(const EnergyLedger& ledger);

/// Remaining charge over capacity, unclamped.
double remaining_battery_fraction(const EnergyLedger& ledger);

/// Fraction clamped into [0,1] for use as a state feature.
double encoded_battery_fraction(const EnergyLedger& ledger);

/// Remaining charge after an additional busy period of `extra_busy` seconds,
/// without modifying the ledger.
double hypothetical_battery_after(const EnergyLedger& ledger, Seconds extra_busy);

/// Same, for a processing unit that may not carry a battery (MEC servers
/// return kUnlimitedBattery).
double hypothetical_battery_after(const EnergyLedger* ledger, Seconds extra_busy);

/// Battery drain formula evaluated directly from totals.
double battery_from_totals(const EnergyParams& p, Seconds elapsed, Seconds busy);

}  // namespace farmsim

#endif  // FARMSIM_ENERGY_HPP_
