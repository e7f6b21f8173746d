#include "farmsim/energy.hpp"

#include <algorithm>

namespace farmsim {

namespace {
constexpr double kSecondsPerHour = 3600.0;
}

void EnergyLedger::advance_to(Seconds now) {
  if (now < elapsed_) throw LogicFault("energy ledger cannot move backwards in time");
  elapsed_ = now;
}

void EnergyLedger::begin_busy(Seconds start) {
  if (open_start_) throw LogicFault("energy ledger: busy period already open");
  if (!intervals_.empty() && start < intervals_.back().end) throw LogicFault("energy ledger: overlapping busy period");
  advance_to(std::max(elapsed_, start));
  open_start_ = start;
}

void EnergyLedger::end_busy(Seconds end) {
  if (!open_start_) throw LogicFault("energy ledger: no open busy period");
  if (end < *open_start_) throw LogicFault("energy ledger: busy period ends before it starts");
  advance_to(std::max(elapsed_, end));
  intervals_.push_back({*open_start_, end});
  closed_busy_ += end - *open_start_;
  open_start_.reset();
}

void EnergyLedger::add_busy(Seconds start, Seconds end) {
  begin_busy(start);
  end_busy(end);
}

Seconds EnergyLedger::busy_seconds() const {
  Seconds total = closed_busy_;
  if (open_start_) total += std::max(0.0, elapsed_ - *open_start_);
  return total;
}

double battery_from_totals(const EnergyParams& p, Seconds elapsed, Seconds busy) {
  const double constant_drain = p.hover_power + p.antenna_power + p.idle_cpu();
  const double busy_surcharge = p.busy_cpu() - p.idle_cpu();
  return p.battery_capacity_wh - constant_drain * (elapsed / kSecondsPerHour) -
         busy_surcharge * (busy / kSecondsPerHour);
}

double remaining_battery(const EnergyLedger& ledger) {
  return battery_from_totals(ledger.params(), ledger.elapsed(), ledger.busy_seconds());
}

double remaining_battery_fraction(const EnergyLedger& ledger) {
  return remaining_battery(ledger) / ledger.params().battery_capacity_wh;
}

double encoded_battery_fraction(const EnergyLedger& ledger) {
  return std::clamp(remaining_battery_fraction(ledger), 0.0, 1.0);
}

double hypothetical_battery_after(const EnergyLedger& ledger, Seconds extra_busy) {
  if (extra_busy < 0) throw LogicFault("hypothetical_battery_after: negative busy time");
  return battery_from_totals(ledger.params(), ledger.elapsed(), ledger.busy_seconds() + extra_busy);
}

double hypothetical_battery_after(const EnergyLedger* ledger, Seconds extra_busy) {
  return ledger ? hypothetical_battery_after(*ledger, extra_busy) : kUnlimitedBattery;
}

}  // namespace farmsim
