#ifndef FARMSIM_METRICS_HPP_
#define FARMSIM_METRICS_HPP_

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "farmsim/config.hpp"
#include "farmsim/queue.hpp"
#include "farmsim/simulator.hpp"

namespace farmsim {

struct RunMetrics {
  std::vector<double> battery_fraction;        // per UAV, unclamped
  std::vector<std::size_t> violations_per_unit;
  std::size_t total_tasks = 0;
  std::vector<double> cumulative_reward;       // per agent
  double objective = 0;

  std::size_t total_violations() const;
  double min_battery() const;
  double violation_pct() const;
};

/// Metrics of one episode; `theta` overrides the violation normaliser.
RunMetrics metrics_of(const EpisodeResult& r, double w, std::optional<double> theta = std::nullopt);

/// Pools several evaluation episodes: batteries are averaged per UAV and
/// violations summed against the summed task count.
RunMetrics pool_metrics(std::span<const EpisodeResult> episodes, double w, std::optional<double> theta = std::nullopt);

/// W * min battery - (1-W)/theta * violations. With no tasks and no explicit
/// theta the violation term is dropped.
double objective_value(double min_battery, std::size_t violations, std::size_t total_tasks, double w,
                       std::optional<double> theta = std::nullopt);
double objective_value(const RunMetrics& m, double w, std::optional<double> theta = std::nullopt);

/// Per-unit violated count over total tasks, in percent.
std::vector<double> violation_distribution(std::span<const PlacementRecord> records, std::size_t total_tasks,
                                           std::size_t num_units);

struct SmoothedSeries {
  std::vector<double> mean;
  std::vector<double> band_lo;  // min over the trailing window
  std::vector<double> band_hi;  // max over the trailing window
};

/// Trailing-window mean with a min/max band; early points use the prefix.
SmoothedSeries moving_average(std::span<const double> series, std::size_t window);

/// First index k with smoothed[k .. k+patience-1] all >= threshold.
std::optional<std::size_t> convergence_episode(std::span<const double> smoothed, double threshold,
                                               std::size_t patience);

/// Mean of the last `tail_fraction` of a series.
double tail_mean(std::span<const double> series, double tail_fraction);

struct MeanStd {
  double mean = 0;
  double std = 0;  // sample standard deviation; 0 for a single value
};
MeanStd mean_std(std::span<const double> values);

/// Writes `# key value` metadata lines followed by a header row.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& metadata,
            const std::vector<std::string>& header);
  CsvWriter& field(const std::string& s);
  CsvWriter& field(double v);
  CsvWriter& field(std::size_t v);
  void end_row();

 private:
  std::ostream& out_;
  bool first_ = true;
};

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

/// Drops `#` comment lines; what remains is the CSV body.
std::string strip_metadata(const std::string& csv_text);

/// Writes one row per task (id, type, origin, unit, arrival, start, finish,
/// deadline, violated).
void write_event_log_csv(std::ostream& out, const EpisodeResult& r,
                         const std::vector<std::pair<std::string, std::string>>& metadata);

}  // namespace farmsim

#endif  // FARMSIM_METRICS_HPP_
