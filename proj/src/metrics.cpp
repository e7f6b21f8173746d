#include "farmsim/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

namespace farmsim {

std::size_t RunMetrics::total_violations() const {
  return std::accumulate(violations_per_unit.begin(), violations_per_unit.end(), std::size_t{0});
}

double RunMetrics::min_battery() const {
  return battery_fraction.empty() ? 0.0 : *std::min_element(battery_fraction.begin(), battery_fraction.end());
}

double RunMetrics::violation_pct() const {
  return total_tasks == 0 ? 0.0 : 100.0 * static_cast<double>(total_violations()) / static_cast<double>(total_tasks);
}

double objective_value(double min_battery, std::size_t violations, std::size_t total_tasks, double w,
                       std::optional<double> theta) {
  const double scale = theta ? *theta : static_cast<double>(total_tasks);
  if (scale <= 0.0) return w * min_battery;
  return w * min_battery - (1.0 - w) / scale * static_cast<double>(violations);
}

double objective_value(const RunMetrics& m, double w, std::optional<double> theta) {
  return objective_value(m.min_battery(), m.total_violations(), m.total_tasks, w, theta);
}

RunMetrics metrics_of(const EpisodeResult& r, double w, std::optional<double> theta) {
  RunMetrics m;
  m.battery_fraction = r.battery_fraction;
  m.violations_per_unit = r.violations_per_unit;
  m.total_tasks = r.generated;
  m.cumulative_reward = r.cumulative_reward;
  m.objective = objective_value(m, w, theta);
  return m;
}

RunMetrics pool_metrics(std::span<const EpisodeResult> episodes, double w, std::optional<double> theta) {
  if (episodes.empty()) return {};
  RunMetrics m;
  const auto& first = episodes.front();
  m.battery_fraction.assign(first.num_uavs, 0.0);
  m.violations_per_unit.assign(first.num_units, 0);
  m.cumulative_reward.assign(first.num_uavs, 0.0);
  for (const auto& e : episodes) {
    for (std::size_t j = 0; j < first.num_uavs; ++j) {
      m.battery_fraction[j] += e.battery_fraction[j];
      m.cumulative_reward[j] += e.cumulative_reward[j];
    }
    for (std::size_t u = 0; u < first.num_units; ++u) m.violations_per_unit[u] += e.violations_per_unit[u];
    m.total_tasks += e.generated;
  }
  const auto n = static_cast<double>(episodes.size());
  for (auto& b : m.battery_fraction) b /= n;
  for (auto& c : m.cumulative_reward) c /= n;
  m.objective = objective_value(m, w, theta);
  return m;
}

std::vector<double> violation_distribution(std::span<const PlacementRecord> records, std::size_t total_tasks,
                                           std::size_t num_units) {
  std::vector<double> pct(num_units, 0.0);
  if (total_tasks == 0) return pct;
  std::vector<std::size_t> count(num_units, 0);
  for (const auto& r : records)
    if (r.violated) ++count.at(r.chosen_unit);
  for (std::size_t u = 0; u < num_units; ++u)
    pct[u] = 100.0 * static_cast<double>(count[u]) / static_cast<double>(total_tasks);
  return pct;
}

SmoothedSeries moving_average(std::span<const double> series, std::size_t window) {
  if (window == 0) throw std::invalid_argument("moving_average: window must be >= 1");
  SmoothedSeries out;
  const std::size_t n = series.size();
  out.mean.resize(n);
  out.band_lo.resize(n);
  out.band_hi.resize(n);
  double sum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sum += series[i];
    if (i >= window) sum -= series[i - window];
    const std::size_t begin = i + 1 >= window ? i + 1 - window : 0;
    const auto span = series.subspan(begin, i + 1 - begin);
    out.mean[i] = sum / static_cast<double>(span.size());
    const auto [lo, hi] = std::minmax_element(span.begin(), span.end());
    out.band_lo[i] = *lo;
    out.band_hi[i] = *hi;
  }
  return out;
}

std::optional<std::size_t> convergence_episode(std::span<const double> smoothed, double threshold,
                                               std::size_t patience) {
  if (patience == 0) throw std::invalid_argument("convergence_episode: patience must be >= 1");
  std::size_t run = 0;
  for (std::size_t i = 0; i < smoothed.size(); ++i) {
    run = smoothed[i] >= threshold ? run + 1 : 0;
    if (run == patience) return i + 1 - patience;
  }
  return std::nullopt;
}

double tail_mean(std::span<const double> series, double tail_fraction) {
  if (series.empty()) return 0.0;
  const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(tail_fraction * series.size())));
  const auto tail = series.last(std::min(n, series.size()));
  return std::accumulate(tail.begin(), tail.end(), 0.0) / static_cast<double>(tail.size());
}

MeanStd mean_std(std::span<const double> v) {
  MeanStd r;
  if (v.empty()) return r;
  r.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0;
    for (double x : v) ss += (x - r.mean) * (x - r.mean);
    r.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return r;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& metadata,
                     const std::vector<std::string>& header)
    : out_(out) {
  for (const auto& [k, v] : metadata) out_ << "# " << k << ' ' << v << '\n';
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

CsvWriter& CsvWriter::field(const std::string& s) {
  if (!first_) out_ << ',';
  out_ << s;
  first_ = false;
  return *this;
}

CsvWriter& CsvWriter::field(double v) { return field(format_double(v)); }
CsvWriter& CsvWriter::field(std::size_t v) { return field(std::to_string(v)); }

void CsvWriter::end_row() {
  out_ << '\n';
  first_ = true;
}

std::string strip_metadata(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line))
    if (line.empty() || line[0] != '#') out += line + '\n';
  return out;
}

void write_event_log_csv(std::ostream& out, const EpisodeResult& r,
                         const std::vector<std::pair<std::string, std::string>>& metadata) {
  CsvWriter csv(out, metadata,
                {"task_id", "type", "origin", "unit", "arrival", "start", "finish", "deadline_abs", "violated"});
  for (const auto& p : r.placements) {
    csv.field(static_cast<std::size_t>(p.task_id))
        .field(std::string(to_string(p.type)))
        .field(p.origin)
        .field(p.chosen_unit)
        .field(p.arrival);
    if (p.completed)
      csv.field(p.start).field(p.finish);
    else
      csv.field(std::string()).field(std::string());
    csv.field(p.deadline_abs).field(std::string(p.violated ? "1" : "0"));
    csv.end_row();
  }
}

}  // namespace farmsim
