#include "farmsim/tabular.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

namespace farmsim {

std::vector<Seconds> Discretizer::delay_edges() const {
  std::vector<Seconds> edges(delay_bins - 1);
  for (std::size_t k = 0; k + 1 < delay_bins; ++k)
    edges[k] = top_delay_edge / std::ldexp(1.0, static_cast<int>(delay_bins - 2 - k));
  return edges;
}

std::size_t Discretizer::delay_bin(Seconds d) const {
  // Number of edges at or below d; the last bucket absorbs everything above.
  std::size_t bin = 0;
  Seconds edge = top_delay_edge / std::ldexp(1.0, static_cast<int>(delay_bins - 2));
  while (bin + 1 < delay_bins && d >= edge) {
    ++bin;
    edge *= 2.0;
  }
  return bin;
}

std::size_t Discretizer::battery_bin(double fraction) const {
  const double f = std::clamp(fraction, 0.0, 1.0);
  const auto bin = static_cast<std::size_t>(f * static_cast<double>(battery_bins));
  return std::min(bin, battery_bins - 1);
}

StateKey discretize_state(const StateVector& x, const Discretizer& g) {
  StateKey key;
  key.reserve(1 + g.num_units + g.num_uavs);
  key.push_back(static_cast<std::uint16_t>(std::lround(x(0) * 2.0)));
  Eigen::Index i = 1;
  for (std::size_t u = 0; u < g.num_units; ++u) key.push_back(static_cast<std::uint16_t>(g.delay_bin(x(i++))));
  for (std::size_t u = 0; u < g.num_uavs; ++u) key.push_back(static_cast<std::uint16_t>(g.battery_bin(x(i++))));
  return key;
}

ActionId greedy_action(const Eigen::Ref<const Eigen::VectorXd>& q) {
  Eigen::Index best = 0;
  for (Eigen::Index a = 1; a < q.size(); ++a)
    if (q(a) > q(best)) best = a;
  return static_cast<ActionId>(best);
}

ActionId epsilon_greedy(const Eigen::Ref<const Eigen::VectorXd>& q, double epsilon, Rng& rng) {
  if (epsilon > 0.0 && uniform01(rng) < epsilon)
    return static_cast<ActionId>(uniform_index(rng, static_cast<std::uint64_t>(q.size())));
  return greedy_action(q);
}

Eigen::VectorXd QTable::values(const StateKey& key) const {
  if (auto it = table_.find(key); it != table_.end()) return it->second;
  return Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_actions_));
}

double QTable::value(const StateKey& key, ActionId a) const {
  if (auto it = table_.find(key); it != table_.end()) return it->second(static_cast<Eigen::Index>(a));
  return 0.0;
}

void QTable::update(const StateKey& key, ActionId action, double reward, const StateKey& next_key, bool terminal) {
  if (action >= num_actions_) throw LogicFault("q_update: action out of range");
  const double future = terminal ? 0.0 : values(next_key).maxCoeff();
  auto [it, inserted] = table_.try_emplace(key, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_actions_)));
  double& q = it->second(static_cast<Eigen::Index>(action));
  q += learning_rate_ * (reward + discount_ * future - q);
}

void QTable::save(std::ostream& out) const {
  out.precision(std::numeric_limits<double>::max_digits10);
  out << "qtable " << num_actions_ << ' ' << learning_rate_ << ' ' << discount_ << ' ' << table_.size() << '\n';
  for (const auto& [key, q] : table_) {
    for (std::size_t i = 0; i < key.size(); ++i) out << (i ? " " : "") << key[i];
    out << " |";
    for (Eigen::Index a = 0; a < q.size(); ++a) out << ' ' << q(a);
    out << '\n';
  }
}

QTable QTable::load(std::istream& in) {
  std::string magic;
  std::size_t actions = 0, entries = 0;
  double lr = 0, gamma = 0;
  if (!(in >> magic >> actions >> lr >> gamma >> entries) || magic != "qtable")
    throw std::runtime_error("q-table: bad header");
  QTable t(actions, lr, gamma);
  std::string line;
  std::getline(in, line);
  for (std::size_t e = 0; e < entries; ++e) {
    if (!std::getline(in, line)) throw std::runtime_error("q-table: truncated");
    const auto bar = line.find('|');
    if (bar == std::string::npos) throw std::runtime_error("q-table: missing separator");
    std::istringstream ks(line.substr(0, bar)), vs(line.substr(bar + 1));
    StateKey key;
    unsigned v = 0;
    while (ks >> v) key.push_back(static_cast<std::uint16_t>(v));
    Eigen::VectorXd q(static_cast<Eigen::Index>(actions));
    for (Eigen::Index a = 0; a < q.size(); ++a)
      if (!(vs >> q(a))) throw std::runtime_error("q-table: short value row");
    t.table_.emplace(std::move(key), std::move(q));
  }
  return t;
}

bool QTable::operator==(const QTable& o) const {
  if (num_actions_ != o.num_actions_ || learning_rate_ != o.learning_rate_ || discount_ != o.discount_ ||
      table_.size() != o.table_.size())
    return false;
  return std::equal(table_.begin(), table_.end(), o.table_.begin(),
                    [](const auto& a, const auto& b) { return a.first == b.first && a.second == b.second; });
}

}  // namespace farmsim
