#ifndef FARMSIM_TABULAR_HPP_
#define FARMSIM_TABULAR_HPP_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "farmsim/config.hpp"
#include "farmsim/mdp.hpp"
#include "farmsim/random.hpp"

namespace farmsim {

using StateKey = std::vector<std::uint16_t>;

/// Bucketing of base-layout states for the tabular learner.
///
/// Delays use geometric edges with ratio 2 whose top edge sits at twice the
/// largest task deadline; the lowest bucket covers [0, top / 2^(bins-2)).
/// Batteries use uniform buckets over [0,1].
struct Discretizer {
  std::size_t num_units = 5;
  std::size_t num_uavs = 4;
  std::size_t delay_bins = 8;
  std::size_t battery_bins = 10;
  Seconds top_delay_edge = 10.0;

  std::size_t delay_bin(Seconds d) const;
  std::size_t battery_bin(double fraction) const;
  /// Upper edges of the delay buckets, excluding the open-ended last bucket.
  std::vector<Seconds> delay_edges() const;
};

StateKey discretize_state(const StateVector& state, const Discretizer& grid);

/// Epsilon-greedy over a row of action values; ties go to the lowest index.
/// Shared by the tabular and deep learners.
ActionId epsilon_greedy(const Eigen::Ref<const Eigen::VectorXd>& q_values, double epsilon, Rng& rng);

ActionId greedy_action(const Eigen::Ref<const Eigen::VectorXd>& q_values);

class QTable {
 public:
  QTable(std::size_t num_actions, double learning_rate, double discount)
      : num_actions_(num_actions), learning_rate_(learning_rate), discount_(discount) {}

  std::size_t num_actions() const { return num_actions_; }
  double learning_rate() const { return learning_rate_; }
  double discount() const { return discount_; }
  std::size_t size() const { return table_.size(); }

  /// Missing keys read as zero.
  Eigen::VectorXd values(const StateKey& key) const;
  double value(const StateKey& key, ActionId a) const;

  /// One-step update. A terminal transition drops the bootstrap term.
  void update(const StateKey& key, ActionId action, double reward, const StateKey& next_key, bool terminal = false);

  void save(std::ostream& out) const;
  static QTable load(std::istream& in);

  bool operator==(const QTable& other) const;

 private:
  std::size_t num_actions_;
  double learning_rate_;
  double discount_;
  std::map<StateKey, Eigen::VectorXd> table_;
};

/// Free-function form of QTable::update.
inline void q_update(QTable& table, const StateKey& key, ActionId action, double reward, const StateKey& next_key) {
  table.update(key, action, reward, next_key);
}

}  // namespace farmsim

#endif  // FARMSIM_TABULAR_HPP_
