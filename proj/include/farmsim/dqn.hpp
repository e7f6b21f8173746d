#ifndef FARMSIM_DQN_HPP_
#define FARMSIM_DQN_HPP_

#include <span>
#include <vector>

#include "farmsim/mdp.hpp"
#include "farmsim/mlp.hpp"
#include "farmsim/random.hpp"

namespace farmsim {

using QNetwork = Mlp<double>;

struct Transition {
  StateVector state;
  ActionId action = 0;
  double reward = 0;
  StateVector next_state;
  bool terminal = false;
};

/// Fixed-capacity ring of transitions; the oldest entry is overwritten first.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  /// i-th oldest transition still held.
  const Transition& at(std::size_t i) const;

  /// `n` distinct transitions chosen uniformly. Requires n <= size().
  std::vector<const Transition*> sample(std::size_t n, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // slot of the oldest entry once full
  std::vector<Transition> items_;
};

/// `n` distinct indices from [0, population), uniform over subsets (Floyd).
std::vector<std::size_t> sample_without_replacement(std::size_t population, std::size_t n, Rng& rng);

/// Mean squared error between `targets` and the network's value for the taken
/// action of each column of `states`. When `grad` is given it receives the
/// gradient with targets held fixed.
double q_loss(const QNetwork& net, const Eigen::MatrixXd& states, std::span<const ActionId> actions,
              const Eigen::VectorXd& targets, QNetwork* grad = nullptr);

/// Bellman targets r + gamma * max_a' Q(s', a'), with no bootstrap on
/// terminal transitions. Q(s', .) comes from `bootstrap`.
Eigen::VectorXd bellman_targets(const QNetwork& bootstrap, std::span<const Transition* const> batch, double gamma);

/// One Adam step on the batch. Returns the loss before the step.
double train_batch(QNetwork& net, AdamState<double>& adam, std::span<const Transition* const> batch, double gamma,
                   const QNetwork* target_net = nullptr);

ActionId dql_act(const QNetwork& net, const StateVector& state, double epsilon, Rng& rng);

}  // namespace farmsim

#endif  // FARMSIM_DQN_HPP_
