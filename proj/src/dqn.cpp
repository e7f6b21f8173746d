#include "farmsim/dqn.hpp"

#include <algorithm>
#include <unordered_set>

#include "farmsim/tabular.hpp"

namespace farmsim {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay buffer capacity must be positive");
  items_.reserve(std::min<std::size_t>(capacity, 4096));
}

void ReplayBuffer::push(Transition t) {
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
    return;
  }
  items_[head_] = std::move(t);
  head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= items_.size()) throw std::out_of_range("replay buffer index");
  return items_[(head_ + i) % items_.size()];
}

std::vector<std::size_t> sample_without_replacement(std::size_t population, std::size_t n, Rng& rng) {
  if (n > population) throw std::invalid_argument("cannot sample more items than available");
  std::vector<std::size_t> out;
  out.reserve(n);
  std::unordered_set<std::size_t> taken;
  taken.reserve(n * 2);
  for (std::size_t j = population - n; j < population; ++j) {
    const auto t = static_cast<std::size_t>(uniform_index(rng, j + 1));
    const std::size_t pick = taken.count(t) ? j : t;
    taken.insert(pick);
    out.push_back(pick);
  }
  return out;
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t n, Rng& rng) const {
  std::vector<const Transition*> batch;
  batch.reserve(n);
  for (auto i : sample_without_replacement(items_.size(), n, rng)) batch.push_back(&at(i));
  return batch;
}

double q_loss(const QNetwork& net, const Eigen::MatrixXd& states, std::span<const ActionId> actions,
              const Eigen::VectorXd& targets, QNetwork* grad) {
  const auto n = states.cols();
  ForwardCache<double> cache;
  const Eigen::MatrixXd q = forward(net, states, grad ? &cache : nullptr);
  Eigen::MatrixXd d_out = Eigen::MatrixXd::Zero(q.rows(), n);
  double loss = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto a = static_cast<Eigen::Index>(actions[static_cast<std::size_t>(i)]);
    const double err = q(a, i) - targets(i);
    loss += err * err;
    d_out(a, i) = 2.0 * err / static_cast<double>(n);
  }
  loss /= static_cast<double>(n);
  if (grad) *grad = backward(net, cache, d_out);
  return loss;
}

namespace {

Eigen::MatrixXd stack(std::span<const Transition* const> batch, bool next) {
  const auto width = batch.front()->state.size();
  Eigen::MatrixXd m(width, static_cast<Eigen::Index>(batch.size()));
  for (std::size_t i = 0; i < batch.size(); ++i)
    m.col(static_cast<Eigen::Index>(i)) = next ? batch[i]->next_state : batch[i]->state;
  return m;
}

}  // namespace

Eigen::VectorXd bellman_targets(const QNetwork& bootstrap, std::span<const Transition* const> batch, double gamma) {
  const Eigen::MatrixXd q_next = forward(bootstrap, stack(batch, true));
  Eigen::VectorXd y(static_cast<Eigen::Index>(batch.size()));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    y(col) = batch[i]->reward + (batch[i]->terminal ? 0.0 : gamma * q_next.col(col).maxCoeff());
  }
  return y;
}

double train_batch(QNetwork& net, AdamState<double>& adam, std::span<const Transition* const> batch, double gamma,
                   const QNetwork* target_net) {
  if (batch.empty()) throw std::invalid_argument("train_batch: empty batch");
  const Eigen::VectorXd y = bellman_targets(target_net ? *target_net : net, batch, gamma);
  std::vector<ActionId> actions(batch.size());
  std::transform(batch.begin(), batch.end(), actions.begin(), [](const Transition* t) { return t->action; });
  QNetwork grad;
  const double loss = q_loss(net, stack(batch, false), actions, y, &grad);
  adam_step(net, adam, grad);
  return loss;
}

ActionId dql_act(const QNetwork& net, const StateVector& state, double epsilon, Rng& rng) {
  const Eigen::VectorXd q = forward(net, state);
  return epsilon_greedy(q, epsilon, rng);
}

}  // namespace farmsim
