#ifndef FARMSIM_MLP_HPP_
#define FARMSIM_MLP_HPP_

#include <cmath>
#include <cstddef>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "farmsim/random.hpp"

namespace farmsim {

/// Dense feed-forward network: affine layers with ReLU between them and an
/// identity output. Inputs are column vectors; batches are stacked as columns.
template <typename Scalar>
class Mlp {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  struct Layer {
    Matrix weight;  // out x in
    Vector bias;    // out
  };

  Mlp() = default;

  /// Zero-initialised network with the given layer widths (input first).
  explicit Mlp(const std::vector<std::size_t>& widths) {
    if (widths.size() < 2) throw std::invalid_argument("Mlp needs at least an input and an output width");
    for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
      const auto in = static_cast<Eigen::Index>(widths[i]);
      const auto out = static_cast<Eigen::Index>(widths[i + 1]);
      layers_.push_back({Matrix::Zero(out, in), Vector::Zero(out)});
    }
  }

  /// Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
  static Mlp glorot_uniform(const std::vector<std::size_t>& widths, Rng& rng) {
    Mlp net(widths);
    for (auto& l : net.layers_) {
      const Scalar limit = std::sqrt(Scalar(6) / Scalar(l.weight.rows() + l.weight.cols()));
      for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
        for (Eigen::Index c = 0; c < l.weight.cols(); ++c)
          l.weight(r, c) = static_cast<Scalar>((2.0 * uniform01(rng) - 1.0)) * limit;
    }
    return net;
  }

  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }
  std::size_t num_layers() const { return layers_.size(); }
  Eigen::Index input_width() const { return layers_.front().weight.cols(); }
  Eigen::Index output_width() const { return layers_.back().weight.rows(); }

  std::vector<std::size_t> widths() const {
    std::vector<std::size_t> w{static_cast<std::size_t>(input_width())};
    for (const auto& l : layers_) w.push_back(static_cast<std::size_t>(l.weight.rows()));
    return w;
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
    return n;
  }

  /// Same shape, all parameters zero.
  Mlp zeros_like() const { return Mlp(widths()); }

  bool all_finite() const {
    for (const auto& l : layers_)
      if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
    return true;
  }

  /// Visits every scalar parameter in a fixed order (layer, weight row-major, bias).
  template <typename Fn>
  void for_each_parameter(Fn&& fn) {
    for (auto& l : layers_) {
      for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
        for (Eigen::Index c = 0; c < l.weight.cols(); ++c) fn(l.weight(r, c));
      for (Eigen::Index r = 0; r < l.bias.size(); ++r) fn(l.bias(r));
    }
  }

  bool operator==(const Mlp& o) const {
    if (layers_.size() != o.layers_.size()) return false;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      const auto& a = layers_[i];
      const auto& b = o.layers_[i];
      if (a.weight.rows() != b.weight.rows() || a.weight.cols() != b.weight.cols()) return false;
      if (a.weight != b.weight || a.bias != b.bias) return false;
    }
    return true;
  }

 private:
  std::vector<Layer> layers_;
};

/// Intermediate values of one forward pass, kept for backpropagation.
template <typename Scalar>
struct ForwardCache {
  std::vector<typename Mlp<Scalar>::Matrix> inputs;       // input to each layer
  std::vector<typename Mlp<Scalar>::Matrix> pre_activation;
};

template <typename Scalar, typename Derived>
typename Mlp<Scalar>::Matrix forward(const Mlp<Scalar>& net, const Eigen::MatrixBase<Derived>& x,
                                     ForwardCache<Scalar>* cache = nullptr) {
  using Matrix = typename Mlp<Scalar>::Matrix;
  if (x.rows() != net.input_width())
    throw std::invalid_argument("forward: input has " + std::to_string(x.rows()) + " rows, network expects " +
                                std::to_string(net.input_width()));
  Matrix a = x;
  if (cache) {
    cache->inputs.clear();
    cache->pre_activation.clear();
  }
  const auto& layers = net.layers();
  for (std::size_t i = 0; i < layers.size(); ++i) {
    Matrix z = layers[i].weight * a;
    z.colwise() += layers[i].bias;
    if (cache) {
      cache->inputs.push_back(a);
      cache->pre_activation.push_back(z);
    }
    a = (i + 1 < layers.size()) ? Matrix(z.cwiseMax(Scalar(0))) : z;
  }
  return a;
}

/// Gradient of a scalar loss w.r.t. every parameter, given dL/d(output).
/// The result has the network's shape.
template <typename Scalar>
Mlp<Scalar> backward(const Mlp<Scalar>& net, const ForwardCache<Scalar>& cache,
                     const typename Mlp<Scalar>::Matrix& d_output) {
  using Matrix = typename Mlp<Scalar>::Matrix;
  Mlp<Scalar> grad = net.zeros_like();
  Matrix delta = d_output;
  for (std::size_t k = net.num_layers(); k-- > 0;) {
    if (k + 1 < net.num_layers())
      delta = delta.cwiseProduct((cache.pre_activation[k].array() > Scalar(0)).template cast<Scalar>().matrix());
    grad.layers()[k].weight.noalias() = delta * cache.inputs[k].transpose();
    grad.layers()[k].bias = delta.rowwise().sum();
    if (k > 0) delta = net.layers()[k].weight.transpose() * delta;
  }
  return grad;
}

struct AdamParams {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// First and second moment estimates, shaped like the network.
template <typename Scalar>
struct AdamState {
  AdamParams params;
  Mlp<Scalar> first_moment;
  Mlp<Scalar> second_moment;
  std::size_t step = 0;

  AdamState() = default;
  AdamState(const Mlp<Scalar>& net, AdamParams p)
      : params(p), first_moment(net.zeros_like()), second_moment(net.zeros_like()) {}
};

/// One bias-corrected Adam update of `net` along `grad`.
template <typename Scalar>
void adam_step(Mlp<Scalar>& net, AdamState<Scalar>& adam, const Mlp<Scalar>& grad) {
  const auto& p = adam.params;
  ++adam.step;
  const Scalar b1 = Scalar(p.beta1), b2 = Scalar(p.beta2);
  const Scalar c1 = Scalar(1) - std::pow(b1, Scalar(adam.step));
  const Scalar c2 = Scalar(1) - std::pow(b2, Scalar(adam.step));
  const Scalar lr = Scalar(p.learning_rate), eps = Scalar(p.epsilon);
  auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
    m = b1 * m + (Scalar(1) - b1) * g;
    v = b2 * v + (Scalar(1) - b2) * g.cwiseAbs2();
    param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  };
  for (std::size_t i = 0; i < net.num_layers(); ++i) {
    auto& l = net.layers()[i];
    auto& m = adam.first_moment.layers()[i];
    auto& v = adam.second_moment.layers()[i];
    const auto& g = grad.layers()[i];
    update(l.weight, m.weight, v.weight, g.weight);
    update(l.bias, m.bias, v.bias, g.bias);
  }
}

// Text format: "mlp <layers>" then per layer "<out> <in>", the weights row by
// row, and the bias.
template <typename Scalar>
void save_mlp(std::ostream& out, const Mlp<Scalar>& net) {
  out.precision(std::numeric_limits<Scalar>::max_digits10);
  out << "mlp " << net.num_layers() << '\n';
  for (const auto& l : net.layers()) {
    out << l.weight.rows() << ' ' << l.weight.cols() << '\n';
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) out << (c ? " " : "") << l.weight(r, c);
      out << '\n';
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) out << (r ? " " : "") << l.bias(r);
    out << '\n';
  }
}

template <typename Scalar>
Mlp<Scalar> load_mlp(std::istream& in) {
  std::string magic;
  std::size_t n = 0;
  if (!(in >> magic >> n) || magic != "mlp" || n == 0) throw std::runtime_error("mlp: bad header");
  std::vector<std::size_t> widths;
  std::vector<typename Mlp<Scalar>::Layer> layers;
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::Index rows = 0, cols = 0;
    if (!(in >> rows >> cols) || rows <= 0 || cols <= 0) throw std::runtime_error("mlp: bad layer header");
    if (i == 0) widths.push_back(static_cast<std::size_t>(cols));
    if (static_cast<std::size_t>(cols) != widths.back()) throw std::runtime_error("mlp: layer widths do not chain");
    widths.push_back(static_cast<std::size_t>(rows));
    typename Mlp<Scalar>::Layer l{typename Mlp<Scalar>::Matrix(rows, cols), typename Mlp<Scalar>::Vector(rows)};
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c)
        if (!(in >> l.weight(r, c))) throw std::runtime_error("mlp: truncated weights");
    for (Eigen::Index r = 0; r < rows; ++r)
      if (!(in >> l.bias(r))) throw std::runtime_error("mlp: truncated bias");
    layers.push_back(std::move(l));
  }
  Mlp<Scalar> net(widths);
  net.layers() = std::move(layers);
  return net;
}

}  // namespace farmsim

#endif  // FARMSIM_MLP_HPP_
