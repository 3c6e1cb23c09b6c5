#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "sequent/errors.hpp"
#include "sequent/rng.hpp"

namespace sequent {

enum class Activation {
  Identity,
  Tanh,
  ScaledTanhHalfPi,  // (pi/2) * tanh, keeps outputs inside a valid embedding angle range
};

/// Fully connected layer: activation(W x + b).
struct DenseLayer {
  int in_dim = 0;
  int out_dim = 0;
  std::vector<double> weights;  // row-major out_dim x in_dim
  std::vector<double> bias;
  Activation activation = Activation::Identity;

  /// Weights ~ uniform(-1/sqrt(in), 1/sqrt(in)) drawn row-major; biases zero.
  static DenseLayer init(int in_dim, int out_dim, Activation activation, Rng& rng) {
    DenseLayer layer;
    layer.in_dim = in_dim;
    layer.out_dim = out_dim;
    layer.activation = activation;
    layer.weights.resize(static_cast<std::size_t>(in_dim) * out_dim);
    const double bound = 1.0 / std::sqrt(static_cast<double>(in_dim));
    for (double& w : layer.weights) w = rng.uniform(-bound, bound);
    layer.bias.assign(static_cast<std::size_t>(out_dim), 0.0);
    return layer;
  }

  double weight(int row, int col) const { return weights[static_cast<std::size_t>(row) * in_dim + col]; }
  double& weight(int row, int col) { return weights[static_cast<std::size_t>(row) * in_dim + col]; }

  std::vector<double> forward(std::span<const double> x) const { return dense_forward(*this, x); }

  static std::vector<double> dense_forward(const DenseLayer& layer, std::span<const double> x) {
    if (static_cast<int>(x.size()) != layer.in_dim) {
      throw ConfigError("dense layer expects input of size " + std::to_string(layer.in_dim) +
                        ", got " + std::to_string(x.size()));
    }
    std::vector<double> out(static_cast<std::size_t>(layer.out_dim));
    for (int j = 0; j < layer.out_dim; ++j) {
      double s = layer.bias[static_cast<std::size_t>(j)];
      for (int i = 0; i < layer.in_dim; ++i) s += layer.weight(j, i) * x[static_cast<std::size_t>(i)];
      out[static_cast<std::size_t>(j)] = activate(layer.activation, s);
    }
    return out;
  }

  static double activate(Activation a, double s) {
    switch (a) {
      case Activation::Identity: return s;
      case Activation::Tanh: return std::tanh(s);
      default: return (std::numbers::pi / 2.0) * std::tanh(s);
    }
  }

  static double activate_derivative(Activation a, double s) {
    switch (a) {
      case Activation::Identity: return 1.0;
      case Activation::Tanh: {
        const double t = std::tanh(s);
        return 1.0 - t * t;
      }
      default: {
        const double t = std::tanh(s);
        return (std::numbers::pi / 2.0) * (1.0 - t * t);
      }
    }
  }
};

inline std::vector<double> dense_forward(const DenseLayer& layer, std::span<const double> x) {
  return DenseLayer::dense_forward(layer, x);
}

struct DenseGrad {
  std::vector<double> weights;  // same layout as layer.weights
  std::vector<double> bias;
  std::vector<double> input;  // gradient w.r.t. x
};

/// Exact chain-rule gradients of the layer given upstream = dL/d(output).
inline DenseGrad dense_backward(const DenseLayer& layer, std::span<const double> x,
                                std::span<const double> upstream) {
  if (static_cast<int>(x.size()) != layer.in_dim) {
    throw ConfigError("dense_backward: input size mismatch");
  }
  if (static_cast<int>(upstream.size()) != layer.out_dim) {
    throw ConfigError("dense_backward: upstream size mismatch");
  }
  DenseGrad grad;
  grad.weights.assign(layer.weights.size(), 0.0);
  grad.bias.assign(static_cast<std::size_t>(layer.out_dim), 0.0);
  grad.input.assign(static_cast<std::size_t>(layer.in_dim), 0.0);
  for (int j = 0; j < layer.out_dim; ++j) {
    double s = layer.bias[static_cast<std::size_t>(j)];
    for (int i = 0; i < layer.in_dim; ++i) s += layer.weight(j, i) * x[static_cast<std::size_t>(i)];
    const double d = upstream[static_cast<std::size_t>(j)] *
                     DenseLayer::activate_derivative(layer.activation, s);
    grad.bias[static_cast<std::size_t>(j)] = d;
    for (int i = 0; i < layer.in_dim; ++i) {
      grad.weights[static_cast<std::size_t>(j) * layer.in_dim + i] = d * x[static_cast<std::size_t>(i)];
      grad.input[static_cast<std::size_t>(i)] += d * layer.weight(j, i);
    }
  }
  return grad;
}

enum class Loss { CrossEntropy, SquaredError };

inline Loss loss_from_string(const std::string& s) {
  if (s == "cross-entropy") return Loss::CrossEntropy;
  if (s == "squared-error") return Loss::SquaredError;
  throw ConfigError("unknown loss '" + s + "', expected cross-entropy or squared-error");
}

inline std::string loss_name(Loss l) {
  return l == Loss::CrossEntropy ? "cross-entropy" : "squared-error";
}

struct LossResult {
  double loss = 0.0;
  std::vector<double> grad;  // dL/d(logits)
};

/// loss = -log softmax(logits)[target]; grad = softmax(logits) - onehot(target).
inline LossResult softmax_cross_entropy(std::span<const double> logits, int target) {
  if (logits.empty()) throw ConfigError("softmax_cross_entropy: empty logits");
  if (target < 0 || target >= static_cast<int>(logits.size())) {
    throw ConfigError("softmax_cross_entropy: target class " + std::to_string(target) +
                      " out of range for " + std::to_string(logits.size()) + " logits");
  }
  double max_logit = logits[0];
  for (double l : logits) max_logit = std::max(max_logit, l);
  double sum = 0.0;
  LossResult r;
  r.grad.resize(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    r.grad[i] = std::exp(logits[i] - max_logit);
    sum += r.grad[i];
  }
  for (double& g : r.grad) g /= sum;
  r.loss = -(logits[static_cast<std::size_t>(target)] - max_logit - std::log(sum));
  r.grad[static_cast<std::size_t>(target)] -= 1.0;
  return r;
}

/// loss = sum_k (logit_k - onehot_k)^2; grad = 2 (logits - onehot).
inline LossResult squared_error(std::span<const double> logits, int target) {
  if (logits.empty()) throw ConfigError("squared_error: empty logits");
  if (target < 0 || target >= static_cast<int>(logits.size())) {
    throw ConfigError("squared_error: target class out of range");
  }
  LossResult r;
  r.grad.resize(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double y = (static_cast<int>(i) == target) ? 1.0 : 0.0;
    const double d = logits[i] - y;
    r.loss += d * d;
    r.grad[i] = 2.0 * d;
  }
  return r;
}

inline LossResult compute_loss(Loss loss, std::span<const double> logits, int target) {
  return loss == Loss::CrossEntropy ? softmax_cross_entropy(logits, target)
                                    : squared_error(logits, target);
}

struct AdamConfig {
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Standard Adam with bias correction; deterministic given the gradient stream.
class AdamOptimizer {
 public:
  AdamOptimizer(std::size_t num_params, AdamConfig config = {})
      : config_(config), m_(num_params, 0.0), v_(num_params, 0.0) {}

  void step(std::span<double> params, std::span<const double> grads) {
    if (params.size() != m_.size() || grads.size() != m_.size()) {
      throw ConfigError("adam step: parameter/gradient size mismatch");
    }
    ++step_count_;
    const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(step_count_));
    const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(step_count_));
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double g = grads[i];
      if (!std::isfinite(g)) {
        throw TrainingError("non-finite gradient at parameter " + std::to_string(i) +
                            " (step " + std::to_string(step_count_) + ")");
      }
      m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * g;
      v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * g * g;
      const double m_hat = m_[i] / bc1;
      const double v_hat = v_[i] / bc2;
      params[i] -= config_.learning_rate * m_hat / (std::sqrt(v_hat) + config_.epsilon);
    }
  }

  long step_count() const { return step_count_; }

 private:
  AdamConfig config_;
  std::vector<double> m_;
  std::vector<double> v_;
  long step_count_ = 0;
};

}  // namespace sequent
