#pragma once

#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sequent/ansatz.hpp"
#include "sequent/errors.hpp"
#include "sequent/neural.hpp"

namespace sequent {

// Parameter partition convention used throughout: theta holds every classical
// scalar, phi every quantum rotation angle. Flattening orders are fixed (and
// relied on by snapshots and digests):
//   classical: hidden.W, hidden.b, output.W, output.b
//   dqc:       pre.W, pre.b, post.W, post.b        | phi = angles row-major
//   sequent:   compression.W, compression.b [, surrogate.W, surrogate.b]

/// Two-layer feed-forward reference model; hidden width must equal the qubit
/// count of any quantum model it is compared against.
struct ClassicalBaseline {
  DenseLayer hidden;  // n -> h, tanh
  DenseLayer output;  // h -> classes, identity

  static ClassicalBaseline init(int input_dim, int hidden_width, int classes, Rng& rng) {
    if (classes < 2) throw ConfigError("classifier needs at least 2 classes");
    ClassicalBaseline m;
    m.hidden = DenseLayer::init(input_dim, hidden_width, Activation::Tanh, rng);
    m.output = DenseLayer::init(hidden_width, classes, Activation::Identity, rng);
    return m;
  }

  int input_dim() const { return hidden.in_dim; }
  int num_classes() const { return output.out_dim; }

  std::vector<double> forward(std::span<const double> x) const {
    return output.forward(hidden.forward(x));
  }
};

namespace detail {

/// Shared dressed composition: pre layer, pluggable middle block, post layer.
/// The real model instantiates the middle with the circuit; the
/// identity-collapse check instantiates it with a literal identity stub.
template <typename MidFn>
std::vector<double> dressed_forward(const DenseLayer& pre, const DenseLayer& post,
                                    std::span<const double> x, MidFn&& mid) {
  const std::vector<double> z = pre.forward(x);
  const std::vector<double> e = mid(std::span<const double>(z));
  return post.forward(e);
}

struct DressedGrads {
  double loss = 0.0;
  DenseGrad pre;
  DenseGrad post;
  std::vector<double> mid_upstream;  // dL/d(mid output), kept for the phi chain
  std::vector<double> mid_input;     // z = pre(x), kept for the phi chain
};

/// Backward pass through post -> middle jacobian -> pre, given the middle's
/// output and its jacobian d(mid_k)/d(z_q) (row-major sigma x eta).
template <typename MidFn, typename MidJacFn>
DressedGrads dressed_backward(const DenseLayer& pre, const DenseLayer& post,
                              std::span<const double> x, int target, Loss loss,
                              MidFn&& mid, MidJacFn&& mid_jacobian) {
  DressedGrads g;
  const std::vector<double> z = pre.forward(x);
  const std::vector<double> e = mid(std::span<const double>(z));
  const std::vector<double> logits = post.forward(e);
  const LossResult lr = compute_loss(loss, logits, target);
  g.loss = lr.loss;
  g.post = dense_backward(post, e, lr.grad);
  g.mid_upstream = g.post.input;
  g.mid_input = z;
  const std::vector<double> jac = mid_jacobian(std::span<const double>(z));  // sigma x eta
  const auto sigma = e.size();
  const auto eta = z.size();
  std::vector<double> gz(eta, 0.0);
  for (std::size_t q = 0; q < eta; ++q) {
    double acc = 0.0;
    for (std::size_t k = 0; k < sigma; ++k) acc += g.mid_upstream[k] * jac[k * eta + q];
    gz[q] = acc;
  }
  g.pre = dense_backward(pre, x, gz);
  return g;
}

inline void append(std::vector<double>& dst, const std::vector<double>& src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

inline void take(std::span<const double>& src, std::vector<double>& dst) {
  std::copy(src.begin(), src.begin() + static_cast<std::ptrdiff_t>(dst.size()), dst.begin());
  src = src.subspan(dst.size());
}

}  // namespace detail

/// Classical dressing around the circuit: pre (n -> eta, scaled tanh so the
/// embedding angles stay inside (-pi/2, pi/2)), the circuit with all qubits
/// measured, and a linear post layer down to the class count.
struct DQCModel {
  DenseLayer pre;
  CircuitConfig circuit;  // num_outputs == num_qubits
  QuantumParams quantum;
  DenseLayer post;

  static DQCModel init(int input_dim, CircuitConfig circuit, int classes, Rng& rng) {
    circuit.num_outputs = circuit.num_qubits;
    circuit.validate();
    if (classes < 2) throw ConfigError("classifier needs at least 2 classes");
    if (circuit.num_qubits < classes) {
      throw ConfigError("need at least as many qubits as classes, got " +
                        std::to_string(circuit.num_qubits) + " qubits for " +
                        std::to_string(classes) + " classes");
    }
    DQCModel m;
    m.pre = DenseLayer::init(input_dim, circuit.num_qubits, Activation::ScaledTanhHalfPi, rng);
    m.circuit = circuit;
    m.quantum = QuantumParams::random_init(circuit, rng);
    m.post = DenseLayer::init(circuit.num_qubits, classes, Activation::Identity, rng);
    return m;
  }

  int input_dim() const { return pre.in_dim; }
  int num_classes() const { return post.out_dim; }

  std::vector<double> forward(std::span<const double> x) const {
    return detail::dressed_forward(pre, post, x, [this](std::span<const double> z) {
      return vqc_forward(z, quantum, circuit);
    });
  }
};

struct QuantumHead {
  CircuitConfig circuit;  // num_outputs == number of classes
  QuantumParams params;
};

/// Compression layer feeding either a surrogate classical classifier
/// (pre-training phase) or the classifying circuit directly (fine-tuning
/// phase). Once the circuit head is installed the classical weights are
/// frozen: training never touches them again.
struct SequentModel {
  DenseLayer compression;                       // n -> eta, scaled tanh
  std::variant<DenseLayer, QuantumHead> head;   // surrogate | circuit
  bool frozen_classical = false;

  static SequentModel init(int input_dim, int num_qubits, int classes, Rng& rng) {
    if (classes < 2) throw ConfigError("classifier needs at least 2 classes");
    if (num_qubits < classes) {
      throw ConfigError("need at least as many qubits as classes, got " +
                        std::to_string(num_qubits) + " qubits for " + std::to_string(classes) +
                        " classes");
    }
    SequentModel m;
    m.compression = DenseLayer::init(input_dim, num_qubits, Activation::ScaledTanhHalfPi, rng);
    m.head = DenseLayer::init(num_qubits, classes, Activation::Identity, rng);
    return m;
  }

  bool surrogate_mode() const { return std::holds_alternative<DenseLayer>(head); }
  const DenseLayer& surrogate() const { return std::get<DenseLayer>(head); }
  const QuantumHead& quantum_head() const { return std::get<QuantumHead>(head); }

  int input_dim() const { return compression.in_dim; }
  int num_classes() const {
    return surrogate_mode() ? surrogate().out_dim : quantum_head().circuit.num_outputs;
  }

  std::vector<double> forward(std::span<const double> x) const {
    const std::vector<double> z = compression.forward(x);
    if (surrogate_mode()) return surrogate().forward(z);
    const auto& qh = quantum_head();
    return vqc_forward(z, qh.params, qh.circuit);
  }
};

/// Installs the circuit head with a seeded small-angle init and freezes the
/// classical weights. The compression layer is carried over bit-identically.
inline SequentModel swap_surrogate_for_vqc(const SequentModel& model, CircuitConfig circuit,
                                           std::uint64_t seed) {
  if (!model.surrogate_mode()) {
    throw ConfigError("swap_surrogate_for_vqc: model already has a quantum head");
  }
  circuit.validate();
  if (circuit.num_qubits != model.compression.out_dim) {
    throw ConfigError("swap_surrogate_for_vqc: circuit has " + std::to_string(circuit.num_qubits) +
                      " qubits but the compression layer emits " +
                      std::to_string(model.compression.out_dim) + " values");
  }
  if (circuit.num_outputs != model.surrogate().out_dim) {
    throw ConfigError("swap_surrogate_for_vqc: circuit measures " +
                      std::to_string(circuit.num_outputs) + " qubits but the surrogate emitted " +
                      std::to_string(model.surrogate().out_dim) + " classes");
  }
  SequentModel out = model;
  Rng rng(derive_seed(seed, "init.phi"));
  out.head = QuantumHead{circuit, QuantumParams::random_init(circuit, rng)};
  out.frozen_classical = true;
  return out;
}

/// Replaces the quantum block of a dressed model with a literal identity stub
/// and compares against the directly composed two-layer network. Returns the
/// maximum absolute deviation over the samples (zero up to float noise).
inline double identity_collapse_check(const DenseLayer& pre, const DenseLayer& post,
                                      const std::vector<std::vector<double>>& samples) {
  if (pre.out_dim != post.in_dim) {
    throw ConfigError("identity_collapse_check: pre.out_dim != post.in_dim");
  }
  double max_dev = 0.0;
  for (const auto& x : samples) {
    const std::vector<double> dressed = detail::dressed_forward(
        pre, post, x, [](std::span<const double> z) { return std::vector<double>(z.begin(), z.end()); });
    const std::vector<double> two_layer = post.forward(pre.forward(x));
    for (std::size_t k = 0; k < dressed.size(); ++k) {
      max_dev = std::max(max_dev, std::abs(dressed[k] - two_layer[k]));
    }
  }
  return max_dev;
}

struct ModelGrads {
  double loss = 0.0;
  std::vector<double> theta;  // same layout as theta_flat of the model
  std::vector<double> phi;    // same layout as phi_flat of the model
};

// --- flat parameter access ---------------------------------------------------

inline std::vector<double> theta_flat(const ClassicalBaseline& m) {
  std::vector<double> out;
  detail::append(out, m.hidden.weights);
  detail::append(out, m.hidden.bias);
  detail::append(out, m.output.weights);
  detail::append(out, m.output.bias);
  return out;
}

inline std::vector<double> phi_flat(const ClassicalBaseline&) { return {}; }

inline void set_theta(ClassicalBaseline& m, std::span<const double> theta) {
  detail::take(theta, m.hidden.weights);
  detail::take(theta, m.hidden.bias);
  detail::take(theta, m.output.weights);
  detail::take(theta, m.output.bias);
}

inline void set_phi(ClassicalBaseline&, std::span<const double>) {}

inline std::vector<double> theta_flat(const DQCModel& m) {
  std::vector<double> out;
  detail::append(out, m.pre.weights);
  detail::append(out, m.pre.bias);
  detail::append(out, m.post.weights);
  detail::append(out, m.post.bias);
  return out;
}

inline std::vector<double> phi_flat(const DQCModel& m) { return m.quantum.angles; }

inline void set_theta(DQCModel& m, std::span<const double> theta) {
  detail::take(theta, m.pre.weights);
  detail::take(theta, m.pre.bias);
  detail::take(theta, m.post.weights);
  detail::take(theta, m.post.bias);
}

inline void set_phi(DQCModel& m, std::span<const double> phi) {
  detail::take(phi, m.quantum.angles);
}

inline std::vector<double> theta_flat(const SequentModel& m) {
  std::vector<double> out;
  detail::append(out, m.compression.weights);
  detail::append(out, m.compression.bias);
  if (m.surrogate_mode()) {
    detail::append(out, m.surrogate().weights);
    detail::append(out, m.surrogate().bias);
  }
  return out;
}

inline std::vector<double> phi_flat(const SequentModel& m) {
  return m.surrogate_mode() ? std::vector<double>{} : m.quantum_head().params.angles;
}

inline void set_theta(SequentModel& m, std::span<const double> theta) {
  detail::take(theta, m.compression.weights);
  detail::take(theta, m.compression.bias);
  if (m.surrogate_mode()) {
    auto& s = std::get<DenseLayer>(m.head);
    detail::take(theta, s.weights);
    detail::take(theta, s.bias);
  }
}

inline void set_phi(SequentModel& m, std::span<const double> phi) {
  if (m.surrogate_mode()) return;
  detail::take(phi, std::get<QuantumHead>(m.head).params.angles);
}

// --- per-sample gradients ----------------------------------------------------

inline ModelGrads backward(const ClassicalBaseline& m, std::span<const double> x, int target,
                           Loss loss) {
  const std::vector<double> h = m.hidden.forward(x);
  const std::vector<double> logits = m.output.forward(h);
  const LossResult lr = compute_loss(loss, logits, target);
  const DenseGrad out_g = dense_backward(m.output, h, lr.grad);
  const DenseGrad hid_g = dense_backward(m.hidden, x, out_g.input);
  ModelGrads g;
  g.loss = lr.loss;
  detail::append(g.theta, hid_g.weights);
  detail::append(g.theta, hid_g.bias);
  detail::append(g.theta, out_g.weights);
  detail::append(g.theta, out_g.bias);
  return g;
}

inline ModelGrads backward(const DQCModel& m, std::span<const double> x, int target, Loss loss) {
  const auto grads = detail::dressed_backward(
      m.pre, m.post, x, target, loss,
      [&m](std::span<const double> z) { return vqc_forward(z, m.quantum, m.circuit); },
      [&m](std::span<const double> z) { return input_jacobian(z, m.quantum, m.circuit); });
  ModelGrads g;
  g.loss = grads.loss;
  detail::append(g.theta, grads.pre.weights);
  detail::append(g.theta, grads.pre.bias);
  detail::append(g.theta, grads.post.weights);
  detail::append(g.theta, grads.post.bias);
  // dL/dphi_{l,q} = sum_k dL/de_k * de_k/dphi_{l,q}
  const std::vector<double> jac = param_shift_grad(grads.mid_input, m.quantum, m.circuit);
  const auto eta = static_cast<std::size_t>(m.circuit.num_qubits);
  const auto depth = static_cast<std::size_t>(m.circuit.depth);
  g.phi.assign(depth * eta, 0.0);
  for (std::size_t k = 0; k < grads.mid_upstream.size(); ++k) {
    const double up = grads.mid_upstream[k];
    for (std::size_t i = 0; i < depth * eta; ++i) g.phi[i] += up * jac[k * depth * eta + i];
  }
  return g;
}

inline ModelGrads backward(const SequentModel& m, std::span<const double> x, int target,
                           Loss loss) {
  ModelGrads g;
  const std::vector<double> z = m.compression.forward(x);
  if (m.surrogate_mode()) {
    const std::vector<double> logits = m.surrogate().forward(z);
    const LossResult lr = compute_loss(loss, logits, target);
    const DenseGrad sur_g = dense_backward(m.surrogate(), z, lr.grad);
    const DenseGrad comp_g = dense_backward(m.compression, x, sur_g.input);
    g.loss = lr.loss;
    detail::append(g.theta, comp_g.weights);
    detail::append(g.theta, comp_g.bias);
    detail::append(g.theta, sur_g.weights);
    detail::append(g.theta, sur_g.bias);
    return g;
  }
  // Quantum head: phi gradients only. The compression layer is frozen, so its
  // gradients are absent by construction rather than zeroed.
  const auto& qh = m.quantum_head();
  const std::vector<double> logits = vqc_forward(z, qh.params, qh.circuit);
  const LossResult lr = compute_loss(loss, logits, target);
  g.loss = lr.loss;
  const std::vector<double> jac = param_shift_grad(z, qh.params, qh.circuit);
  const auto n_phi = qh.params.angles.size();
  g.phi.assign(n_phi, 0.0);
  for (std::size_t k = 0; k < lr.grad.size(); ++k) {
    for (std::size_t i = 0; i < n_phi; ++i) g.phi[i] += lr.grad[k] * jac[k * n_phi + i];
  }
  return g;
}

}  // namespace sequent
