#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "sequent/errors.hpp"
#include "sequent/rng.hpp"
#include "sequent/statevector.hpp"

namespace sequent {

/// Shape of the variational circuit: qubit count, number of entangling
/// layers, how many qubits are read out, and the rotation axes used for data
/// embedding and for the parameterized layer rotations.
///
/// The axes default to Y. An all-Z circuit measured in Z provably returns
/// constant zero (Hadamards make all amplitude magnitudes equal and diagonal
/// rotations plus CNOT permutations keep them equal), so a Z/Z configuration
/// is constructible but useless for learning; vqc_forward is exercised against
/// that degeneracy in the verification suite.
struct CircuitConfig {
  int num_qubits = 6;
  int depth = 10;        // entangling layers
  int num_outputs = 6;   // leading qubits measured
  Axis embed_axis = Axis::Y;
  Axis entangle_axis = Axis::Y;

  void validate() const {
    if (num_qubits < 1 || num_qubits > StateVector::kMaxQubits) {
      throw ConfigError("circuit num_qubits must be in [1, " +
                        std::to_string(StateVector::kMaxQubits) + "], got " +
                        std::to_string(num_qubits));
    }
    if (depth < 0) throw ConfigError("circuit depth must be >= 0, got " + std::to_string(depth));
    if (num_outputs < 1 || num_outputs > num_qubits) {
      throw ConfigError("circuit num_outputs must be in [1, num_qubits], got " +
                        std::to_string(num_outputs));
    }
  }
};

/// Trainable rotation angles, one per qubit per entangling layer (depth x num_qubits).
struct QuantumParams {
  int depth = 0;
  int num_qubits = 0;
  std::vector<double> angles;  // row-major [layer][qubit]

  static QuantumParams zeros(const CircuitConfig& config) {
    QuantumParams p;
    p.depth = config.depth;
    p.num_qubits = config.num_qubits;
    p.angles.assign(static_cast<std::size_t>(config.depth) * config.num_qubits, 0.0);
    return p;
  }

  /// Small-angle init keeps the starting circuit close to plain embedding readout.
  static QuantumParams random_init(const CircuitConfig& config, Rng& rng, double scale = 0.01) {
    QuantumParams p = zeros(config);
    for (double& a : p.angles) a = rng.uniform(-scale, scale);
    return p;
  }

  double& at(int layer, int qubit) { return angles[static_cast<std::size_t>(layer) * num_qubits + qubit]; }
  double at(int layer, int qubit) const { return angles[static_cast<std::size_t>(layer) * num_qubits + qubit]; }

  std::span<const double> layer(int l) const {
    return std::span<const double>(angles).subspan(static_cast<std::size_t>(l) * num_qubits,
                                                   static_cast<std::size_t>(num_qubits));
  }

  void check_shape(const CircuitConfig& config) const {
    if (depth != config.depth || num_qubits != config.num_qubits) {
      throw ConfigError("quantum parameter shape " + std::to_string(depth) + "x" +
                        std::to_string(num_qubits) + " does not match circuit " +
                        std::to_string(config.depth) + "x" + std::to_string(config.num_qubits));
    }
    for (double a : angles) {
      if (!std::isfinite(a)) throw ConfigError("quantum parameters contain a non-finite angle");
    }
  }
};

/// Data loading: Hadamard on every qubit, then one embed-axis rotation per
/// qubit with the feature value as the angle.
inline StateVector embed(std::span<const double> z, const CircuitConfig& config) {
  config.validate();
  if (static_cast<int>(z.size()) != config.num_qubits) {
    throw ConfigError("embed expects " + std::to_string(config.num_qubits) +
                      " inputs, got " + std::to_string(z.size()));
  }
  StateVector state(config.num_qubits);
  for (int q = 0; q < config.num_qubits; ++q) state.apply_hadamard(q);
  for (int q = 0; q < config.num_qubits; ++q) state.apply_rotation(q, config.embed_axis, z[q]);
  return state;
}

/// One entangling layer: CNOTs along the open chain q -> q+1, then one
/// entangle-axis rotation per qubit.
inline void entangle_layer(StateVector& state, std::span<const double> layer_angles,
                           const CircuitConfig& config) {
  if (static_cast<int>(layer_angles.size()) != config.num_qubits) {
    throw ConfigError("entangle_layer expects " + std::to_string(config.num_qubits) +
                      " angles, got " + std::to_string(layer_angles.size()));
  }
  for (int q = 0; q + 1 < config.num_qubits; ++q) state.apply_cnot(q, q + 1);
  for (int q = 0; q < config.num_qubits; ++q) {
    state.apply_rotation(q, config.entangle_axis, layer_angles[q]);
  }
}

/// Full circuit: embed, depth entangling layers, Pauli-Z readout of the first
/// num_outputs qubits. Each output lies in [-1, 1].
inline std::vector<double> vqc_forward(std::span<const double> z, const QuantumParams& params,
                                       const CircuitConfig& config) {
  params.check_shape(config);
  StateVector state = embed(z, config);
  for (int l = 0; l < config.depth; ++l) entangle_layer(state, params.layer(l), config);
  std::vector<double> out(static_cast<std::size_t>(config.num_outputs));
  for (int k = 0; k < config.num_outputs; ++k) out[static_cast<std::size_t>(k)] = state.expect_z(k);
  return out;
}

namespace detail {
constexpr double kShift = 1.5707963267948966;  // pi/2
}

/// Exact gradients d out_k / d phi_{l,q} by the parameter-shift rule:
/// (f(phi + pi/2) - f(phi - pi/2)) / 2, valid because every parameterized
/// gate is a Pauli rotation appearing exactly once. Costs 2 * depth *
/// num_qubits forward passes. Layout: row-major [output][layer][qubit].
inline std::vector<double> param_shift_grad(std::span<const double> z, const QuantumParams& params,
                                            const CircuitConfig& config) {
  params.check_shape(config);
  const int sigma = config.num_outputs;
  const int depth = config.depth;
  const int eta = config.num_qubits;
  std::vector<double> grad(static_cast<std::size_t>(sigma) * depth * eta, 0.0);
  QuantumParams shifted = params;
  for (int l = 0; l < depth; ++l) {
    for (int q = 0; q < eta; ++q) {
      const double original = shifted.at(l, q);
      shifted.at(l, q) = original + detail::kShift;
      const std::vector<double> plus = vqc_forward(z, shifted, config);
      shifted.at(l, q) = original - detail::kShift;
      const std::vector<double> minus = vqc_forward(z, shifted, config);
      shifted.at(l, q) = original;
      for (int k = 0; k < sigma; ++k) {
        grad[(static_cast<std::size_t>(k) * depth + l) * eta + q] =
            0.5 * (plus[static_cast<std::size_t>(k)] - minus[static_cast<std::size_t>(k)]);
      }
    }
  }
  return grad;
}

/// Jacobian d out_k / d z_q via the same shift rule applied to the embedding
/// angles. Layout: row-major [output][qubit].
inline std::vector<double> input_jacobian(std::span<const double> z, const QuantumParams& params,
                                          const CircuitConfig& config) {
  params.check_shape(config);
  const int sigma = config.num_outputs;
  const int eta = config.num_qubits;
  std::vector<double> jac(static_cast<std::size_t>(sigma) * eta, 0.0);
  std::vector<double> shifted(z.begin(), z.end());
  for (int q = 0; q < eta; ++q) {
    const double original = shifted[static_cast<std::size_t>(q)];
    shifted[static_cast<std::size_t>(q)] = original + detail::kShift;
    const std::vector<double> plus = vqc_forward(shifted, params, config);
    shifted[static_cast<std::size_t>(q)] = original - detail::kShift;
    const std::vector<double> minus = vqc_forward(shifted, params, config);
    shifted[static_cast<std::size_t>(q)] = original;
    for (int k = 0; k < sigma; ++k) {
      jac[static_cast<std::size_t>(k) * eta + q] =
          0.5 * (plus[static_cast<std::size_t>(k)] - minus[static_cast<std::size_t>(k)]);
    }
  }
  return jac;
}

}  // namespace sequent
