#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "sequent/ansatz.hpp"
#include "sequent/models.hpp"
#include "sequent/oracle.hpp"

namespace sequent::verify {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 20240101;
  int oracle_sequences = 1000;     // random 2-qubit sequences vs the dense oracle
  int norm_sequences = 50;         // 6-qubit norm-preservation sequences of length 100
  int gradient_instances = 50;     // random circuits checked against finite differences
  int degeneracy_draws = 100;
  int collapse_inputs = 100;
  // Test hook: applies CNOTs with control and target swapped on the simulator
  // side only, to prove the oracle check catches a broken gate.
  bool inject_cnot_fault = false;
};

namespace detail {

inline std::string format_max(const char* label, double value, double tolerance) {
  std::ostringstream os;
  os << label << " " << value << " (tolerance " << tolerance << ")";
  return os.str();
}

}  // namespace detail

/// Random 2-qubit gate sequences applied both to the statevector kernels and
/// to an independent dense matrix-chain simulator; amplitudes must agree to
/// 1e-12. Also checks norm preservation over 100-gate sequences on 6 qubits.
inline CheckResult check_simulator_oracle(const VerifyOptions& opts) {
  CheckResult r{"simulator-oracle", false, ""};
  Rng rng(derive_seed(opts.seed, "verify.oracle"));
  double max_dev = 0.0;
  for (int trial = 0; trial < opts.oracle_sequences; ++trial) {
    const int length = rng.uniform_int(1, 30);
    const auto seq = oracle::random_sequence(rng, 2, length);

    StateVector state(2);
    std::vector<c64> dense = {c64{1, 0}, c64{0, 0}, c64{0, 0}, c64{0, 0}};
    for (const auto& op : seq) {
      if (opts.inject_cnot_fault && op.kind == oracle::GateOp::Kind::CNOT) {
        state.apply_cnot(op.q2, op.q1);  // deliberately wrong
      } else {
        oracle::apply_to_statevector(state, op);
      }
      dense = oracle::apply_to_dense(dense, 2, op);
    }
    for (std::size_t i = 0; i < dense.size(); ++i) {
      max_dev = std::max(max_dev, std::abs(state.amplitudes()[i] - dense[i]));
    }
  }

  double max_norm_dev = 0.0;
  for (int trial = 0; trial < opts.norm_sequences; ++trial) {
    StateVector state(6);
    for (const auto& op : oracle::random_sequence(rng, 6, 100)) {
      oracle::apply_to_statevector(state, op);
    }
    max_norm_dev = std::max(max_norm_dev, std::abs(state.norm() - 1.0));
  }

  r.passed = max_dev <= 1e-12 && max_norm_dev <= 1e-10;
  std::ostringstream os;
  os << "max amplitude deviation " << max_dev << " over " << opts.oracle_sequences
     << " sequences (tol 1e-12); max norm deviation " << max_norm_dev << " (tol 1e-10)";
  r.detail = os.str();
  return r;
}

/// Parameter-shift gradients and input jacobians against central finite
/// differences (step 1e-4, tolerance 1e-5) on random small circuits.
inline CheckResult check_gradient_finite_difference(const VerifyOptions& opts) {
  CheckResult r{"gradient-finite-difference", false, ""};
  Rng rng(derive_seed(opts.seed, "verify.gradient"));
  const double step = 1e-4;
  double max_dev = 0.0;
  const Axis axes[] = {Axis::X, Axis::Y, Axis::Z};
  for (int trial = 0; trial < opts.gradient_instances; ++trial) {
    CircuitConfig config;
    config.num_qubits = rng.uniform_int(1, 4);
    config.depth = rng.uniform_int(0, 3);
    config.num_outputs = rng.uniform_int(1, config.num_qubits);
    config.embed_axis = axes[rng.uniform_int(0, 2)];
    config.entangle_axis = axes[rng.uniform_int(0, 2)];

    std::vector<double> z(static_cast<std::size_t>(config.num_qubits));
    for (double& v : z) v = rng.uniform(-3.14159265358979, 3.14159265358979);
    QuantumParams params = QuantumParams::zeros(config);
    for (double& a : params.angles) a = rng.uniform(-3.14159265358979, 3.14159265358979);

    const int sigma = config.num_outputs;
    const int eta = config.num_qubits;
    const int depth = config.depth;

    const auto analytic = param_shift_grad(z, params, config);
    for (int l = 0; l < depth; ++l) {
      for (int q = 0; q < eta; ++q) {
        QuantumParams shifted = params;
        shifted.at(l, q) += step;
        const auto plus = vqc_forward(z, shifted, config);
        shifted.at(l, q) -= 2.0 * step;
        const auto minus = vqc_forward(z, shifted, config);
        for (int k = 0; k < sigma; ++k) {
          const double fd = (plus[static_cast<std::size_t>(k)] - minus[static_cast<std::size_t>(k)]) / (2.0 * step);
          const double ps = analytic[(static_cast<std::size_t>(k) * depth + l) * eta + q];
          max_dev = std::max(max_dev, std::abs(fd - ps));
        }
      }
    }

    const auto jac = input_jacobian(z, params, config);
    for (int q = 0; q < eta; ++q) {
      std::vector<double> zp = z;
      zp[static_cast<std::size_t>(q)] += step;
      const auto plus = vqc_forward(zp, params, config);
      zp[static_cast<std::size_t>(q)] -= 2.0 * step;
      const auto minus = vqc_forward(zp, params, config);
      for (int k = 0; k < sigma; ++k) {
        const double fd = (plus[static_cast<std::size_t>(k)] - minus[static_cast<std::size_t>(k)]) / (2.0 * step);
        max_dev = std::max(max_dev, std::abs(fd - jac[static_cast<std::size_t>(k) * eta + q]));
      }
    }
  }
  r.passed = max_dev <= 1e-5;
  r.detail = detail::format_max("max |parameter-shift - finite-difference|", max_dev, 1e-5);
  return r;
}

/// A dressed model whose quantum block is the identity must equal the plain
/// two-layer network, including at the benchmark shapes.
inline CheckResult check_identity_collapse(const VerifyOptions& opts) {
  CheckResult r{"identity-collapse", false, ""};
  Rng rng(derive_seed(opts.seed, "verify.collapse"));
  double max_dev = 0.0;
  struct Shape {
    int n, eta, classes;
  };
  const Shape shapes[] = {{2, 6, 2}, {3, 4, 2}, {5, 5, 3}};
  for (const auto& shape : shapes) {
    DenseLayer pre = DenseLayer::init(shape.n, shape.eta, Activation::ScaledTanhHalfPi, rng);
    DenseLayer post = DenseLayer::init(shape.eta, shape.classes, Activation::Identity, rng);
    std::vector<std::vector<double>> samples;
    for (int i = 0; i < opts.collapse_inputs; ++i) {
      std::vector<double> x(static_cast<std::size_t>(shape.n));
      for (double& v : x) v = rng.uniform(-3.0, 3.0);
      samples.push_back(std::move(x));
    }
    max_dev = std::max(max_dev, identity_collapse_check(pre, post, samples));
  }
  r.passed = max_dev <= 1e-12;
  r.detail = detail::format_max("max |stub-dressed - two-layer|", max_dev, 1e-12);
  return r;
}

/// With both axes set to Z the circuit output is provably constant zero: the
/// design hazard that motivates the Y-axis default.
inline CheckResult check_all_z_degeneracy(const VerifyOptions& opts) {
  CheckResult r{"all-z-degeneracy", false, ""};
  Rng rng(derive_seed(opts.seed, "verify.degeneracy"));
  double max_abs = 0.0;
  for (int trial = 0; trial < opts.degeneracy_draws; ++trial) {
    CircuitConfig config;
    config.num_qubits = rng.uniform_int(1, 4);
    config.depth = rng.uniform_int(0, 3);
    config.num_outputs = config.num_qubits;
    config.embed_axis = Axis::Z;
    config.entangle_axis = Axis::Z;
    std::vector<double> z(static_cast<std::size_t>(config.num_qubits));
    for (double& v : z) v = rng.uniform(-3.14159265358979, 3.14159265358979);
    QuantumParams params = QuantumParams::zeros(config);
    for (double& a : params.angles) a = rng.uniform(-3.14159265358979, 3.14159265358979);
    for (double out : vqc_forward(z, params, config)) {
      max_abs = std::max(max_abs, std::abs(out));
    }
  }
  r.passed = max_abs <= 1e-12;
  r.detail = detail::format_max("max |output|", max_abs, 1e-12);
  return r;
}

inline std::vector<CheckResult> run_all_checks(const VerifyOptions& opts = {}) {
  return {check_simulator_oracle(opts), check_gradient_finite_difference(opts),
          check_identity_collapse(opts), check_all_z_degeneracy(opts)};
}

}  // namespace sequent::verify
