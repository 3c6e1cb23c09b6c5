#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "sequent/rng.hpp"
#include "sequent/statevector.hpp"

// Reference simulator used to cross-check the statevector kernels. It builds
// the full 2^n x 2^n unitary of every gate from Kronecker products and applies
// it by dense matrix-vector multiplication, sharing no code with the
// stride/swap loops in StateVector. Only meant for small n.
namespace sequent::oracle {

struct Matrix {
  std::size_t dim = 0;
  std::vector<c64> a;  // row-major dim x dim

  static Matrix identity(std::size_t dim) {
    Matrix m{dim, std::vector<c64>(dim * dim, c64{0, 0})};
    for (std::size_t i = 0; i < dim; ++i) m.a[i * dim + i] = c64{1, 0};
    return m;
  }

  c64& at(std::size_t r, std::size_t c) { return a[r * dim + c]; }
  c64 at(std::size_t r, std::size_t c) const { return a[r * dim + c]; }
};

inline Matrix kron(const Matrix& x, const Matrix& y) {
  Matrix out{x.dim * y.dim, std::vector<c64>(x.dim * y.dim * x.dim * y.dim)};
  for (std::size_t xr = 0; xr < x.dim; ++xr)
    for (std::size_t xc = 0; xc < x.dim; ++xc)
      for (std::size_t yr = 0; yr < y.dim; ++yr)
        for (std::size_t yc = 0; yc < y.dim; ++yc)
          out.at(xr * y.dim + yr, xc * y.dim + yc) = x.at(xr, xc) * y.at(yr, yc);
  return out;
}

inline std::vector<c64> mat_vec(const Matrix& m, const std::vector<c64>& v) {
  std::vector<c64> out(m.dim, c64{0, 0});
  for (std::size_t r = 0; r < m.dim; ++r)
    for (std::size_t c = 0; c < m.dim; ++c) out[r] += m.at(r, c) * v[c];
  return out;
}

inline std::array<c64, 4> hadamard2x2() {
  const double s = 1.0 / std::sqrt(2.0);
  return {c64{s, 0}, c64{s, 0}, c64{s, 0}, c64{-s, 0}};
}

inline std::array<c64, 4> rotation2x2(Axis axis, double angle) {
  const double c = std::cos(angle / 2.0);
  const double s = std::sin(angle / 2.0);
  switch (axis) {
    case Axis::X: return {c64{c, 0}, c64{0, -s}, c64{0, -s}, c64{c, 0}};
    case Axis::Y: return {c64{c, 0}, c64{-s, 0}, c64{s, 0}, c64{c, 0}};
    default:      return {c64{c, -s}, c64{0, 0}, c64{0, 0}, c64{c, s}};
  }
}

/// I x ... x U x ... x I with U at qubit position q (qubit 0 = least
/// significant index bit, i.e. the last Kronecker factor).
inline Matrix single_qubit_op(int num_qubits, int qubit, const std::array<c64, 4>& u) {
  Matrix um{2, {u[0], u[1], u[2], u[3]}};
  Matrix out = kron(Matrix::identity(std::size_t{1} << (num_qubits - 1 - qubit)), um);
  return kron(out, Matrix::identity(std::size_t{1} << qubit));
}

/// Permutation matrix flipping the target bit wherever the control bit is set.
inline Matrix cnot_op(int num_qubits, int control, int target) {
  const std::size_t dim = std::size_t{1} << num_qubits;
  const std::size_t cmask = std::size_t{1} << control;
  const std::size_t tmask = std::size_t{1} << target;
  Matrix m{dim, std::vector<c64>(dim * dim, c64{0, 0})};
  for (std::size_t col = 0; col < dim; ++col) {
    const std::size_t row = (col & cmask) ? (col ^ tmask) : col;
    m.at(row, col) = c64{1, 0};
  }
  return m;
}

inline double expect_z(const std::vector<c64>& v, int qubit) {
  const std::size_t mask = std::size_t{1} << qubit;
  double value = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double p = std::norm(v[i]);
    value += (i & mask) ? -p : p;
  }
  return value;
}

// A random gate drawn for equivalence checks; applied to both simulators.
struct GateOp {
  enum class Kind { H, RX, RY, RZ, CNOT };
  Kind kind;
  int q1 = 0;
  int q2 = 0;      // cnot target
  double angle = 0.0;
};

inline std::vector<GateOp> random_sequence(Rng& rng, int num_qubits, int length) {
  std::vector<GateOp> seq;
  seq.reserve(static_cast<std::size_t>(length));
  for (int i = 0; i < length; ++i) {
    GateOp op;
    const int pick = num_qubits > 1 ? rng.uniform_int(0, 4) : rng.uniform_int(0, 3);
    op.kind = static_cast<GateOp::Kind>(pick);
    op.q1 = rng.uniform_int(0, num_qubits - 1);
    if (op.kind == GateOp::Kind::CNOT) {
      op.q2 = rng.uniform_int(0, num_qubits - 2);
      if (op.q2 >= op.q1) ++op.q2;  // distinct target
    } else if (op.kind != GateOp::Kind::H) {
      op.angle = rng.uniform(-2.0 * 3.14159265358979323846, 2.0 * 3.14159265358979323846);
    }
    seq.push_back(op);
  }
  return seq;
}

inline void apply_to_statevector(StateVector& state, const GateOp& op) {
  switch (op.kind) {
    case GateOp::Kind::H: state.apply_hadamard(op.q1); break;
    case GateOp::Kind::RX: state.apply_rotation(op.q1, Axis::X, op.angle); break;
    case GateOp::Kind::RY: state.apply_rotation(op.q1, Axis::Y, op.angle); break;
    case GateOp::Kind::RZ: state.apply_rotation(op.q1, Axis::Z, op.angle); break;
    case GateOp::Kind::CNOT: state.apply_cnot(op.q1, op.q2); break;
  }
}

inline std::vector<c64> apply_to_dense(const std::vector<c64>& v, int num_qubits, const GateOp& op) {
  switch (op.kind) {
    case GateOp::Kind::H: return mat_vec(single_qubit_op(num_qubits, op.q1, hadamard2x2()), v);
    case GateOp::Kind::RX: return mat_vec(single_qubit_op(num_qubits, op.q1, rotation2x2(Axis::X, op.angle)), v);
    case GateOp::Kind::RY: return mat_vec(single_qubit_op(num_qubits, op.q1, rotation2x2(Axis::Y, op.angle)), v);
    case GateOp::Kind::RZ: return mat_vec(single_qubit_op(num_qubits, op.q1, rotation2x2(Axis::Z, op.angle)), v);
    case GateOp::Kind::CNOT: return mat_vec(cnot_op(num_qubits, op.q1, op.q2), v);
  }
  return v;
}

}  // namespace sequent::oracle
