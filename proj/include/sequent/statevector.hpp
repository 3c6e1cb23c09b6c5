#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "sequent/errors.hpp"

namespace sequent {

using c64 = std::complex<double>;

enum class Axis { X, Y, Z };

inline char axis_name(Axis a) {
  switch (a) {
    case Axis::X: return 'X';
    case Axis::Y: return 'Y';
    default: return 'Z';
  }
}

inline Axis axis_from_char(char c) {
  switch (c) {
    case 'X': case 'x': return Axis::X;
    case 'Y': case 'y': return Axis::Y;
    case 'Z': case 'z': return Axis::Z;
    default: throw ConfigError(std::string("invalid rotation axis '") + c + "', expected X, Y or Z");
  }
}

/// Dense statevector over 2^n basis states. Bit convention: qubit q is bit q
/// of the basis index, so qubit 0 is the least significant bit.
class StateVector {
 public:
  static constexpr int kMaxQubits = 24;  // ~256 MiB of complex doubles

  /// Initializes |0...0>.
  explicit StateVector(int num_qubits) : num_qubits_(num_qubits) {
    if (num_qubits < 1 || num_qubits > kMaxQubits) {
      throw ConfigError("num_qubits must be in [1, " + std::to_string(kMaxQubits) +
                        "], got " + std::to_string(num_qubits));
    }
    amps_.assign(std::size_t{1} << num_qubits, c64{0.0, 0.0});
    amps_[0] = c64{1.0, 0.0};
  }

  int num_qubits() const { return num_qubits_; }
  std::size_t size() const { return amps_.size(); }
  const std::vector<c64>& amplitudes() const { return amps_; }
  std::vector<c64>& amplitudes() { return amps_; }

  void apply_hadamard(int qubit) {
    check_qubit(qubit);
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    apply_single_qubit(qubit, {inv_sqrt2, 0.0}, {inv_sqrt2, 0.0}, {inv_sqrt2, 0.0}, {-inv_sqrt2, 0.0});
  }

  /// R_P(theta) = exp(-i * theta/2 * P) for P in {X, Y, Z}.
  void apply_rotation(int qubit, Axis axis, double angle) {
    check_qubit(qubit);
    if (!std::isfinite(angle)) {
      throw ConfigError("rotation angle must be finite");
    }
    const double c = std::cos(angle / 2.0);
    const double s = std::sin(angle / 2.0);
    switch (axis) {
      case Axis::X:
        apply_single_qubit(qubit, {c, 0.0}, {0.0, -s}, {0.0, -s}, {c, 0.0});
        break;
      case Axis::Y:
        apply_single_qubit(qubit, {c, 0.0}, {-s, 0.0}, {s, 0.0}, {c, 0.0});
        break;
      case Axis::Z:
        apply_single_qubit(qubit, {c, -s}, {0.0, 0.0}, {0.0, 0.0}, {c, s});
        break;
    }
  }

  void apply_cnot(int control, int target) {
    check_qubit(control);
    check_qubit(target);
    if (control == target) {
      throw ConfigError("cnot control and target must differ, both are " + std::to_string(control));
    }
    const std::size_t cmask = std::size_t{1} << control;
    const std::size_t tmask = std::size_t{1} << target;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      if ((i & cmask) != 0 && (i & tmask) == 0) {
        std::swap(amps_[i], amps_[i | tmask]);
      }
    }
  }

  /// Pauli-Z expectation of one qubit: sum of (+/-1) * |amp|^2, sign by bit q.
  double expect_z(int qubit) const {
    check_qubit(qubit);
    const std::size_t mask = std::size_t{1} << qubit;
    double value = 0.0;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      const double p = std::norm(amps_[i]);
      value += (i & mask) ? -p : p;
    }
    return std::clamp(value, -1.0, 1.0);
  }

  double norm() const {
    double n2 = 0.0;
    for (const auto& a : amps_) n2 += std::norm(a);
    return std::sqrt(n2);
  }

 private:
  void check_qubit(int qubit) const {
    if (qubit < 0 || qubit >= num_qubits_) {
      throw ConfigError("qubit index " + std::to_string(qubit) + " out of range [0, " +
                        std::to_string(num_qubits_) + ")");
    }
  }

  void apply_single_qubit(int qubit, c64 u00, c64 u01, c64 u10, c64 u11) {
    const std::size_t step = std::size_t{1} << qubit;
    for (std::size_t base = 0; base < amps_.size(); base += 2 * step) {
      for (std::size_t i = base; i < base + step; ++i) {
        const c64 a0 = amps_[i];
        const c64 a1 = amps_[i + step];
        amps_[i] = u00 * a0 + u01 * a1;
        amps_[i + step] = u10 * a0 + u11 * a1;
      }
    }
  }

  int num_qubits_;
  std::vector<c64> amps_;
};

}  // namespace sequent
