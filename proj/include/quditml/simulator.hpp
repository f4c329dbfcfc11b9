// simulator.hpp — Statevector of a single qudit or a small qubit register,
// with exact measurement probabilities. Qubit indices are big-endian:
// qubit 0 is the most significant bit of the basis index.

#pragma once

#include "quditml/algebra.hpp"

namespace quditml {

inline constexpr double kStateNormTol = 1e-10;

// Normalized amplitude vector; Sum_k |c_k|^2 = 1 within kStateNormTol.
struct QuantumState {
    CVector amplitudes;

    explicit QuantumState(CVector amps);

    int dim() const { return static_cast<int>(amplitudes.size()); }
};

// |0> of the given dimension.
QuantumState ground_state(int dim);

QuantumState apply_unitary(const QuantumState& state, const Matrix& unitary);

// probs[k] = |c_k|^2.
RVector measurement_probabilities(const QuantumState& state);

// <psi|O|psi>; throws ContractViolation when the imaginary residual >= 1e-8.
double expectation_value(const QuantumState& state, const Matrix& observable);

// I ⊗ ... ⊗ U2 ⊗ ... ⊗ I with U2 at `target` in a `qubits`-wide register.
Matrix embed_single_qubit_gate(const Matrix& u2, int target, int qubits);

// CNOT embedded in dim 2^qubits; a 0/1 permutation matrix.
Matrix cnot_gate(int control, int target, int qubits);

} // namespace quditml
