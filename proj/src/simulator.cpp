#include "quditml/simulator.hpp"

#include "quditml/errors.hpp"

#include <cmath>
#include <string>

namespace quditml {

QuantumState::QuantumState(CVector amps) : amplitudes(std::move(amps)) {
    if (amplitudes.size() < 2) {
        throw InvalidInput("QuantumState: dimension must be >= 2");
    }
    const double norm_sq = amplitudes.squaredNorm();
    if (std::abs(norm_sq - 1.0) > kStateNormTol) {
        throw ContractViolation("QuantumState: amplitudes are not normalized (|c|^2 = " +
                                std::to_string(norm_sq) + ")");
    }
}

QuantumState ground_state(int dim) {
    if (dim < 2) {
        throw InvalidInput("ground_state: dimension must be >= 2, got " +
                           std::to_string(dim));
    }
    CVector amps = CVector::Zero(dim);
    amps[0] = 1.0;
    return QuantumState(std::move(amps));
}

QuantumState apply_unitary(const QuantumState& state, const Matrix& unitary) {
    if (unitary.rows() != unitary.cols() || unitary.cols() != state.amplitudes.size()) {
        throw ShapeError("apply_unitary: unitary is " + std::to_string(unitary.rows()) +
                         "x" + std::to_string(unitary.cols()) + " but state has dim " +
                         std::to_string(state.dim()));
    }
    return QuantumState(unitary * state.amplitudes);
}

RVector measurement_probabilities(const QuantumState& state) {
    return state.amplitudes.cwiseAbs2();
}

double expectation_value(const QuantumState& state, const Matrix& observable) {
    if (observable.rows() != observable.cols() ||
        observable.cols() != state.amplitudes.size()) {
        throw ShapeError("expectation_value: observable dimension mismatch");
    }
    const Complex value = state.amplitudes.dot(observable * state.amplitudes);
    if (std::abs(value.imag()) >= 1e-8) {
        throw ContractViolation("expectation_value: imaginary residual " +
                                std::to_string(value.imag()));
    }
    return value.real();
}

Matrix embed_single_qubit_gate(const Matrix& u2, int target, int qubits) {
    if (u2.rows() != 2 || u2.cols() != 2) {
        throw ShapeError("embed_single_qubit_gate: gate must be 2x2");
    }
    if (target < 0 || target >= qubits) {
        throw InvalidInput("embed_single_qubit_gate: target " + std::to_string(target) +
                           " out of range for " + std::to_string(qubits) + " qubits");
    }
    const Eigen::Index dim = Eigen::Index(1) << qubits;
    const Eigen::Index left = Eigen::Index(1) << target;            // blocks above target
    const Eigen::Index right = Eigen::Index(1) << (qubits - 1 - target); // span below target

    Matrix embedded = Matrix::Zero(dim, dim);
    for (Eigen::Index a = 0; a < left; ++a) {
        for (Eigen::Index b = 0; b < right; ++b) {
            for (Eigen::Index t = 0; t < 2; ++t) {
                for (Eigen::Index s = 0; s < 2; ++s) {
                    embedded((a * 2 + t) * right + b, (a * 2 + s) * right + b) = u2(t, s);
                }
            }
        }
    }
    return embedded;
}

Matrix cnot_gate(int control, int target, int qubits) {
    if (control == target) {
        throw InvalidInput("cnot_gate: control and target must differ");
    }
    if (control < 0 || control >= qubits || target < 0 || target >= qubits) {
        throw InvalidInput("cnot_gate: wire index out of range");
    }
    const Eigen::Index dim = Eigen::Index(1) << qubits;
    const Eigen::Index control_mask = Eigen::Index(1) << (qubits - 1 - control);
    const Eigen::Index target_mask = Eigen::Index(1) << (qubits - 1 - target);

    Matrix gate = Matrix::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const Eigen::Index j = (i & control_mask) ? (i ^ target_mask) : i;
        gate(j, i) = 1.0;
    }
    return gate;
}

} // namespace quditml
