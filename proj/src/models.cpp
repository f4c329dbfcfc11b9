#include "quditml/models.hpp"

#include "quditml/errors.hpp"
#include "quditml/simulator.hpp"

#include <cmath>
#include <string>

namespace quditml {

namespace {

RMatrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, double sigma, Rng& rng) {
    RMatrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(r, c) = sigma * rng.gaussian();
        }
    }
    return m;
}

std::vector<RMatrix> gaussian_chain(int in, const std::vector<int>& hidden, int out,
                                    double sigma, Rng& rng) {
    std::vector<RMatrix> chain;
    int width = in;
    for (int h : hidden) {
        chain.push_back(gaussian_matrix(width, h, sigma, rng));
        width = h;
    }
    chain.push_back(gaussian_matrix(width, out, sigma, rng));
    return chain;
}

RVector apply_chain(const RVector& x, const std::vector<RMatrix>& chain) {
    RVector v = x;
    for (const RMatrix& w : chain) {
        if (v.size() != w.rows()) {
            throw ShapeError("linear chain: vector length " + std::to_string(v.size()) +
                             " vs matrix rows " + std::to_string(w.rows()));
        }
        v = (v.transpose() * w).transpose();
    }
    return v;
}

} // namespace

// ---------------------------------------------------------------------------
// Qudit VQC
// ---------------------------------------------------------------------------

QuditVqcParams QuditVqcParams::random_init(int dim, int layers, double sigma, Rng& rng) {
    if (dim < 2 || layers < 1) {
        throw InvalidInput("QuditVqcParams: dim >= 2 and layers >= 1 required");
    }
    QuditVqcParams params;
    params.dim = dim;
    params.weights = gaussian_matrix(layers, dim * dim - 1, sigma, rng);
    return params;
}

Matrix vqc_unit(const RVector& x, const RVector& phi_l, const GeneratorBasis& basis) {
    if (x.size() != basis.size() || phi_l.size() != basis.size()) {
        throw ShapeError("vqc_unit: feature/weight length must equal basis size " +
                         std::to_string(basis.size()));
    }
    return exp_minus_i(assemble_hermitian(x.cwiseProduct(phi_l), basis));
}

RVector extend_with_unity(const RVector& x, int total) {
    if (x.size() > total) {
        throw ShapeError("extend_with_unity: feature vector longer than target length");
    }
    RVector extended = RVector::Ones(total);
    extended.head(x.size()) = x;
    return extended;
}

Matrix raw_qudit_unit(const RVector& x, const RVector& phi_l, const GeneratorBasis& basis) {
    if (x.size() != 5) {
        throw ShapeError("raw_qudit_unit: expected 5 features, got " +
                         std::to_string(x.size()));
    }
    return vqc_unit(extend_with_unity(x, basis.size()), phi_l, basis);
}

namespace {

RVector layered_qudit_probabilities(const RVector& x_effective,
                                    const QuditVqcParams& params,
                                    const GeneratorBasis& basis) {
    if (basis.dim != params.dim) {
        throw ShapeError("qudit forward: basis dimension " + std::to_string(basis.dim) +
                         " vs model dimension " + std::to_string(params.dim));
    }
    QuantumState state = ground_state(params.dim);
    for (int l = 0; l < params.layers(); ++l) {
        state = apply_unitary(state, vqc_unit(x_effective, params.weights.row(l), basis));
    }
    return measurement_probabilities(state);
}

} // namespace

RVector qudit_vqc_forward(const RVector& x, const QuditVqcParams& params,
                          const GeneratorBasis& basis) {
    return layered_qudit_probabilities(x, params, basis);
}

RVector raw_qudit_forward(const RVector& x, const QuditVqcParams& params,
                          const GeneratorBasis& basis) {
    if (x.size() != 5) {
        throw ShapeError("raw_qudit_forward: expected 5 features, got " +
                         std::to_string(x.size()));
    }
    return layered_qudit_probabilities(extend_with_unity(x, basis.size()), params, basis);
}

// ---------------------------------------------------------------------------
// QAE
// ---------------------------------------------------------------------------

QaeParams QaeParams::random_init(int input_dim, int latent_dim, int qudit_dim,
                                 double sigma, Rng& rng) {
    if (input_dim < 1 || latent_dim < 1 || qudit_dim < 2) {
        throw InvalidInput("QaeParams: invalid dimensions");
    }
    QaeParams params;
    params.encoder = gaussian_matrix(input_dim, latent_dim, sigma, rng);
    params.decoder = gaussian_matrix(2 * qudit_dim, input_dim, sigma, rng);
    return params;
}

RVector qae_encode(const RVector& x, const QaeParams& params) {
    if (x.size() != params.encoder.rows()) {
        throw ShapeError("qae_encode: expected " + std::to_string(params.encoder.rows()) +
                         " features, got " + std::to_string(x.size()));
    }
    return (x.transpose() * params.encoder).transpose();
}

CVector quantum_bottleneck(const RVector& chi, const GeneratorBasis& basis) {
    if (chi.size() != basis.size()) {
        throw ShapeError("quantum_bottleneck: latent length " + std::to_string(chi.size()) +
                         " vs basis size " + std::to_string(basis.size()));
    }
    return spectral_exp(assemble_hermitian(chi, basis)).unitary.col(0);
}

RVector qae_decode(const CVector& amplitudes, const QaeParams& params) {
    const Eigen::Index d = params.decoder.rows() / 2;
    if (amplitudes.size() != d) {
        throw ShapeError("qae_decode: expected " + std::to_string(d) +
                         " amplitudes, got " + std::to_string(amplitudes.size()));
    }
    RVector split(2 * d);
    split.head(d) = amplitudes.real();
    split.tail(d) = amplitudes.imag();
    return (split.transpose() * params.decoder).transpose();
}

RVector qae_reconstruct(const RVector& x, const QaeParams& params,
                        const GeneratorBasis& basis) {
    return qae_decode(quantum_bottleneck(qae_encode(x, params), basis), params);
}

double qae_reconstruction_loss(const RMatrix& batch, const QaeParams& params,
                               const GeneratorBasis& basis) {
    if (batch.rows() < 1) {
        throw InvalidInput("qae_reconstruction_loss: empty batch");
    }
    double total = 0.0;
    for (Eigen::Index i = 0; i < batch.rows(); ++i) {
        const RVector x = batch.row(i);
        total += (x - qae_reconstruct(x, params, basis)).squaredNorm();
    }
    return total / static_cast<double>(batch.rows());
}

RVector qae_qudit_forward(const RVector& x, const QaeParams& qae,
                          const QuditVqcParams& vqc, const GeneratorBasis& basis) {
    return qudit_vqc_forward(qae_encode(x, qae), vqc, basis);
}

// ---------------------------------------------------------------------------
// Qubit VQC
// ---------------------------------------------------------------------------

const GeneratorBasis& pauli_basis() {
    static const GeneratorBasis basis = build_generator_basis(2);
    return basis;
}

const Matrix& cnot_cascade() {
    static const Matrix cascade = [] {
        Matrix c = cnot_gate(0, 1, kQubitRegister);
        c = cnot_gate(1, 2, kQubitRegister) * c;
        c = cnot_gate(2, 3, kQubitRegister) * c;
        return c;
    }();
    return cascade;
}

QubitVqcParams QubitVqcParams::random_init(int layers, double sigma, Rng& rng) {
    if (layers < 1) {
        throw InvalidInput("QubitVqcParams: layers >= 1 required");
    }
    QubitVqcParams params;
    params.weights = gaussian_matrix(layers, kQubitFeatures, sigma, rng);
    return params;
}

Matrix qubit_register_product(const std::array<Matrix, kQubitRegister>& gates) {
    Matrix product = gates[0];
    for (int k = 1; k < kQubitRegister; ++k) {
        const Matrix& g = gates[static_cast<std::size_t>(k)];
        Matrix next(product.rows() * 2, product.cols() * 2);
        for (Eigen::Index r = 0; r < product.rows(); ++r) {
            for (Eigen::Index c = 0; c < product.cols(); ++c) {
                next.block(2 * r, 2 * c, 2, 2) = product(r, c) * g;
            }
        }
        product = std::move(next);
    }
    return product;
}

RVector qubit_vqc_forward(const RVector& x, const QubitVqcParams& params) {
    if (x.size() != kQubitFeatures) {
        throw ShapeError("qubit_vqc_forward: expected " + std::to_string(kQubitFeatures) +
                         " features, got " + std::to_string(x.size()));
    }
    QuantumState state = ground_state(1 << kQubitRegister);
    for (int l = 0; l < params.layers(); ++l) {
        std::array<Matrix, kQubitRegister> gates;
        for (int k = 0; k < kQubitRegister; ++k) {
            const RVector features = x.segment(3 * k, 3);
            const RVector weights = params.weights.row(l).segment(3 * k, 3);
            gates[static_cast<std::size_t>(k)] = vqc_unit(features, weights, pauli_basis());
        }
        state = apply_unitary(state, cnot_cascade() * qubit_register_product(gates));
    }
    const RVector probs = measurement_probabilities(state);

    RVector classes(kNumClasses);
    if (params.readout == QubitReadout::GroupedTail) {
        classes.head(8) = probs.head(8);
        classes[8] = probs.tail(8).sum();
    } else {
        classes = probs.head(kNumClasses);
        const double mass = classes.sum();
        if (mass > 0.0) {
            classes /= mass;
        } else {
            classes.setConstant(1.0 / kNumClasses);
        }
    }
    return classes;
}

// ---------------------------------------------------------------------------
// Batched QAE
// ---------------------------------------------------------------------------

int BatchedQaeParams::parameter_count() const {
    int count = 0;
    for (const auto& block : encoder_blocks) {
        for (const RMatrix& w : block) count += static_cast<int>(w.size());
    }
    for (const RMatrix& w : decoder) count += static_cast<int>(w.size());
    return count;
}

BatchedQaeParams BatchedQaeParams::random_init(int input_dim,
                                               const std::vector<int>& encoder_hidden,
                                               const std::vector<int>& decoder_hidden,
                                               double sigma, Rng& rng) {
    if (input_dim < 1) {
        throw InvalidInput("BatchedQaeParams: input_dim >= 1 required");
    }
    BatchedQaeParams params;
    for (auto& block : params.encoder_blocks) {
        block = gaussian_chain(input_dim, encoder_hidden, 3, sigma, rng);
    }
    params.decoder = gaussian_chain(4 * kQubitRegister, decoder_hidden, input_dim,
                                    sigma, rng);
    return params;
}

RVector batched_qae_encode(const RVector& x, const BatchedQaeParams& params) {
    RVector latent(kQubitFeatures);
    for (int k = 0; k < kQubitRegister; ++k) {
        latent.segment(3 * k, 3) =
            apply_chain(x, params.encoder_blocks[static_cast<std::size_t>(k)]);
    }
    return latent;
}

RVector batched_qae_reconstruct(const RVector& x, const BatchedQaeParams& params) {
    const RVector latent = batched_qae_encode(x, params);
    RVector split(4 * kQubitRegister);
    for (int k = 0; k < kQubitRegister; ++k) {
        const CVector amps = quantum_bottleneck(latent.segment(3 * k, 3), pauli_basis());
        split.segment(4 * k, 2) = amps.real();
        split.segment(4 * k + 2, 2) = amps.imag();
    }
    return apply_chain(split, params.decoder);
}

double batched_qae_loss(const RMatrix& batch, const BatchedQaeParams& params) {
    if (batch.rows() < 1) {
        throw InvalidInput("batched_qae_loss: empty batch");
    }
    double total = 0.0;
    for (Eigen::Index i = 0; i < batch.rows(); ++i) {
        const RVector x = batch.row(i);
        total += (x - batched_qae_reconstruct(x, params)).squaredNorm();
    }
    return total / static_cast<double>(batch.rows());
}

// ---------------------------------------------------------------------------
// Dense NN
// ---------------------------------------------------------------------------

int DenseNnParams::parameter_count() const {
    int count = 0;
    for (const RMatrix& w : weights) count += static_cast<int>(w.size());
    return count;
}

DenseNnParams DenseNnParams::random_init(int input_dim, const std::vector<int>& hidden,
                                         int classes, double sigma, Rng& rng) {
    if (input_dim < 1 || classes < 2) {
        throw InvalidInput("DenseNnParams: invalid dimensions");
    }
    DenseNnParams params;
    params.weights = gaussian_chain(input_dim, hidden, classes, sigma, rng);
    return params;
}

RVector softmax(const RVector& logits) {
    const RVector shifted = logits.array() - logits.maxCoeff();
    const RVector exps = shifted.array().exp();
    return exps / exps.sum();
}

RVector dense_nn_forward(const RVector& x, const DenseNnParams& params) {
    if (x.size() != params.weights.front().rows()) {
        throw ShapeError("dense_nn_forward: expected " +
                         std::to_string(params.weights.front().rows()) +
                         " features, got " + std::to_string(x.size()));
    }
    RVector v = x;
    for (std::size_t i = 0; i < params.weights.size(); ++i) {
        v = (v.transpose() * params.weights[i]).transpose();
        if (i + 1 < params.weights.size()) {
            v = v.cwiseMax(0.0);    // ReLU on hidden activations
        }
    }
    return softmax(v);
}

} // namespace quditml
