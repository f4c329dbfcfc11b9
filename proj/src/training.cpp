#include "quditml/training.hpp"

#include "quditml/errors.hpp"
#include "quditml/rng.hpp"
#include "quditml/simulator.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace quditml {

double cross_entropy_loss(const RVector& probs, int label) {
    if (label < 0 || label >= probs.size()) {
        throw InvalidInput("cross_entropy_loss: label " + std::to_string(label) +
                           " out of range for " + std::to_string(probs.size()) +
                           " classes");
    }
    return -std::log(std::max(probs[label], kProbabilityClip));
}

std::string format_train_report(const TrainReport& report, const std::string& model_kind) {
    std::ostringstream out;
    out << "quditml-train-report v1\n";
    out << "model " << model_kind << "\n";
    out << "grad-mode "
        << (report.grad_mode == GradMode::Analytic ? "analytic" : "finite-difference")
        << "\n";
    out << "epochs " << report.epoch_loss.size() << "\n";
    char buf[48];
    for (std::size_t e = 0; e < report.epoch_loss.size(); ++e) {
        std::snprintf(buf, sizeof(buf), "%zu %.17g", e, report.epoch_loss[e]);
        out << buf << "\n";
    }
    std::snprintf(buf, sizeof(buf), "final %.17g", report.final_loss);
    out << buf << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Layered qudit circuit: loss and exact coefficient gradient
// ---------------------------------------------------------------------------

namespace {

// Loss and d(loss)/d(c_{l,j}) for the circuit exp(-i Sum_j c_{L,j} g_j) ...
// exp(-i Sum_j c_{1,j} g_j)|0> under cross-entropy on the basis
// probabilities. The per-layer pullback runs through each layer's spectral
// data: with suffix row s_l and state psi_{l-1},
//   d(loss)/dc = 2 Re[ (s_l V) (K ∘ (V^dag g_j V)) (V^dag psi_{l-1}) ]
// contracted against every generator at once via M = conj(V) T V^T.
struct QuditCircuitGradient {
    double loss = 0.0;
    RVector probabilities;
    RMatrix coefficient_grad;   // layers x D
};

QuditCircuitGradient qudit_circuit_gradient(const RMatrix& coefficients, int label,
                                            const GeneratorBasis& basis) {
    const auto layers = coefficients.rows();
    const int dim = basis.dim;

    std::vector<SpectralExp> contexts;
    contexts.reserve(static_cast<std::size_t>(layers));
    std::vector<CVector> states;
    states.reserve(static_cast<std::size_t>(layers) + 1);

    CVector psi = CVector::Zero(dim);
    psi[0] = 1.0;
    states.push_back(psi);
    for (Eigen::Index l = 0; l < layers; ++l) {
        contexts.push_back(spectral_exp(assemble_hermitian(coefficients.row(l), basis)));
        psi = contexts.back().unitary * psi;
        states.push_back(psi);
    }

    QuditCircuitGradient result;
    result.probabilities = psi.cwiseAbs2();
    result.loss = cross_entropy_loss(result.probabilities, label);
    result.coefficient_grad.resize(layers, basis.size());

    const double clipped = std::max(result.probabilities[label], kProbabilityClip);
    Eigen::RowVectorXcd suffix = Eigen::RowVectorXcd::Zero(dim);
    suffix[label] = -std::conj(psi[label]) / clipped;

    for (Eigen::Index l = layers - 1; l >= 0; --l) {
        const SpectralExp& ctx = contexts[static_cast<std::size_t>(l)];
        const Eigen::RowVectorXcd a = suffix * ctx.eigenvectors;
        const CVector b = ctx.eigenvectors.adjoint() * states[static_cast<std::size_t>(l)];
        const Matrix t = (a.transpose() * b.transpose()).cwiseProduct(ctx.kernel);
        const Matrix m = ctx.eigenvectors.conjugate() * t * ctx.eigenvectors.transpose();
        for (int j = 0; j < basis.size(); ++j) {
            const Complex value =
                basis.generators[static_cast<std::size_t>(j)].cwiseProduct(m).sum();
            result.coefficient_grad(l, j) = 2.0 * value.real();
        }
        suffix = suffix * ctx.unitary;
    }
    return result;
}

RMatrix layer_coefficients(const RVector& x_effective, const QuditVqcParams& params) {
    RMatrix coefficients(params.layers(), params.latent_dim());
    for (int l = 0; l < params.layers(); ++l) {
        coefficients.row(l) =
            params.weights.row(l).cwiseProduct(x_effective.transpose());
    }
    return coefficients;
}

RMatrix analytic_vqc_gradient(const RVector& x_effective, const QuditVqcParams& params,
                              int label, const GeneratorBasis& basis) {
    const QuditCircuitGradient circuit =
        qudit_circuit_gradient(layer_coefficients(x_effective, params), label, basis);
    RMatrix grad(params.layers(), params.latent_dim());
    for (int l = 0; l < params.layers(); ++l) {
        grad.row(l) =
            circuit.coefficient_grad.row(l).cwiseProduct(x_effective.transpose());
    }
    return grad;
}

RMatrix fd_vqc_gradient(const RVector& x_effective, const QuditVqcParams& params,
                        int label, const GeneratorBasis& basis) {
    QuditVqcParams probe = params;
    const auto loss = [&](const RVector& flat) {
        probe.weights = Eigen::Map<const RMatrix>(flat.data(), params.weights.rows(),
                                                  params.weights.cols());
        return cross_entropy_loss(qudit_vqc_forward(x_effective, probe, basis), label);
    };
    const RVector flat =
        Eigen::Map<const RVector>(params.weights.data(), params.weights.size());
    const RVector grad = finite_difference_gradient(loss, flat);
    return Eigen::Map<const RMatrix>(grad.data(), params.weights.rows(),
                                     params.weights.cols());
}

} // namespace

RMatrix vqc_gradient(const RVector& x, const QuditVqcParams& params, int label,
                     const GeneratorBasis& basis, GradMode mode) {
    if (x.size() != basis.size()) {
        throw ShapeError("vqc_gradient: feature length must equal basis size");
    }
    return mode == GradMode::Analytic ? analytic_vqc_gradient(x, params, label, basis)
                                      : fd_vqc_gradient(x, params, label, basis);
}

RMatrix raw_vqc_gradient(const RVector& x, const QuditVqcParams& params, int label,
                         const GeneratorBasis& basis, GradMode mode) {
    if (x.size() != 5) {
        throw ShapeError("raw_vqc_gradient: expected 5 features");
    }
    const RVector x_effective = extend_with_unity(x, basis.size());
    return mode == GradMode::Analytic
               ? analytic_vqc_gradient(x_effective, params, label, basis)
               : fd_vqc_gradient(x_effective, params, label, basis);
}

// ---------------------------------------------------------------------------
// Qubit circuit gradient
// ---------------------------------------------------------------------------

namespace {

RVector qubit_probability_cotangent(const RVector& probs16, const QubitVqcParams& params,
                                    int label) {
    RVector w = RVector::Zero(16);
    if (params.readout == QubitReadout::GroupedTail) {
        if (label < 8) {
            w[label] = -1.0 / std::max(probs16[label], kProbabilityClip);
        } else {
            const double tail = std::max(probs16.tail(8).sum(), kProbabilityClip);
            w.tail(8).setConstant(-1.0 / tail);
        }
    } else {
        const double mass = std::max(probs16.head(kNumClasses).sum(), kProbabilityClip);
        w.head(kNumClasses).setConstant(1.0 / mass);
        w[label] -= 1.0 / std::max(probs16[label], kProbabilityClip);
    }
    return w;
}

RMatrix analytic_qubit_gradient(const RVector& x, const QubitVqcParams& params,
                                int label) {
    const int layers = params.layers();
    std::vector<std::array<SpectralExp, kQubitRegister>> contexts(
        static_cast<std::size_t>(layers));
    std::vector<std::array<Matrix, kQubitRegister>> gates(
        static_cast<std::size_t>(layers));
    std::vector<Matrix> layer_unitaries(static_cast<std::size_t>(layers));
    std::vector<CVector> states;
    states.reserve(static_cast<std::size_t>(layers) + 1);

    CVector psi = CVector::Zero(16);
    psi[0] = 1.0;
    states.push_back(psi);
    for (int l = 0; l < layers; ++l) {
        const auto ul = static_cast<std::size_t>(l);
        for (int k = 0; k < kQubitRegister; ++k) {
            const RVector c = x.segment(3 * k, 3).cwiseProduct(
                params.weights.row(l).segment(3 * k, 3).transpose());
            contexts[ul][static_cast<std::size_t>(k)] =
                spectral_exp(assemble_hermitian(c, pauli_basis()));
            gates[ul][static_cast<std::size_t>(k)] =
                contexts[ul][static_cast<std::size_t>(k)].unitary;
        }
        layer_unitaries[ul] = cnot_cascade() * qubit_register_product(gates[ul]);
        psi = layer_unitaries[ul] * psi;
        states.push_back(psi);
    }

    const RVector probs16 = psi.cwiseAbs2();
    const RVector w = qubit_probability_cotangent(probs16, params, label);
    Eigen::RowVectorXcd suffix = (w.cast<Complex>().cwiseProduct(psi.conjugate())).transpose();

    RMatrix grad(layers, kQubitFeatures);
    for (int l = layers - 1; l >= 0; --l) {
        const auto ul = static_cast<std::size_t>(l);
        const Eigen::RowVectorXcd after_cascade = suffix * cnot_cascade();
        for (int k = 0; k < kQubitRegister; ++k) {
            for (int i = 0; i < 3; ++i) {
                const Matrix direction =
                    x[3 * k + i] *
                    pauli_basis().generators[static_cast<std::size_t>(i)];
                std::array<Matrix, kQubitRegister> factors = gates[ul];
                factors[static_cast<std::size_t>(k)] = exp_derivative_with(
                    contexts[ul][static_cast<std::size_t>(k)], direction);
                const Complex value =
                    after_cascade * (qubit_register_product(factors) * states[ul]);
                grad(l, 3 * k + i) = 2.0 * value.real();
            }
        }
        suffix = suffix * layer_unitaries[ul];
    }
    return grad;
}

} // namespace

RMatrix qubit_vqc_gradient(const RVector& x, const QubitVqcParams& params, int label,
                           GradMode mode) {
    if (x.size() != kQubitFeatures) {
        throw ShapeError("qubit_vqc_gradient: expected 12 features");
    }
    if (mode == GradMode::Analytic) {
        return analytic_qubit_gradient(x, params, label);
    }
    QubitVqcParams probe = params;
    const auto loss = [&](const RVector& flat) {
        probe.weights = Eigen::Map<const RMatrix>(flat.data(), params.weights.rows(),
                                                  params.weights.cols());
        return cross_entropy_loss(qubit_vqc_forward(x, probe), label);
    };
    const RVector flat =
        Eigen::Map<const RVector>(params.weights.data(), params.weights.size());
    const RVector grad = finite_difference_gradient(loss, flat);
    return Eigen::Map<const RMatrix>(grad.data(), params.weights.rows(),
                                     params.weights.cols());
}

// ---------------------------------------------------------------------------
// QAE gradient
// ---------------------------------------------------------------------------

namespace {

// Mean reconstruction MSE over the batch together with its gradient.
double qae_batch_gradient(const RMatrix& batch, const QaeParams& params,
                          const GeneratorBasis& basis, QaeGradient& grad) {
    const Eigen::Index samples = batch.rows();
    const Eigen::Index d = basis.dim;
    grad.encoder = RMatrix::Zero(params.encoder.rows(), params.encoder.cols());
    grad.decoder = RMatrix::Zero(params.decoder.rows(), params.decoder.cols());

    double total_loss = 0.0;
    for (Eigen::Index i = 0; i < samples; ++i) {
        const RVector x = batch.row(i);
        const RVector chi = qae_encode(x, params);
        const SpectralExp ctx = spectral_exp(assemble_hermitian(chi, basis));
        const CVector psi = ctx.unitary.col(0);

        RVector split(2 * d);
        split.head(d) = psi.real();
        split.tail(d) = psi.imag();
        const RVector reconstructed = (split.transpose() * params.decoder).transpose();
        const RVector residual = reconstructed - x;
        total_loss += residual.squaredNorm();

        grad.decoder += 2.0 * split * residual.transpose();
        const RVector dsplit = 2.0 * params.decoder * residual;
        const CVector gamma =
            dsplit.head(d).cast<Complex>() - Complex(0.0, 1.0) * dsplit.tail(d).cast<Complex>();

        // d(loss)/d(chi_j) via the same spectral contraction as the circuit.
        const Eigen::RowVectorXcd a = gamma.transpose() * ctx.eigenvectors;
        const CVector b = ctx.eigenvectors.adjoint().col(0);
        const Matrix t = (a.transpose() * b.transpose()).cwiseProduct(ctx.kernel);
        const Matrix m = ctx.eigenvectors.conjugate() * t * ctx.eigenvectors.transpose();
        RVector dchi(basis.size());
        for (int j = 0; j < basis.size(); ++j) {
            dchi[j] =
                basis.generators[static_cast<std::size_t>(j)].cwiseProduct(m).sum().real();
        }
        grad.encoder += x * dchi.transpose();
    }
    grad.encoder /= static_cast<double>(samples);
    grad.decoder /= static_cast<double>(samples);
    return total_loss / static_cast<double>(samples);
}

} // namespace

QaeGradient qae_gradient(const RMatrix& batch, const QaeParams& params,
                         const GeneratorBasis& basis) {
    if (batch.rows() < 1) {
        throw InvalidInput("qae_gradient: empty batch");
    }
    if (batch.cols() != params.encoder.rows()) {
        throw ShapeError("qae_gradient: batch has " + std::to_string(batch.cols()) +
                         " features, encoder expects " +
                         std::to_string(params.encoder.rows()));
    }
    QaeGradient grad;
    qae_batch_gradient(batch, params, basis, grad);
    return grad;
}

// ---------------------------------------------------------------------------
// Batched QAE gradient
// ---------------------------------------------------------------------------

namespace {

// Forward pass through a bias-free linear chain with cached activations.
std::vector<RVector> chain_forward(const RVector& x, const std::vector<RMatrix>& chain) {
    std::vector<RVector> activations;
    activations.reserve(chain.size() + 1);
    activations.push_back(x);
    for (const RMatrix& w : chain) {
        activations.push_back((activations.back().transpose() * w).transpose());
    }
    return activations;
}

// Backprop through the chain; returns d(loss)/d(input) and accumulates
// weight gradients.
RVector chain_backward(const std::vector<RVector>& activations,
                       const std::vector<RMatrix>& chain, RVector delta,
                       std::vector<RMatrix>& grad) {
    for (std::size_t i = chain.size(); i-- > 0;) {
        grad[i] += activations[i] * delta.transpose();
        delta = chain[i] * delta;
    }
    return delta;
}

double batched_qae_batch_gradient(const RMatrix& batch, const BatchedQaeParams& params,
                                  BatchedQaeGradient& grad) {
    const Eigen::Index samples = batch.rows();
    for (int k = 0; k < kQubitRegister; ++k) {
        const auto& block = params.encoder_blocks[static_cast<std::size_t>(k)];
        auto& gblock = grad.encoder_blocks[static_cast<std::size_t>(k)];
        gblock.clear();
        for (const RMatrix& w : block) gblock.push_back(RMatrix::Zero(w.rows(), w.cols()));
    }
    grad.decoder.clear();
    for (const RMatrix& w : params.decoder) {
        grad.decoder.push_back(RMatrix::Zero(w.rows(), w.cols()));
    }

    double total_loss = 0.0;
    for (Eigen::Index i = 0; i < samples; ++i) {
        const RVector x = batch.row(i);

        std::array<std::vector<RVector>, kQubitRegister> encoder_acts;
        std::array<SpectralExp, kQubitRegister> contexts;
        RVector split(4 * kQubitRegister);
        for (int k = 0; k < kQubitRegister; ++k) {
            const auto uk = static_cast<std::size_t>(k);
            encoder_acts[uk] = chain_forward(x, params.encoder_blocks[uk]);
            contexts[uk] =
                spectral_exp(assemble_hermitian(encoder_acts[uk].back(), pauli_basis()));
            const CVector amps = contexts[uk].unitary.col(0);
            split.segment(4 * k, 2) = amps.real();
            split.segment(4 * k + 2, 2) = amps.imag();
        }
        const std::vector<RVector> decoder_acts = chain_forward(split, params.decoder);
        const RVector residual = decoder_acts.back() - x;
        total_loss += residual.squaredNorm();

        const RVector dsplit =
            chain_backward(decoder_acts, params.decoder, 2.0 * residual, grad.decoder);

        for (int k = 0; k < kQubitRegister; ++k) {
            const auto uk = static_cast<std::size_t>(k);
            const CVector gamma =
                dsplit.segment(4 * k, 2).cast<Complex>() -
                Complex(0.0, 1.0) * dsplit.segment(4 * k + 2, 2).cast<Complex>();
            const Eigen::RowVectorXcd a = gamma.transpose() * contexts[uk].eigenvectors;
            const CVector b = contexts[uk].eigenvectors.adjoint().col(0);
            const Matrix t = (a.transpose() * b.transpose()).cwiseProduct(contexts[uk].kernel);
            const Matrix m =
                contexts[uk].eigenvectors.conjugate() * t * contexts[uk].eigenvectors.transpose();
            RVector dchi(3);
            for (int j = 0; j < 3; ++j) {
                dchi[j] = pauli_basis()
                              .generators[static_cast<std::size_t>(j)]
                              .cwiseProduct(m)
                              .sum()
                              .real();
            }
            chain_backward(encoder_acts[uk], params.encoder_blocks[uk], dchi,
                           grad.encoder_blocks[uk]);
        }
    }

    const double scale = 1.0 / static_cast<double>(samples);
    for (auto& block : grad.encoder_blocks) {
        for (RMatrix& w : block) w *= scale;
    }
    for (RMatrix& w : grad.decoder) w *= scale;
    return total_loss * scale;
}

} // namespace

BatchedQaeGradient batched_qae_gradient(const RMatrix& batch,
                                        const BatchedQaeParams& params) {
    if (batch.rows() < 1) {
        throw InvalidInput("batched_qae_gradient: empty batch");
    }
    BatchedQaeGradient grad;
    batched_qae_batch_gradient(batch, params, grad);
    return grad;
}

// ---------------------------------------------------------------------------
// Dense NN gradient
// ---------------------------------------------------------------------------

namespace {

double dense_nn_sample_gradient(const RVector& x, const DenseNnParams& params, int label,
                                std::vector<RMatrix>& grad) {
    const std::size_t depth = params.weights.size();
    std::vector<RVector> activations;
    activations.reserve(depth + 1);
    activations.push_back(x);
    std::vector<RVector> pre_activations;
    pre_activations.reserve(depth);
    for (std::size_t i = 0; i < depth; ++i) {
        pre_activations.push_back(
            (activations.back().transpose() * params.weights[i]).transpose());
        activations.push_back(i + 1 < depth ? pre_activations.back().cwiseMax(0.0)
                                            : pre_activations.back());
    }
    const RVector probs = softmax(pre_activations.back());
    const double loss = cross_entropy_loss(probs, label);

    RVector delta = probs;
    delta[label] -= 1.0;
    for (std::size_t i = depth; i-- > 0;) {
        grad[i] += activations[i] * delta.transpose();
        if (i > 0) {
            delta = params.weights[i] * delta;
            for (Eigen::Index j = 0; j < delta.size(); ++j) {
                if (pre_activations[i - 1][j] <= 0.0) delta[j] = 0.0;
            }
        }
    }
    return loss;
}

} // namespace

std::vector<RMatrix> dense_nn_gradient(const RVector& x, const DenseNnParams& params,
                                       int label) {
    std::vector<RMatrix> grad;
    for (const RMatrix& w : params.weights) {
        grad.push_back(RMatrix::Zero(w.rows(), w.cols()));
    }
    dense_nn_sample_gradient(x, params, label, grad);
    return grad;
}

// ---------------------------------------------------------------------------
// Adam
// ---------------------------------------------------------------------------

Adam::Adam(Eigen::Index size, const TrainConfig& config)
    : lr_(config.learning_rate),
      beta1_(config.adam_beta1),
      beta2_(config.adam_beta2),
      epsilon_(config.adam_epsilon),
      m_(RVector::Zero(size)),
      v_(RVector::Zero(size)) {}

void Adam::step(Eigen::Ref<RVector> params, const RVector& grad) {
    ++t_;
    m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
    v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseProduct(grad);
    const double m_scale = 1.0 / (1.0 - std::pow(beta1_, static_cast<double>(t_)));
    const double v_scale = 1.0 / (1.0 - std::pow(beta2_, static_cast<double>(t_)));
    params -= lr_ * (m_scale * m_).cwiseQuotient(
                        ((v_scale * v_).cwiseSqrt().array() + epsilon_).matrix());
}

// ---------------------------------------------------------------------------
// Minibatch driver
// ---------------------------------------------------------------------------

namespace {

void validate_config(const TrainConfig& config) {
    if (config.learning_rate < 0.0) {
        throw InvalidInput("TrainConfig: learning rate must be >= 0");
    }
    if (config.batch_size < 1) {
        throw InvalidInput("TrainConfig: batch size must be >= 1");
    }
    if (config.epochs < 0) {
        throw InvalidInput("TrainConfig: epochs must be >= 0");
    }
}

// BatchGrad: (indices, flat params, flat grad out) -> loss summed over the
// batch, gradient averaged over the batch. Reduction order follows the
// shuffled index order, so runs are bit-reproducible per seed.
template <class BatchGrad>
TrainReport run_minibatch_adam(RVector& params, Eigen::Index n_samples,
                               const TrainConfig& config, BatchGrad&& batch_grad) {
    validate_config(config);
    const auto start = std::chrono::steady_clock::now();

    TrainReport report;
    report.grad_mode = config.grad_mode;

    Adam adam(params.size(), config);
    Rng shuffle_rng(Rng::derive(config.seed, 1));
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n_samples));
    std::iota(order.begin(), order.end(), 0);

    RVector grad(params.size());
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double loss_sum = 0.0;
        for (std::size_t begin = 0; begin < order.size();
             begin += static_cast<std::size_t>(config.batch_size)) {
            const std::size_t end =
                std::min(begin + static_cast<std::size_t>(config.batch_size), order.size());
            const std::vector<Eigen::Index> batch(order.begin() + static_cast<long>(begin),
                                                  order.begin() + static_cast<long>(end));
            grad.setZero();
            loss_sum += batch_grad(batch, params, grad);
            adam.step(params, grad);
        }
        const double epoch_loss = loss_sum / static_cast<double>(n_samples);
        if (!std::isfinite(epoch_loss)) {
            throw NumericalError("training loss became non-finite at epoch " +
                                     std::to_string(epoch),
                                 epoch);
        }
        report.epoch_loss.push_back(epoch_loss);
    }

    if (!report.epoch_loss.empty()) {
        report.final_loss = report.epoch_loss.back();
    } else {
        std::vector<Eigen::Index> all(static_cast<std::size_t>(n_samples));
        std::iota(all.begin(), all.end(), 0);
        grad.setZero();
        report.final_loss = batch_grad(all, params, grad) / static_cast<double>(n_samples);
    }
    report.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

RMatrix rows_of(const RMatrix& features, const std::vector<Eigen::Index>& indices) {
    RMatrix batch(static_cast<Eigen::Index>(indices.size()), features.cols());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        batch.row(static_cast<Eigen::Index>(i)) = features.row(indices[i]);
    }
    return batch;
}

void check_labels(const std::vector<int>& labels, Eigen::Index n_samples) {
    if (static_cast<Eigen::Index>(labels.size()) != n_samples) {
        throw ShapeError("training: feature/label count mismatch");
    }
    for (int label : labels) {
        if (label < 0 || label >= kNumClasses) {
            throw InvalidInput("training: label " + std::to_string(label) +
                               " outside 0..8");
        }
    }
}

} // namespace

// ---------------------------------------------------------------------------
// train_qae
// ---------------------------------------------------------------------------

QaeTraining train_qae(const RMatrix& features, int latent_dim, int qudit_dim,
                      const GeneratorBasis& basis, const TrainConfig& config) {
    if (features.rows() < 1) {
        throw InvalidInput("train_qae: empty dataset");
    }
    if (latent_dim != basis.size() || qudit_dim != basis.dim) {
        throw ShapeError("train_qae: latent/qudit dimensions disagree with the basis");
    }
    Rng init_rng(Rng::derive(config.seed, 0));
    QaeParams params = QaeParams::random_init(static_cast<int>(features.cols()),
                                              latent_dim, qudit_dim, config.init_scale,
                                              init_rng);

    const Eigen::Index enc_size = params.encoder.size();
    RVector flat(enc_size + params.decoder.size());
    flat << Eigen::Map<const RVector>(params.encoder.data(), enc_size),
        Eigen::Map<const RVector>(params.decoder.data(), params.decoder.size());

    QaeGradient grad_buffer;
    const auto batch_grad = [&](const std::vector<Eigen::Index>& indices,
                                const RVector& p, RVector& grad) {
        params.encoder = Eigen::Map<const RMatrix>(p.data(), params.encoder.rows(),
                                                   params.encoder.cols());
        params.decoder = Eigen::Map<const RMatrix>(p.data() + enc_size,
                                                   params.decoder.rows(),
                                                   params.decoder.cols());
        const RMatrix batch = rows_of(features, indices);
        const double mean_loss = qae_batch_gradient(batch, params, basis, grad_buffer);
        grad.head(enc_size) =
            Eigen::Map<const RVector>(grad_buffer.encoder.data(), enc_size);
        grad.tail(params.decoder.size()) = Eigen::Map<const RVector>(
            grad_buffer.decoder.data(), params.decoder.size());
        return mean_loss * static_cast<double>(indices.size());
    };

    QaeTraining result;
    result.report = run_minibatch_adam(flat, features.rows(), config, batch_grad);
    params.encoder = Eigen::Map<const RMatrix>(flat.data(), params.encoder.rows(),
                                               params.encoder.cols());
    params.decoder = Eigen::Map<const RMatrix>(flat.data() + enc_size,
                                               params.decoder.rows(),
                                               params.decoder.cols());
    result.params = std::move(params);
    return result;
}

// ---------------------------------------------------------------------------
// train_qudit_vqc
// ---------------------------------------------------------------------------

QuditVqcTraining train_qudit_vqc(const RMatrix& features, const std::vector<int>& labels,
                                 int layers, const GeneratorBasis& basis,
                                 const TrainConfig& config, bool raw_features) {
    if (features.rows() < 1) {
        throw InvalidInput("train_qudit_vqc: empty dataset");
    }
    check_labels(labels, features.rows());
    const Eigen::Index expected_cols = raw_features ? 5 : basis.size();
    if (features.cols() != expected_cols) {
        throw ShapeError("train_qudit_vqc: expected " + std::to_string(expected_cols) +
                         " feature columns, got " + std::to_string(features.cols()));
    }

    Rng init_rng(Rng::derive(config.seed, 0));
    QuditVqcParams params =
        QuditVqcParams::random_init(basis.dim, layers, config.init_scale, init_rng);

    RVector flat = Eigen::Map<const RVector>(params.weights.data(), params.weights.size());
    const auto batch_grad = [&](const std::vector<Eigen::Index>& indices,
                                const RVector& p, RVector& grad) {
        params.weights =
            Eigen::Map<const RMatrix>(p.data(), params.weights.rows(),
                                      params.weights.cols());
        double loss_sum = 0.0;
        RMatrix grad_sum = RMatrix::Zero(params.weights.rows(), params.weights.cols());
        for (Eigen::Index idx : indices) {
            const RVector x = features.row(idx);
            const RVector x_effective =
                raw_features ? extend_with_unity(x, basis.size()) : x;
            const int label = labels[static_cast<std::size_t>(idx)];
            if (config.grad_mode == GradMode::Analytic) {
                const QuditCircuitGradient circuit = qudit_circuit_gradient(
                    layer_coefficients(x_effective, params), label, basis);
                loss_sum += circuit.loss;
                for (int l = 0; l < params.layers(); ++l) {
                    grad_sum.row(l) += circuit.coefficient_grad.row(l).cwiseProduct(
                        x_effective.transpose());
                }
            } else {
                loss_sum += cross_entropy_loss(
                    qudit_vqc_forward(x_effective, params, basis), label);
                grad_sum += fd_vqc_gradient(x_effective, params, label, basis);
            }
        }
        grad_sum /= static_cast<double>(indices.size());
        grad = Eigen::Map<const RVector>(grad_sum.data(), grad_sum.size());
        return loss_sum;
    };

    QuditVqcTraining result;
    result.report = run_minibatch_adam(flat, features.rows(), config, batch_grad);
    params.weights =
        Eigen::Map<const RMatrix>(flat.data(), params.weights.rows(), params.weights.cols());
    result.params = std::move(params);
    return result;
}

// ---------------------------------------------------------------------------
// train_qubit_vqc
// ---------------------------------------------------------------------------

QubitVqcTraining train_qubit_vqc(const RMatrix& features, const std::vector<int>& labels,
                                 int layers, QubitReadout readout,
                                 const TrainConfig& config) {
    if (features.rows() < 1) {
        throw InvalidInput("train_qubit_vqc: empty dataset");
    }
    check_labels(labels, features.rows());
    if (features.cols() != kQubitFeatures) {
        throw ShapeError("train_qubit_vqc: expected 12 feature columns");
    }

    Rng init_rng(Rng::derive(config.seed, 0));
    QubitVqcParams params = QubitVqcParams::random_init(layers, config.init_scale, init_rng);
    params.readout = readout;

    RVector flat = Eigen::Map<const RVector>(params.weights.data(), params.weights.size());
    const auto batch_grad = [&](const std::vector<Eigen::Index>& indices,
                                const RVector& p, RVector& grad) {
        params.weights = Eigen::Map<const RMatrix>(p.data(), params.weights.rows(),
                                                   params.weights.cols());
        double loss_sum = 0.0;
        RMatrix grad_sum = RMatrix::Zero(params.weights.rows(), params.weights.cols());
        for (Eigen::Index idx : indices) {
            const RVector x = features.row(idx);
            const int label = labels[static_cast<std::size_t>(idx)];
            loss_sum += cross_entropy_loss(qubit_vqc_forward(x, params), label);
            grad_sum += qubit_vqc_gradient(x, params, label, config.grad_mode);
        }
        grad_sum /= static_cast<double>(indices.size());
        grad = Eigen::Map<const RVector>(grad_sum.data(), grad_sum.size());
        return loss_sum;
    };

    QubitVqcTraining result;
    result.report = run_minibatch_adam(flat, features.rows(), config, batch_grad);
    params.weights =
        Eigen::Map<const RMatrix>(flat.data(), params.weights.rows(), params.weights.cols());
    result.params = std::move(params);
    return result;
}

// ---------------------------------------------------------------------------
// train_batched_qae
// ---------------------------------------------------------------------------

namespace {

Eigen::Index batched_qae_flat_size(const BatchedQaeParams& params) {
    Eigen::Index size = 0;
    for (const auto& block : params.encoder_blocks) {
        for (const RMatrix& w : block) size += w.size();
    }
    for (const RMatrix& w : params.decoder) size += w.size();
    return size;
}

void batched_qae_pack(const BatchedQaeParams& params, RVector& flat) {
    Eigen::Index offset = 0;
    for (const auto& block : params.encoder_blocks) {
        for (const RMatrix& w : block) {
            flat.segment(offset, w.size()) = Eigen::Map<const RVector>(w.data(), w.size());
            offset += w.size();
        }
    }
    for (const RMatrix& w : params.decoder) {
        flat.segment(offset, w.size()) = Eigen::Map<const RVector>(w.data(), w.size());
        offset += w.size();
    }
}

void batched_qae_unpack(const RVector& flat, BatchedQaeParams& params) {
    Eigen::Index offset = 0;
    for (auto& block : params.encoder_blocks) {
        for (RMatrix& w : block) {
            w = Eigen::Map<const RMatrix>(flat.data() + offset, w.rows(), w.cols());
            offset += w.size();
        }
    }
    for (RMatrix& w : params.decoder) {
        w = Eigen::Map<const RMatrix>(flat.data() + offset, w.rows(), w.cols());
        offset += w.size();
    }
}

void batched_qae_pack_grad(const BatchedQaeGradient& grad, RVector& flat) {
    Eigen::Index offset = 0;
    for (const auto& block : grad.encoder_blocks) {
        for (const RMatrix& w : block) {
            flat.segment(offset, w.size()) = Eigen::Map<const RVector>(w.data(), w.size());
            offset += w.size();
        }
    }
    for (const RMatrix& w : grad.decoder) {
        flat.segment(offset, w.size()) = Eigen::Map<const RVector>(w.data(), w.size());
        offset += w.size();
    }
}

} // namespace

BatchedQaeTraining train_batched_qae(const RMatrix& features,
                                     const std::vector<int>& encoder_hidden,
                                     const std::vector<int>& decoder_hidden,
                                     const TrainConfig& config) {
    if (features.rows() < 1) {
        throw InvalidInput("train_batched_qae: empty dataset");
    }
    Rng init_rng(Rng::derive(config.seed, 0));
    BatchedQaeParams params =
        BatchedQaeParams::random_init(static_cast<int>(features.cols()), encoder_hidden,
                                      decoder_hidden, config.init_scale, init_rng);

    RVector flat(batched_qae_flat_size(params));
    batched_qae_pack(params, flat);

    BatchedQaeGradient grad_buffer;
    const auto batch_grad = [&](const std::vector<Eigen::Index>& indices,
                                const RVector& p, RVector& grad) {
        batched_qae_unpack(p, params);
        const RMatrix batch = rows_of(features, indices);
        const double mean_loss = batched_qae_batch_gradient(batch, params, grad_buffer);
        batched_qae_pack_grad(grad_buffer, grad);
        return mean_loss * static_cast<double>(indices.size());
    };

    BatchedQaeTraining result;
    result.report = run_minibatch_adam(flat, features.rows(), config, batch_grad);
    batched_qae_unpack(flat, params);
    result.params = std::move(params);
    return result;
}

// ---------------------------------------------------------------------------
// train_dense_nn
// ---------------------------------------------------------------------------

namespace {

Eigen::Index nn_flat_size(const DenseNnParams& params) {
    Eigen::Index size = 0;
    for (const RMatrix& w : params.weights) size += w.size();
    return size;
}

void nn_unpack(const RVector& flat, DenseNnParams& params) {
    Eigen::Index offset = 0;
    for (RMatrix& w : params.weights) {
        w = Eigen::Map<const RMatrix>(flat.data() + offset, w.rows(), w.cols());
        offset += w.size();
    }
}

} // namespace

DenseNnTraining train_dense_nn(const RMatrix& features, const std::vector<int>& labels,
                               const std::vector<int>& hidden, const TrainConfig& config) {
    if (features.rows() < 1) {
        throw InvalidInput("train_dense_nn: empty dataset");
    }
    check_labels(labels, features.rows());

    Rng init_rng(Rng::derive(config.seed, 0));
    DenseNnParams params =
        DenseNnParams::random_init(static_cast<int>(features.cols()), hidden, kNumClasses,
                                   config.init_scale, init_rng);

    RVector flat(nn_flat_size(params));
    Eigen::Index offset = 0;
    for (const RMatrix& w : params.weights) {
        flat.segment(offset, w.size()) = Eigen::Map<const RVector>(w.data(), w.size());
        offset += w.size();
    }

    std::vector<RMatrix> grad_buffer;
    for (const RMatrix& w : params.weights) {
        grad_buffer.push_back(RMatrix::Zero(w.rows(), w.cols()));
    }

    const auto batch_grad = [&](const std::vector<Eigen::Index>& indices,
                                const RVector& p, RVector& grad) {
        nn_unpack(p, params);
        for (RMatrix& g : grad_buffer) g.setZero();
        double loss_sum = 0.0;
        for (Eigen::Index idx : indices) {
            loss_sum += dense_nn_sample_gradient(
                features.row(idx), params, labels[static_cast<std::size_t>(idx)],
                grad_buffer);
        }
        Eigen::Index out = 0;
        const double scale = 1.0 / static_cast<double>(indices.size());
        for (const RMatrix& g : grad_buffer) {
            grad.segment(out, g.size()) = scale * Eigen::Map<const RVector>(g.data(), g.size());
            out += g.size();
        }
        return loss_sum;
    };

    DenseNnTraining result;
    result.report = run_minibatch_adam(flat, features.rows(), config, batch_grad);
    nn_unpack(flat, params);
    result.params = std::move(params);
    return result;
}

// ---------------------------------------------------------------------------
// finetune_qae_qudit
// ---------------------------------------------------------------------------

QaeQuditJointTraining finetune_qae_qudit(const RMatrix& features,
                                         const std::vector<int>& labels, QaeParams qae,
                                         QuditVqcParams vqc, const GeneratorBasis& basis,
                                         const TrainConfig& config) {
    if (features.rows() < 1) {
        throw InvalidInput("finetune_qae_qudit: empty dataset");
    }
    check_labels(labels, features.rows());
    if (features.cols() != qae.encoder.rows()) {
        throw ShapeError("finetune_qae_qudit: feature/encoder shape mismatch");
    }

    const Eigen::Index enc_size = qae.encoder.size();
    RVector flat(enc_size + vqc.weights.size());
    flat << Eigen::Map<const RVector>(qae.encoder.data(), enc_size),
        Eigen::Map<const RVector>(vqc.weights.data(), vqc.weights.size());

    const auto batch_grad = [&](const std::vector<Eigen::Index>& indices,
                                const RVector& p, RVector& grad) {
        qae.encoder =
            Eigen::Map<const RMatrix>(p.data(), qae.encoder.rows(), qae.encoder.cols());
        vqc.weights = Eigen::Map<const RMatrix>(p.data() + enc_size, vqc.weights.rows(),
                                                vqc.weights.cols());
        double loss_sum = 0.0;
        RMatrix enc_grad = RMatrix::Zero(qae.encoder.rows(), qae.encoder.cols());
        RMatrix phi_grad = RMatrix::Zero(vqc.weights.rows(), vqc.weights.cols());
        for (Eigen::Index idx : indices) {
            const RVector x = features.row(idx);
            const RVector chi = qae_encode(x, qae);
            const int label = labels[static_cast<std::size_t>(idx)];
            const QuditCircuitGradient circuit =
                qudit_circuit_gradient(layer_coefficients(chi, vqc), label, basis);
            loss_sum += circuit.loss;
            RVector dchi = RVector::Zero(chi.size());
            for (int l = 0; l < vqc.layers(); ++l) {
                phi_grad.row(l) +=
                    circuit.coefficient_grad.row(l).cwiseProduct(chi.transpose());
                dchi += circuit.coefficient_grad.row(l)
                            .cwiseProduct(vqc.weights.row(l))
                            .transpose();
            }
            enc_grad += x * dchi.transpose();
        }
        const double scale = 1.0 / static_cast<double>(indices.size());
        grad.head(enc_size) =
            scale * Eigen::Map<const RVector>(enc_grad.data(), enc_grad.size());
        grad.tail(phi_grad.size()) =
            scale * Eigen::Map<const RVector>(phi_grad.data(), phi_grad.size());
        return loss_sum;
    };

    QaeQuditJointTraining result;
    result.report = run_minibatch_adam(flat, features.rows(), config, batch_grad);
    qae.encoder = Eigen::Map<const RMatrix>(flat.data(), qae.encoder.rows(),
                                            qae.encoder.cols());
    vqc.weights = Eigen::Map<const RMatrix>(flat.data() + enc_size, vqc.weights.rows(),
                                            vqc.weights.cols());
    result.qae = std::move(qae);
    result.vqc = std::move(vqc);
    return result;
}

} // namespace quditml
