// training.hpp — Losses, exact analytic gradients through the layered
// exponential maps (with a finite-difference mode), Adam, and the training
// loops for every model.

#pragma once

#include "quditml/models.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace quditml {

inline constexpr double kProbabilityClip = 1e-12;
inline constexpr double kFiniteDiffStep = 1e-4;

enum class GradMode { Analytic, FiniteDifference };

struct TrainConfig {
    double learning_rate = 0.01;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    int epochs = 100;
    int batch_size = 128;
    std::uint64_t seed = 0;
    GradMode grad_mode = GradMode::Analytic;
    double init_scale = 0.1;
};

struct TrainReport {
    std::vector<double> epoch_loss;     // one entry per epoch
    double final_loss = 0.0;
    double duration_seconds = 0.0;      // wall clock; kept out of serialized reports
    GradMode grad_mode = GradMode::Analytic;
};

// Serialized form: version tag, model kind, gradient mode, (epoch, loss) pairs.
std::string format_train_report(const TrainReport& report, const std::string& model_kind);

// -log(max(probs[label], 1e-12)).
double cross_entropy_loss(const RVector& probs, int label);

// ---------------------------------------------------------------------------
// Gradients
// ---------------------------------------------------------------------------

// d(cross-entropy)/d(phi) for the re-uploading qudit circuit, layers x D.
RMatrix vqc_gradient(const RVector& x, const QuditVqcParams& params, int label,
                     const GeneratorBasis& basis, GradMode mode = GradMode::Analytic);

// Same for the raw-feature circuit (x has 5 entries; the rest reset to unity).
RMatrix raw_vqc_gradient(const RVector& x, const QuditVqcParams& params, int label,
                         const GeneratorBasis& basis, GradMode mode = GradMode::Analytic);

// d(cross-entropy)/d(phi) for the qubit circuit, layers x 12.
RMatrix qubit_vqc_gradient(const RVector& x, const QubitVqcParams& params, int label,
                           GradMode mode = GradMode::Analytic);

struct QaeGradient {
    RMatrix encoder;    // K x D
    RMatrix decoder;    // 2d x K
};

// Gradient of the mean reconstruction MSE over the batch rows.
QaeGradient qae_gradient(const RMatrix& batch, const QaeParams& params,
                         const GeneratorBasis& basis);

struct BatchedQaeGradient {
    std::array<std::vector<RMatrix>, kQubitRegister> encoder_blocks;
    std::vector<RMatrix> decoder;
};

BatchedQaeGradient batched_qae_gradient(const RMatrix& batch,
                                        const BatchedQaeParams& params);

// d(cross-entropy)/d(W_i) through the ReLU layers and the softmax.
std::vector<RMatrix> dense_nn_gradient(const RVector& x, const DenseNnParams& params,
                                       int label);

// Central-difference gradient of an arbitrary scalar function of a flat
// parameter vector; the finite-difference train mode and the test oracles
// both go through this.
template <class Loss>
RVector finite_difference_gradient(Loss&& loss, RVector params,
                                   double step = kFiniteDiffStep) {
    RVector grad(params.size());
    for (Eigen::Index i = 0; i < params.size(); ++i) {
        const double saved = params[i];
        params[i] = saved + step;
        const double up = loss(params);
        params[i] = saved - step;
        const double down = loss(params);
        params[i] = saved;
        grad[i] = (up - down) / (2.0 * step);
    }
    return grad;
}

// ---------------------------------------------------------------------------
// Optimizer
// ---------------------------------------------------------------------------

class Adam {
  public:
    Adam(Eigen::Index size, const TrainConfig& config);
    void step(Eigen::Ref<RVector> params, const RVector& grad);

  private:
    double lr_;
    double beta1_;
    double beta2_;
    double epsilon_;
    long long t_ = 0;
    RVector m_;
    RVector v_;
};

// ---------------------------------------------------------------------------
// Training loops (seeded init, minibatch Adam, fixed reduction order)
// ---------------------------------------------------------------------------

struct QaeTraining {
    QaeParams params;
    TrainReport report;
};

QaeTraining train_qae(const RMatrix& features, int latent_dim, int qudit_dim,
                      const GeneratorBasis& basis, const TrainConfig& config);

struct QuditVqcTraining {
    QuditVqcParams params;
    TrainReport report;
};

// `features` is M x basis.size() for re-uploading input (e.g. QAE-encoded),
// or M x 5 with raw_features = true for the unity-reset circuit.
QuditVqcTraining train_qudit_vqc(const RMatrix& features, const std::vector<int>& labels,
                                 int layers, const GeneratorBasis& basis,
                                 const TrainConfig& config, bool raw_features = false);

struct QubitVqcTraining {
    QubitVqcParams params;
    TrainReport report;
};

QubitVqcTraining train_qubit_vqc(const RMatrix& features, const std::vector<int>& labels,
                                 int layers, QubitReadout readout,
                                 const TrainConfig& config);

struct BatchedQaeTraining {
    BatchedQaeParams params;
    TrainReport report;
};

BatchedQaeTraining train_batched_qae(const RMatrix& features,
                                     const std::vector<int>& encoder_hidden,
                                     const std::vector<int>& decoder_hidden,
                                     const TrainConfig& config);

struct DenseNnTraining {
    DenseNnParams params;
    TrainReport report;
};

DenseNnTraining train_dense_nn(const RMatrix& features, const std::vector<int>& labels,
                               const std::vector<int>& hidden, const TrainConfig& config);

struct QaeQuditJointTraining {
    QaeParams qae;
    QuditVqcParams vqc;
    TrainReport report;
};

// Optional joint fine-tuning stage: encoder and circuit weights both train
// on the classification loss, starting from the two-stage result.
QaeQuditJointTraining finetune_qae_qudit(const RMatrix& features,
                                         const std::vector<int>& labels, QaeParams qae,
                                         QuditVqcParams vqc, const GeneratorBasis& basis,
                                         const TrainConfig& config);

} // namespace quditml
