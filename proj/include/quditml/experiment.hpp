// experiment.hpp — End-to-end orchestration: the two-stage training
// procedure, the single-stage baselines, evaluation, and run-directory
// persistence shared by the CLI and the acceptance suite.

#pragma once

#include "quditml/dataset.hpp"
#include "quditml/metrics.hpp"
#include "quditml/models.hpp"
#include "quditml/training.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace quditml {

enum class ModelKind { QaeQudit, DenseNn, QuditRaw, QaeQubits };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

struct ExperimentConfig {
    ModelKind model = ModelKind::QaeQudit;
    TrainConfig train;
    int vqc_layers = 8;                               // L (qudit) or m (qubit)
    std::optional<std::uint64_t> permutation_seed;    // qudit-raw generator order
    QubitReadout readout = QubitReadout::FirstNine;
    bool joint_finetune = false;                      // qae-qudit only, default off
    std::optional<int> qae_epochs;                    // stage-1 override
    std::optional<double> qae_learning_rate;          // stage-1 override
};

// A trained classifier with its frozen front end and feature scaler.
struct TrainedModel {
    ModelKind kind = ModelKind::QaeQudit;
    Standardizer scaler;
    std::optional<QaeParams> qae;
    std::optional<BatchedQaeParams> batched_qae;
    std::optional<QuditVqcParams> qudit_vqc;
    std::optional<QubitVqcParams> qubit_vqc;
    std::optional<DenseNnParams> dense_nn;
    std::optional<std::uint64_t> permutation_seed;

    int parameter_count() const;
    // Class probabilities for one unstandardized feature vector.
    RVector forward(const RVector& features) const;
};

struct TrainOutcome {
    TrainedModel model;
    std::vector<TrainReport> reports;     // stage order (QAE first when present)
    std::vector<std::string> stage_names;
};

TrainOutcome train_model(const LabeledDataset& train, const ExperimentConfig& config);

MetricsReport evaluate_model(const TrainedModel& model, const LabeledDataset& test);

// Run-directory layout: run.json plus one checkpoint file per component
// (scaler.ckpt, and qae.ckpt/vqc.ckpt or model.ckpt) and train_report.txt.
void save_run(const std::filesystem::path& dir, const TrainOutcome& outcome,
              const ExperimentConfig& config);
TrainedModel load_run(const std::filesystem::path& dir);

} // namespace quditml
