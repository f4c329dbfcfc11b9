#include "quditml/experiment.hpp"

#include "quditml/checkpoint.hpp"
#include "quditml/errors.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

namespace quditml {

using json = nlohmann::ordered_json;

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::QaeQudit: return "qae-qudit";
        case ModelKind::DenseNn: return "dense-nn";
        case ModelKind::QuditRaw: return "qudit-raw";
        case ModelKind::QaeQubits: return "qae-qubits";
    }
    throw ConfigError("unknown model kind");
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "qae-qudit") return ModelKind::QaeQudit;
    if (name == "dense-nn") return ModelKind::DenseNn;
    if (name == "qudit-raw") return ModelKind::QuditRaw;
    if (name == "qae-qubits") return ModelKind::QaeQubits;
    throw ConfigError("unknown model kind '" + name +
                      "' (expected qae-qudit, dense-nn, qudit-raw or qae-qubits)");
}

namespace {

constexpr int kQuditDim = 9;
const std::vector<int> kNnHidden = {128, 256, 128};

GeneratorBasis model_basis(const std::optional<std::uint64_t>& permutation_seed) {
    return permutation_seed ? build_generator_basis(kQuditDim, *permutation_seed)
                            : build_generator_basis(kQuditDim);
}

} // namespace

int TrainedModel::parameter_count() const {
    int count = 0;
    if (qae) count += qae->parameter_count();
    if (batched_qae) count += batched_qae->parameter_count();
    if (qudit_vqc) count += qudit_vqc->parameter_count();
    if (qubit_vqc) count += qubit_vqc->parameter_count();
    if (dense_nn) count += dense_nn->parameter_count();
    return count;
}

RVector TrainedModel::forward(const RVector& features) const {
    const RVector x = scaler.apply(features);
    switch (kind) {
        case ModelKind::QaeQudit: {
            const GeneratorBasis basis = model_basis(std::nullopt);
            return qae_qudit_forward(x, *qae, *qudit_vqc, basis);
        }
        case ModelKind::QuditRaw: {
            const GeneratorBasis basis = model_basis(permutation_seed);
            return raw_qudit_forward(x, *qudit_vqc, basis);
        }
        case ModelKind::QaeQubits:
            return qubit_vqc_forward(batched_qae_encode(x, *batched_qae), *qubit_vqc);
        case ModelKind::DenseNn:
            return dense_nn_forward(x, *dense_nn);
    }
    throw ConfigError("TrainedModel: unknown kind");
}

TrainOutcome train_model(const LabeledDataset& train, const ExperimentConfig& config) {
    if (train.rows.empty()) {
        throw InvalidInput("train_model: empty train split");
    }

    TrainOutcome outcome;
    outcome.model.kind = config.model;
    outcome.model.scaler = Standardizer::fit(train);

    const LabeledDataset standardized = outcome.model.scaler.apply(train);
    const RMatrix features = standardized.feature_matrix();
    const std::vector<int> labels = standardized.labels();

    TrainConfig stage1 = config.train;
    if (config.qae_epochs) stage1.epochs = *config.qae_epochs;
    if (config.qae_learning_rate) stage1.learning_rate = *config.qae_learning_rate;
    TrainConfig stage2 = config.train;
    stage2.seed = Rng::derive(config.train.seed, 2);

    switch (config.model) {
        case ModelKind::QaeQudit: {
            const GeneratorBasis basis = model_basis(std::nullopt);
            QaeTraining qae = train_qae(features, basis.size(), basis.dim, basis, stage1);
            outcome.reports.push_back(qae.report);
            outcome.stage_names.emplace_back("qae");

            // Frozen encoder: every sample is embedded once, then only phi trains.
            RMatrix encoded(features.rows(), basis.size());
            for (Eigen::Index i = 0; i < features.rows(); ++i) {
                encoded.row(i) = qae_encode(features.row(i), qae.params).transpose();
            }
            QuditVqcTraining vqc =
                train_qudit_vqc(encoded, labels, config.vqc_layers, basis, stage2);
            outcome.reports.push_back(vqc.report);
            outcome.stage_names.emplace_back("vqc");

            if (config.joint_finetune) {
                TrainConfig stage3 = config.train;
                stage3.seed = Rng::derive(config.train.seed, 3);
                QaeQuditJointTraining joint = finetune_qae_qudit(
                    features, labels, qae.params, vqc.params, basis, stage3);
                qae.params = std::move(joint.qae);
                vqc.params = std::move(joint.vqc);
                outcome.reports.push_back(joint.report);
                outcome.stage_names.emplace_back("joint");
            }
            outcome.model.qae = std::move(qae.params);
            outcome.model.qudit_vqc = std::move(vqc.params);
            break;
        }
        case ModelKind::QuditRaw: {
            const GeneratorBasis basis = model_basis(config.permutation_seed);
            QuditVqcTraining vqc = train_qudit_vqc(features, labels, config.vqc_layers,
                                                   basis, stage2, /*raw_features=*/true);
            outcome.reports.push_back(vqc.report);
            outcome.stage_names.emplace_back("vqc");
            outcome.model.qudit_vqc = std::move(vqc.params);
            outcome.model.permutation_seed = config.permutation_seed;
            break;
        }
        case ModelKind::QaeQubits: {
            BatchedQaeTraining front =
                train_batched_qae(features, {}, {}, stage1);
            outcome.reports.push_back(front.report);
            outcome.stage_names.emplace_back("batched-qae");

            RMatrix encoded(features.rows(), kQubitFeatures);
            for (Eigen::Index i = 0; i < features.rows(); ++i) {
                encoded.row(i) =
                    batched_qae_encode(features.row(i), front.params).transpose();
            }
            QubitVqcTraining vqc = train_qubit_vqc(encoded, labels, config.vqc_layers,
                                                   config.readout, stage2);
            outcome.reports.push_back(vqc.report);
            outcome.stage_names.emplace_back("vqc");
            outcome.model.batched_qae = std::move(front.params);
            outcome.model.qubit_vqc = std::move(vqc.params);
            break;
        }
        case ModelKind::DenseNn: {
            DenseNnTraining nn = train_dense_nn(features, labels, kNnHidden, stage2);
            outcome.reports.push_back(nn.report);
            outcome.stage_names.emplace_back("nn");
            outcome.model.dense_nn = std::move(nn.params);
            break;
        }
    }
    return outcome;
}

MetricsReport evaluate_model(const TrainedModel& model, const LabeledDataset& test) {
    if (test.rows.empty()) {
        throw InvalidInput("evaluate_model: empty test split");
    }
    std::vector<int> predictions;
    predictions.reserve(test.rows.size());
    for (const FeatureRow& row : test.rows) {
        predictions.push_back(predict_class(model.forward(row.features)));
    }
    return compute_metrics(confusion(predictions, test.labels()));
}

void save_run(const std::filesystem::path& dir, const TrainOutcome& outcome,
              const ExperimentConfig& config) {
    std::filesystem::create_directories(dir);
    const TrainedModel& model = outcome.model;

    json manifest;
    manifest["model"] = to_string(model.kind);
    manifest["seed"] = config.train.seed;
    manifest["epochs"] = config.train.epochs;
    manifest["batch_size"] = config.train.batch_size;
    manifest["learning_rate"] = config.train.learning_rate;
    manifest["layers"] = config.vqc_layers;
    manifest["grad_mode"] = config.train.grad_mode == GradMode::Analytic
                                ? "analytic"
                                : "finite-difference";
    manifest["weights"] = model.parameter_count();
    if (model.permutation_seed) {
        manifest["perm_seed"] = *model.permutation_seed;
    }
    if (model.kind == ModelKind::QaeQubits) {
        manifest["readout"] = config.readout == QubitReadout::GroupedTail
                                  ? "grouped-tail"
                                  : "first-nine";
    }
    if (model.kind == ModelKind::QaeQudit) {
        manifest["joint_finetune"] = config.joint_finetune;
    }
    std::ofstream manifest_out(dir / "run.json", std::ios::binary);
    manifest_out << manifest.dump(2) << "\n";

    to_checkpoint(model.scaler).write(dir / "scaler.ckpt");
    switch (model.kind) {
        case ModelKind::QaeQudit:
            to_checkpoint(*model.qae).write(dir / "qae.ckpt");
            to_checkpoint(*model.qudit_vqc).write(dir / "vqc.ckpt");
            break;
        case ModelKind::QuditRaw:
            to_checkpoint(*model.qudit_vqc).write(dir / "model.ckpt");
            break;
        case ModelKind::QaeQubits:
            to_checkpoint(*model.batched_qae).write(dir / "qae.ckpt");
            to_checkpoint(*model.qubit_vqc).write(dir / "model.ckpt");
            break;
        case ModelKind::DenseNn:
            to_checkpoint(*model.dense_nn).write(dir / "model.ckpt");
            break;
    }

    std::ofstream report_out(dir / "train_report.txt", std::ios::binary);
    for (std::size_t i = 0; i < outcome.reports.size(); ++i) {
        report_out << format_train_report(outcome.reports[i], outcome.stage_names[i]);
    }
}

TrainedModel load_run(const std::filesystem::path& dir) {
    std::ifstream manifest_in(dir / "run.json");
    if (!manifest_in) {
        throw ParseError((dir / "run.json").string() + ": cannot open file");
    }
    json manifest;
    try {
        manifest_in >> manifest;
    } catch (const json::exception& e) {
        throw ParseError((dir / "run.json").string() + ": " + e.what());
    }

    TrainedModel model;
    model.kind = model_kind_from_string(manifest.at("model").get<std::string>());
    model.scaler = standardizer_from_checkpoint(Checkpoint::read(dir / "scaler.ckpt"));
    if (manifest.contains("perm_seed")) {
        model.permutation_seed = manifest.at("perm_seed").get<std::uint64_t>();
    }
    switch (model.kind) {
        case ModelKind::QaeQudit:
            model.qae = qae_from_checkpoint(Checkpoint::read(dir / "qae.ckpt"));
            model.qudit_vqc =
                qudit_vqc_from_checkpoint(Checkpoint::read(dir / "vqc.ckpt"));
            break;
        case ModelKind::QuditRaw:
            model.qudit_vqc =
                qudit_vqc_from_checkpoint(Checkpoint::read(dir / "model.ckpt"));
            break;
        case ModelKind::QaeQubits:
            model.batched_qae =
                batched_qae_from_checkpoint(Checkpoint::read(dir / "qae.ckpt"));
            model.qubit_vqc =
                qubit_vqc_from_checkpoint(Checkpoint::read(dir / "model.ckpt"));
            break;
        case ModelKind::DenseNn:
            model.dense_nn = dense_nn_from_checkpoint(Checkpoint::read(dir / "model.ckpt"));
            break;
    }
    return model;
}

} // namespace quditml
