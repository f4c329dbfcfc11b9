// _quditml: pybind11 bindings for the core operations.

#include "quditml/algebra.hpp"
#include "quditml/dataset.hpp"
#include "quditml/experiment.hpp"
#include "quditml/metrics.hpp"
#include "quditml/models.hpp"
#include "quditml/simulator.hpp"
#include "quditml/training.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>

namespace py = pybind11;
using namespace quditml;

namespace {

GeneratorBasis make_basis(int dim, std::optional<std::uint64_t> permutation_seed) {
    return permutation_seed ? build_generator_basis(dim, *permutation_seed)
                            : build_generator_basis(dim);
}

} // namespace

PYBIND11_MODULE(_quditml, m) {
    m.doc() = "Single-qudit VQC classifier with a quantum-autoencoder embedding";

    // ------------------------------------------------------------------ algebra
    py::class_<GeneratorBasis>(m, "GeneratorBasis")
        .def_readonly("dim", &GeneratorBasis::dim)
        .def_readonly("generators", &GeneratorBasis::generators)
        .def_readonly("permutation_seed", &GeneratorBasis::permutation_seed)
        .def("size", &GeneratorBasis::size);

    m.def("build_generator_basis", &make_basis, py::arg("dim"),
          py::arg("permutation_seed") = std::nullopt,
          "Generalized Gell-Mann basis of su(dim), canonical or seeded-permuted");
    m.def("assemble_hermitian", &assemble_hermitian, py::arg("coeffs"), py::arg("basis"));
    m.def("hermiticity_residual", &hermiticity_residual, py::arg("matrix"));
    m.def("exp_minus_i", &exp_minus_i, py::arg("hermitian"));
    m.def("exp_derivative", &exp_derivative, py::arg("hermitian"), py::arg("direction"));
    m.def("rotation_gate", &rotation_gate, py::arg("axis"), py::arg("angle"),
          py::arg("basis"));

    // ---------------------------------------------------------------- simulator
    m.def(
        "ground_state",
        [](int dim) { return ground_state(dim).amplitudes; },
        py::arg("dim"));
    m.def(
        "apply_unitary",
        [](const CVector& amplitudes, const Matrix& unitary) {
            return apply_unitary(QuantumState(amplitudes), unitary).amplitudes;
        },
        py::arg("amplitudes"), py::arg("unitary"));
    m.def(
        "measurement_probabilities",
        [](const CVector& amplitudes) {
            return measurement_probabilities(QuantumState(amplitudes));
        },
        py::arg("amplitudes"));
    m.def(
        "expectation_value",
        [](const CVector& amplitudes, const Matrix& observable) {
            return expectation_value(QuantumState(amplitudes), observable);
        },
        py::arg("amplitudes"), py::arg("observable"));
    m.def("embed_single_qubit_gate", &embed_single_qubit_gate, py::arg("gate"),
          py::arg("target"), py::arg("qubits"));
    m.def("cnot_gate", &cnot_gate, py::arg("control"), py::arg("target"),
          py::arg("qubits"));

    // ------------------------------------------------------------------- models
    py::class_<QuditVqcParams>(m, "QuditVqcParams")
        .def_readwrite("dim", &QuditVqcParams::dim)
        .def_readwrite("weights", &QuditVqcParams::weights)
        .def("layers", &QuditVqcParams::layers)
        .def("parameter_count", &QuditVqcParams::parameter_count)
        .def_static(
            "random",
            [](int dim, int layers, double sigma, std::uint64_t seed) {
                Rng rng(seed);
                return QuditVqcParams::random_init(dim, layers, sigma, rng);
            },
            py::arg("dim"), py::arg("layers"), py::arg("sigma"), py::arg("seed"));

    py::class_<QaeParams>(m, "QaeParams")
        .def_readwrite("encoder", &QaeParams::encoder)
        .def_readwrite("decoder", &QaeParams::decoder)
        .def("parameter_count", &QaeParams::parameter_count)
        .def_static(
            "random",
            [](int input_dim, int latent_dim, int qudit_dim, double sigma,
               std::uint64_t seed) {
                Rng rng(seed);
                return QaeParams::random_init(input_dim, latent_dim, qudit_dim, sigma, rng);
            },
            py::arg("input_dim"), py::arg("latent_dim"), py::arg("qudit_dim"),
            py::arg("sigma"), py::arg("seed"));

    py::enum_<QubitReadout>(m, "QubitReadout")
        .value("FirstNine", QubitReadout::FirstNine)
        .value("GroupedTail", QubitReadout::GroupedTail);

    py::class_<QubitVqcParams>(m, "QubitVqcParams")
        .def_readwrite("weights", &QubitVqcParams::weights)
        .def_readwrite("readout", &QubitVqcParams::readout)
        .def("layers", &QubitVqcParams::layers)
        .def("parameter_count", &QubitVqcParams::parameter_count)
        .def_static(
            "random",
            [](int layers, double sigma, std::uint64_t seed) {
                Rng rng(seed);
                return QubitVqcParams::random_init(layers, sigma, rng);
            },
            py::arg("layers"), py::arg("sigma"), py::arg("seed"));

    py::class_<BatchedQaeParams>(m, "BatchedQaeParams")
        .def("parameter_count", &BatchedQaeParams::parameter_count)
        .def_static(
            "random",
            [](int input_dim, const std::vector<int>& encoder_hidden,
               const std::vector<int>& decoder_hidden, double sigma, std::uint64_t seed) {
                Rng rng(seed);
                return BatchedQaeParams::random_init(input_dim, encoder_hidden,
                                                     decoder_hidden, sigma, rng);
            },
            py::arg("input_dim"), py::arg("encoder_hidden") = std::vector<int>{},
            py::arg("decoder_hidden") = std::vector<int>{}, py::arg("sigma") = 0.1,
            py::arg("seed") = 0);

    py::class_<DenseNnParams>(m, "DenseNnParams")
        .def_readwrite("weights", &DenseNnParams::weights)
        .def("parameter_count", &DenseNnParams::parameter_count)
        .def_static(
            "random",
            [](int input_dim, const std::vector<int>& hidden, int classes, double sigma,
               std::uint64_t seed) {
                Rng rng(seed);
                return DenseNnParams::random_init(input_dim, hidden, classes, sigma, rng);
            },
            py::arg("input_dim"), py::arg("hidden"), py::arg("classes"), py::arg("sigma"),
            py::arg("seed"));

    m.def("vqc_unit", &vqc_unit, py::arg("x"), py::arg("phi_l"), py::arg("basis"));
    m.def("raw_qudit_unit", &raw_qudit_unit, py::arg("x"), py::arg("phi_l"),
          py::arg("basis"));
    m.def("qudit_vqc_forward", &qudit_vqc_forward, py::arg("x"), py::arg("params"),
          py::arg("basis"));
    m.def("raw_qudit_forward", &raw_qudit_forward, py::arg("x"), py::arg("params"),
          py::arg("basis"));
    m.def("qae_encode", &qae_encode, py::arg("x"), py::arg("params"));
    m.def("quantum_bottleneck", &quantum_bottleneck, py::arg("chi"), py::arg("basis"));
    m.def("qae_decode", &qae_decode, py::arg("amplitudes"), py::arg("params"));
    m.def("qae_reconstruct", &qae_reconstruct, py::arg("x"), py::arg("params"),
          py::arg("basis"));
    m.def("qae_reconstruction_loss", &qae_reconstruction_loss, py::arg("batch"),
          py::arg("params"), py::arg("basis"));
    m.def("qae_qudit_forward", &qae_qudit_forward, py::arg("x"), py::arg("qae"),
          py::arg("vqc"), py::arg("basis"));
    m.def("qubit_vqc_forward", &qubit_vqc_forward, py::arg("x"), py::arg("params"));
    m.def("batched_qae_encode", &batched_qae_encode, py::arg("x"), py::arg("params"));
    m.def("batched_qae_reconstruct", &batched_qae_reconstruct, py::arg("x"),
          py::arg("params"));
    m.def("dense_nn_forward", &dense_nn_forward, py::arg("x"), py::arg("params"));

    // ----------------------------------------------------------------- training
    py::enum_<GradMode>(m, "GradMode")
        .value("Analytic", GradMode::Analytic)
        .value("FiniteDifference", GradMode::FiniteDifference);

    py::class_<TrainConfig>(m, "TrainConfig")
        .def(py::init<>())
        .def_readwrite("learning_rate", &TrainConfig::learning_rate)
        .def_readwrite("epochs", &TrainConfig::epochs)
        .def_readwrite("batch_size", &TrainConfig::batch_size)
        .def_readwrite("seed", &TrainConfig::seed)
        .def_readwrite("grad_mode", &TrainConfig::grad_mode)
        .def_readwrite("init_scale", &TrainConfig::init_scale);

    py::class_<TrainReport>(m, "TrainReport")
        .def_readonly("epoch_loss", &TrainReport::epoch_loss)
        .def_readonly("final_loss", &TrainReport::final_loss)
        .def_readonly("duration_seconds", &TrainReport::duration_seconds);

    m.def("cross_entropy_loss", &cross_entropy_loss, py::arg("probs"), py::arg("label"));
    m.def("vqc_gradient", &vqc_gradient, py::arg("x"), py::arg("params"), py::arg("label"),
          py::arg("basis"), py::arg("mode") = GradMode::Analytic);
    m.def("raw_vqc_gradient", &raw_vqc_gradient, py::arg("x"), py::arg("params"),
          py::arg("label"), py::arg("basis"), py::arg("mode") = GradMode::Analytic);
    m.def("qubit_vqc_gradient", &qubit_vqc_gradient, py::arg("x"), py::arg("params"),
          py::arg("label"), py::arg("mode") = GradMode::Analytic);
    m.def(
        "qae_gradient",
        [](const RMatrix& batch, const QaeParams& params, const GeneratorBasis& basis) {
            QaeGradient grad = qae_gradient(batch, params, basis);
            return py::make_tuple(grad.encoder, grad.decoder);
        },
        py::arg("batch"), py::arg("params"), py::arg("basis"));
    m.def(
        "train_qae",
        [](const RMatrix& features, int latent_dim, int qudit_dim,
           const GeneratorBasis& basis, const TrainConfig& config) {
            QaeTraining result = train_qae(features, latent_dim, qudit_dim, basis, config);
            return py::make_tuple(result.params, result.report);
        },
        py::arg("features"), py::arg("latent_dim"), py::arg("qudit_dim"), py::arg("basis"),
        py::arg("config"));
    m.def(
        "train_qudit_vqc",
        [](const RMatrix& features, const std::vector<int>& labels, int layers,
           const GeneratorBasis& basis, const TrainConfig& config, bool raw_features) {
            QuditVqcTraining result =
                train_qudit_vqc(features, labels, layers, basis, config, raw_features);
            return py::make_tuple(result.params, result.report);
        },
        py::arg("features"), py::arg("labels"), py::arg("layers"), py::arg("basis"),
        py::arg("config"), py::arg("raw_features") = false);
    m.def(
        "train_qubit_vqc",
        [](const RMatrix& features, const std::vector<int>& labels, int layers,
           QubitReadout readout, const TrainConfig& config) {
            QubitVqcTraining result =
                train_qubit_vqc(features, labels, layers, readout, config);
            return py::make_tuple(result.params, result.report);
        },
        py::arg("features"), py::arg("labels"), py::arg("layers"),
        py::arg("readout") = QubitReadout::FirstNine, py::arg("config") = TrainConfig{});
    m.def(
        "train_dense_nn",
        [](const RMatrix& features, const std::vector<int>& labels,
           const std::vector<int>& hidden, const TrainConfig& config) {
            DenseNnTraining result = train_dense_nn(features, labels, hidden, config);
            return py::make_tuple(result.params, result.report);
        },
        py::arg("features"), py::arg("labels"),
        py::arg("hidden") = std::vector<int>{128, 256, 128}, py::arg("config"));

    // ------------------------------------------------------------------ dataset
    py::class_<LabeledDataset>(m, "LabeledDataset")
        .def("size", &LabeledDataset::size)
        .def("class_counts", &LabeledDataset::class_counts)
        .def("feature_matrix", &LabeledDataset::feature_matrix)
        .def("labels", &LabeledDataset::labels);

    py::class_<Standardizer>(m, "Standardizer")
        .def_readonly("mean", &Standardizer::mean)
        .def_readonly("stddev", &Standardizer::stddev)
        .def_static("fit", &Standardizer::fit, py::arg("train"))
        .def("apply",
             static_cast<RVector (Standardizer::*)(const RVector&) const>(
                 &Standardizer::apply),
             py::arg("x"));

    m.def("synthesize_dataset", &synthesize_dataset, py::arg("seed"),
          py::arg("rows_per_class"));
    m.def("split_dataset", &split_dataset, py::arg("dataset"), py::arg("fraction"),
          py::arg("seed"));
    m.def("load_feature_csv", &load_feature_csv, py::arg("path"));

    // ------------------------------------------------------------------ metrics
    py::class_<MetricsReport>(m, "MetricsReport")
        .def_readonly("precision", &MetricsReport::precision)
        .def_readonly("recall", &MetricsReport::recall)
        .def_readonly("f1", &MetricsReport::f1)
        .def_readonly("support", &MetricsReport::support)
        .def_readonly("accuracy", &MetricsReport::accuracy)
        .def_readonly("macro_precision", &MetricsReport::macro_precision)
        .def_readonly("macro_recall", &MetricsReport::macro_recall)
        .def_readonly("macro_f1", &MetricsReport::macro_f1);

    m.def("predict_class", &predict_class, py::arg("probs"));
    m.def(
        "evaluate_predictions",
        [](const std::vector<int>& predictions, const std::vector<int>& labels) {
            return compute_metrics(confusion(predictions, labels));
        },
        py::arg("predictions"), py::arg("labels"));
}
