// quditml CLI: prepare / train / evaluate / compare.
//
// Exit codes: 0 success, 1 usage error, 2 missing or invalid input,
// 3 numerical failure during training.

#include "quditml/checkpoint.hpp"
#include "quditml/dataset.hpp"
#include "quditml/errors.hpp"
#include "quditml/experiment.hpp"
#include "quditml/metrics.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace quditml;

namespace {

bool color_enabled() {
    return isatty(fileno(stdout)) != 0 && std::getenv("NO_COLOR") == nullptr;
}

json load_config_file(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) {
        throw ParseError(path + ": cannot open config file");
    }
    try {
        json cfg;
        in >> cfg;
        return cfg;
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

// Flags win over config values, config values over defaults.
template <class T>
T pick(const CLI::Option* opt, const T& flag_value, const json& cfg, const char* key,
       const T& fallback) {
    if (opt != nullptr && opt->count() > 0) return flag_value;
    if (cfg.contains(key)) return cfg.at(key).get<T>();
    return fallback;
}

GradMode parse_grad_mode(const std::string& name) {
    if (name == "analytic") return GradMode::Analytic;
    if (name == "finite-difference" || name == "fd") return GradMode::FiniteDifference;
    throw ConfigError("unknown grad mode '" + name +
                      "' (expected analytic or finite-difference)");
}

QubitReadout parse_readout(const std::string& name) {
    if (name == "first-nine") return QubitReadout::FirstNine;
    if (name == "grouped-tail") return QubitReadout::GroupedTail;
    throw ConfigError("unknown readout '" + name +
                      "' (expected first-nine or grouped-tail)");
}

struct DataSource {
    enum class Kind { Synthetic, Series, Features } kind;
    int rows_per_class = 100;
    std::string path;
};

DataSource parse_data_source(const std::string& spec) {
    DataSource source;
    if (spec.rfind("synthetic:", 0) == 0) {
        source.kind = DataSource::Kind::Synthetic;
        source.rows_per_class = std::stoi(spec.substr(10));
        return source;
    }
    if (spec.rfind("series:", 0) == 0) {
        source.kind = DataSource::Kind::Series;
        source.path = spec.substr(7);
        return source;
    }
    if (spec.rfind("features:", 0) == 0) {
        source.kind = DataSource::Kind::Features;
        source.path = spec.substr(9);
        return source;
    }
    throw ConfigError("data source '" + spec +
                      "' must be synthetic:<rows-per-class>, series:<path> or "
                      "features:<path>");
}

// ---------------------------------------------------------------------------
// prepare
// ---------------------------------------------------------------------------

int cmd_prepare(const std::string& data_spec, const std::string& out_dir,
                std::uint64_t seed, const json& cfg) {
    const DataSource source = parse_data_source(data_spec);
    const double fraction = cfg.value("split_fraction", 0.8);
    const int window = cfg.value("window", kDefaultWindow);
    const int stride = cfg.value("stride", 1);

    LabeledDataset dataset;
    int warnings = 0;
    json manifest;
    manifest["source"] = data_spec;
    manifest["seed"] = seed;

    switch (source.kind) {
        case DataSource::Kind::Synthetic:
            dataset = synthesize_dataset(seed, source.rows_per_class);
            manifest["rows_per_class"] = source.rows_per_class;
            break;
        case DataSource::Kind::Series: {
            const WindowingResult windows =
                window_series(load_series_csv(source.path), window, stride);
            warnings = windows.skipped_segments;
            for (const WindowedSample& w : windows.windows) {
                dataset.rows.push_back(extract_features(w));
            }
            manifest["window"] = window;
            manifest["stride"] = stride;
            break;
        }
        case DataSource::Kind::Features:
            dataset = load_feature_csv(source.path);
            break;
    }

    const std::uint64_t split_seed = Rng::derive(seed, 1);
    LabeledDataset train;
    LabeledDataset test;
    if (!dataset.rows.empty()) {
        std::tie(train, test) = split_dataset(dataset, fraction, split_seed);
    }

    fs::create_directories(out_dir);
    write_feature_csv(fs::path(out_dir) / "train.csv", train);
    write_feature_csv(fs::path(out_dir) / "test.csv", test);

    manifest["split_fraction"] = fraction;
    manifest["split_seed"] = split_seed;
    manifest["train_rows"] = train.size();
    manifest["test_rows"] = test.size();
    manifest["train_class_counts"] = train.class_counts();
    manifest["test_class_counts"] = test.class_counts();
    manifest["warnings"] = warnings;
    std::ofstream manifest_out(fs::path(out_dir) / "manifest.json", std::ios::binary);
    manifest_out << manifest.dump(2) << "\n";

    std::cout << "prepared " << train.size() << " train / " << test.size()
              << " test rows in " << out_dir;
    if (warnings > 0) std::cout << " (" << warnings << " segment(s) skipped)";
    std::cout << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

int cmd_train(const ExperimentConfig& config, const std::string& data_dir,
              const std::string& out_dir) {
    const fs::path train_csv = fs::path(data_dir) / "train.csv";
    if (!fs::exists(train_csv)) {
        std::cerr << "error: no prepared data at " << train_csv << "\n";
        return 2;
    }
    const LabeledDataset train = load_feature_csv(train_csv);
    if (train.rows.empty()) {
        std::cerr << "error: " << train_csv << " holds no rows\n";
        return 2;
    }

    const TrainOutcome outcome = train_model(train, config);
    save_run(out_dir, outcome, config);

    std::cout << "trained " << to_string(config.model) << " ("
              << outcome.model.parameter_count() << " weights)\n";
    for (std::size_t i = 0; i < outcome.reports.size(); ++i) {
        const TrainReport& report = outcome.reports[i];
        std::printf("  stage %-12s epochs %-4zu final loss %-12.6g (%.2f s)\n",
                    outcome.stage_names[i].c_str(), report.epoch_loss.size(),
                    report.final_loss, report.duration_seconds);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

int cmd_evaluate(const std::string& data_dir, const std::string& run_dir) {
    const fs::path test_csv = fs::path(data_dir) / "test.csv";
    if (!fs::exists(test_csv)) {
        std::cerr << "error: no prepared data at " << test_csv << "\n";
        return 2;
    }
    if (!fs::exists(fs::path(run_dir) / "run.json")) {
        std::cerr << "error: no trained run at " << run_dir << "\n";
        return 2;
    }
    const TrainedModel model = load_run(run_dir);
    const LabeledDataset test = load_feature_csv(test_csv);
    if (test.rows.empty()) {
        std::cerr << "error: " << test_csv << " holds no rows\n";
        return 2;
    }
    const MetricsReport report = evaluate_model(model, test);

    std::ofstream table_out(fs::path(run_dir) / "metrics.txt", std::ios::binary);
    table_out << format_metrics_table(report);
    std::ofstream kv_out(fs::path(run_dir) / "metrics.kv", std::ios::binary);
    kv_out << format_metrics_kv(report);

    std::cout << format_metrics_table(report, color_enabled());
    return 0;
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

struct RunSummary {
    ModelKind kind;
    MetricsReport metrics;
    long long weights;
};

int cmd_compare(const std::vector<std::string>& run_dirs, const std::string& out_file) {
    std::vector<RunSummary> runs;
    for (const std::string& dir : run_dirs) {
        const fs::path manifest_path = fs::path(dir) / "run.json";
        const fs::path metrics_path = fs::path(dir) / "metrics.kv";
        if (!fs::exists(manifest_path) || !fs::exists(metrics_path)) {
            std::cerr << "error: " << dir << " is missing run.json or metrics.kv "
                      << "(train and evaluate it first)\n";
            return 2;
        }
        std::ifstream manifest_in(manifest_path);
        json manifest;
        manifest_in >> manifest;
        std::ifstream metrics_in(metrics_path);
        std::ostringstream buffer;
        buffer << metrics_in.rdbuf();

        RunSummary summary;
        summary.kind = model_kind_from_string(manifest.at("model").get<std::string>());
        summary.weights = manifest.at("weights").get<long long>();
        summary.metrics = parse_metrics_kv(buffer.str());
        runs.push_back(std::move(summary));
    }

    std::stable_sort(runs.begin(), runs.end(), [](const RunSummary& a, const RunSummary& b) {
        return static_cast<int>(a.kind) < static_cast<int>(b.kind);
    });

    std::ostringstream table;
    table << "Model        Precision  Recall      F1  Accuracy   # Weights\n";
    for (const RunSummary& run : runs) {
        char line[128];
        std::snprintf(line, sizeof(line), "%-12s %9.2f %7.2f %7.2f %9.2f %11lld",
                      to_string(run.kind).c_str(), run.metrics.macro_precision,
                      run.metrics.macro_recall, run.metrics.macro_f1,
                      run.metrics.accuracy, run.weights);
        table << line << "\n";
    }

    if (!out_file.empty()) {
        std::ofstream out(out_file, std::ios::binary);
        out << table.str();
    }
    if (color_enabled()) {
        const std::string text = table.str();
        const std::size_t first_line = text.find('\n');
        std::cout << "\x1b[1m" << text.substr(0, first_line) << "\x1b[0m"
                  << text.substr(first_line);
    } else {
        std::cout << table.str();
    }
    return 0;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"Hybrid qudit-VQC time-series classifier"};
    app.require_subcommand(1);

    std::string data_spec;
    std::string out_dir;
    std::string config_path;
    std::string model_name;
    std::string grad_mode_name = "analytic";
    std::uint64_t seed = 0;
    std::uint64_t perm_seed = 0;
    int epochs = 100;
    int batch_size = 128;
    double lr = 0.01;
    int layers = 8;
    std::vector<std::string> run_dirs;

    CLI::App* prepare = app.add_subcommand("prepare", "window, extract and split data");
    prepare->add_option("--data", data_spec,
                        "synthetic:<rows-per-class> | series:<path> | features:<path>");
    prepare->add_option("--out", out_dir, "output directory")->required();
    CLI::Option* prep_seed = prepare->add_option("--seed", seed, "root seed");
    prepare->add_option("--config", config_path, "JSON config file");

    CLI::App* train = app.add_subcommand("train", "train a model on prepared data");
    CLI::Option* train_model_opt =
        train->add_option("--model", model_name,
                          "qae-qudit | dense-nn | qudit-raw | qae-qubits");
    train->add_option("--data", data_spec, "prepared data directory")->required();
    train->add_option("--out", out_dir, "run output directory")->required();
    CLI::Option* train_seed = train->add_option("--seed", seed, "root seed");
    CLI::Option* train_epochs = train->add_option("--epochs", epochs, "training epochs");
    CLI::Option* train_batch = train->add_option("--batch-size", batch_size, "minibatch size");
    CLI::Option* train_lr = train->add_option("--lr", lr, "learning rate");
    CLI::Option* train_layers = train->add_option("--layers", layers, "circuit layers (L or m)");
    CLI::Option* train_perm =
        train->add_option("--perm-seed", perm_seed, "generator permutation seed (qudit-raw)");
    CLI::Option* train_grad =
        train->add_option("--grad-mode", grad_mode_name, "analytic | finite-difference");
    train->add_option("--config", config_path, "JSON config file");

    CLI::App* evaluate = app.add_subcommand("evaluate", "evaluate a trained run");
    evaluate->add_option("--data", data_spec, "prepared data directory")->required();
    evaluate->add_option("--out", out_dir, "run directory holding the checkpoints")
        ->required();
    evaluate->add_option("--config", config_path, "JSON config file");

    CLI::App* compare = app.add_subcommand("compare", "tabulate evaluated runs");
    compare->add_option("runs", run_dirs, "two or more evaluated run directories");
    compare->add_option("--out", out_dir, "also write the table to this file");
    compare->add_option("--config", config_path, "JSON config file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);   // prints help or the usage message
        return code == 0 ? 0 : 1;
    }

    const json cfg = load_config_file(config_path);

    if (prepare->parsed()) {
        const std::string data =
            pick(prepare->get_option("--data"), data_spec, cfg, "data", std::string());
        if (data.empty()) {
            std::cerr << "error: prepare needs --data or a config 'data' entry\n";
            return 1;
        }
        return cmd_prepare(data, out_dir,
                           pick(prep_seed, seed, cfg, "seed", std::uint64_t{0}), cfg);
    }

    if (train->parsed()) {
        const std::string model =
            pick(train_model_opt, model_name, cfg, "model", std::string());
        if (model.empty()) {
            std::cerr << "error: train needs --model or a config 'model' entry\n";
            return 1;
        }
        ExperimentConfig config;
        config.model = model_kind_from_string(model);
        config.train.seed = pick(train_seed, seed, cfg, "seed", std::uint64_t{0});
        config.train.epochs = pick(train_epochs, epochs, cfg, "epochs", 100);
        config.train.batch_size = pick(train_batch, batch_size, cfg, "batch_size", 128);
        config.train.learning_rate = pick(train_lr, lr, cfg, "lr", 0.01);
        config.train.init_scale = cfg.value("init_scale", 0.1);
        config.train.grad_mode =
            parse_grad_mode(pick(train_grad, grad_mode_name, cfg, "grad_mode",
                                 std::string("analytic")));
        config.vqc_layers = pick(train_layers, layers, cfg, "layers", 8);
        if (train_perm->count() > 0) {
            config.permutation_seed = perm_seed;
        } else if (cfg.contains("perm_seed")) {
            config.permutation_seed = cfg.at("perm_seed").get<std::uint64_t>();
        }
        config.readout = parse_readout(cfg.value("readout", "first-nine"));
        config.joint_finetune = cfg.value("joint_finetune", false);
        if (cfg.contains("qae_epochs")) {
            config.qae_epochs = cfg.at("qae_epochs").get<int>();
        }
        if (cfg.contains("qae_lr")) {
            config.qae_learning_rate = cfg.at("qae_lr").get<double>();
        }
        return cmd_train(config, data_spec, out_dir);
    }

    if (evaluate->parsed()) {
        return cmd_evaluate(data_spec, out_dir);
    }

    if (compare->parsed()) {
        if (run_dirs.size() < 2) {
            std::cerr << "error: compare needs at least two run directories\n";
            return 2;
        }
        const std::string out_file =
            compare->get_option("--out")->count() > 0 ? out_dir : std::string();
        return cmd_compare(run_dirs, out_file);
    }
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
