#include "quditml/checkpoint.hpp"

#include "quditml/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace quditml {

namespace {

constexpr char kVersionLine[] = "quditml-checkpoint v1";

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

} // namespace

long long Checkpoint::get_int(const std::string& name) const {
    for (const auto& [key, value] : ints) {
        if (key == name) return value;
    }
    throw ParseError("checkpoint '" + kind + "': missing int field '" + name + "'");
}

bool Checkpoint::has_int(const std::string& name) const {
    for (const auto& [key, value] : ints) {
        if (key == name) return true;
    }
    return false;
}

const RMatrix& Checkpoint::get_matrix(const std::string& name) const {
    for (const auto& [key, value] : matrices) {
        if (key == name) return value;
    }
    throw ParseError("checkpoint '" + kind + "': missing matrix field '" + name + "'");
}

std::string Checkpoint::serialize() const {
    std::ostringstream out;
    out << kVersionLine << "\n";
    out << "kind " << kind << "\n";
    for (const auto& [name, value] : ints) {
        out << "int " << name << " " << value << "\n";
    }
    for (const auto& [name, matrix] : matrices) {
        out << "matrix " << name << " " << matrix.rows() << " " << matrix.cols() << "\n";
        for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
            for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
                if (c > 0) out << ' ';
                out << format_double(matrix(r, c));
            }
            out << "\n";
        }
    }
    out << "end\n";
    return out.str();
}

Checkpoint Checkpoint::deserialize(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kVersionLine) {
        throw ParseError("checkpoint: bad version line '" + line + "'");
    }

    Checkpoint ckpt;
    std::string token;
    if (!(in >> token) || token != "kind" || !(in >> ckpt.kind)) {
        throw ParseError("checkpoint: missing kind");
    }
    while (in >> token) {
        if (token == "end") {
            return ckpt;
        }
        if (token == "int") {
            std::string name;
            long long value = 0;
            if (!(in >> name >> value)) {
                throw ParseError("checkpoint: malformed int field");
            }
            ckpt.ints.emplace_back(name, value);
        } else if (token == "matrix") {
            std::string name;
            Eigen::Index rows = 0;
            Eigen::Index cols = 0;
            if (!(in >> name >> rows >> cols) || rows < 0 || cols < 0) {
                throw ParseError("checkpoint: malformed matrix header");
            }
            RMatrix matrix(rows, cols);
            for (Eigen::Index r = 0; r < rows; ++r) {
                for (Eigen::Index c = 0; c < cols; ++c) {
                    if (!(in >> matrix(r, c))) {
                        throw ParseError("checkpoint: matrix '" + name +
                                         "' truncated at row " + std::to_string(r));
                    }
                }
            }
            ckpt.matrices.emplace_back(name, std::move(matrix));
        } else {
            throw ParseError("checkpoint: unknown field tag '" + token + "'");
        }
    }
    throw ParseError("checkpoint: missing end marker");
}

void Checkpoint::write(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ParseError(path.string() + ": cannot open file for writing");
    }
    out << serialize();
}

Checkpoint Checkpoint::read(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError(path.string() + ": cannot open file");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return deserialize(buffer.str());
}

namespace {

void require_kind(const Checkpoint& ckpt, const std::string& expected) {
    if (ckpt.kind != expected) {
        throw ParseError("checkpoint kind '" + ckpt.kind + "', expected '" + expected +
                         "'");
    }
}

} // namespace

Checkpoint to_checkpoint(const QuditVqcParams& params) {
    Checkpoint ckpt;
    ckpt.kind = "qudit-vqc";
    ckpt.ints.emplace_back("d", params.dim);
    ckpt.ints.emplace_back("L", params.layers());
    ckpt.matrices.emplace_back("phi", params.weights);
    return ckpt;
}

QuditVqcParams qudit_vqc_from_checkpoint(const Checkpoint& ckpt) {
    require_kind(ckpt, "qudit-vqc");
    QuditVqcParams params;
    params.dim = static_cast<int>(ckpt.get_int("d"));
    params.weights = ckpt.get_matrix("phi");
    if (params.weights.cols() != params.dim * params.dim - 1) {
        throw ParseError("qudit-vqc checkpoint: phi has " +
                         std::to_string(params.weights.cols()) + " columns for d=" +
                         std::to_string(params.dim));
    }
    return params;
}

Checkpoint to_checkpoint(const QaeParams& params) {
    Checkpoint ckpt;
    ckpt.kind = "qae";
    ckpt.ints.emplace_back("K", params.input_dim());
    ckpt.ints.emplace_back("D", params.latent_dim());
    ckpt.ints.emplace_back("d", params.qudit_dim());
    ckpt.matrices.emplace_back("encoder", params.encoder);
    ckpt.matrices.emplace_back("decoder", params.decoder);
    return ckpt;
}

QaeParams qae_from_checkpoint(const Checkpoint& ckpt) {
    require_kind(ckpt, "qae");
    QaeParams params;
    params.encoder = ckpt.get_matrix("encoder");
    params.decoder = ckpt.get_matrix("decoder");
    if (params.decoder.rows() != 2 * ckpt.get_int("d") ||
        params.encoder.rows() != ckpt.get_int("K") ||
        params.encoder.cols() != ckpt.get_int("D")) {
        throw ParseError("qae checkpoint: dimensions disagree with weight shapes");
    }
    return params;
}

Checkpoint to_checkpoint(const QubitVqcParams& params) {
    Checkpoint ckpt;
    ckpt.kind = "qubit-vqc";
    ckpt.ints.emplace_back("m", params.layers());
    ckpt.ints.emplace_back("readout", params.readout == QubitReadout::GroupedTail ? 1 : 0);
    ckpt.matrices.emplace_back("phi", params.weights);
    return ckpt;
}

QubitVqcParams qubit_vqc_from_checkpoint(const Checkpoint& ckpt) {
    require_kind(ckpt, "qubit-vqc");
    QubitVqcParams params;
    params.weights = ckpt.get_matrix("phi");
    params.readout = ckpt.get_int("readout") == 1 ? QubitReadout::GroupedTail
                                                  : QubitReadout::FirstNine;
    if (params.weights.cols() != kQubitFeatures) {
        throw ParseError("qubit-vqc checkpoint: phi must have 12 columns");
    }
    return params;
}

Checkpoint to_checkpoint(const BatchedQaeParams& params) {
    Checkpoint ckpt;
    ckpt.kind = "batched-qae";
    ckpt.ints.emplace_back("encoder_depth",
                           static_cast<long long>(params.encoder_blocks[0].size()));
    ckpt.ints.emplace_back("decoder_depth", static_cast<long long>(params.decoder.size()));
    for (int k = 0; k < kQubitRegister; ++k) {
        const auto& block = params.encoder_blocks[static_cast<std::size_t>(k)];
        for (std::size_t i = 0; i < block.size(); ++i) {
            ckpt.matrices.emplace_back(
                "encoder_" + std::to_string(k) + "_" + std::to_string(i), block[i]);
        }
    }
    for (std::size_t i = 0; i < params.decoder.size(); ++i) {
        ckpt.matrices.emplace_back("decoder_" + std::to_string(i), params.decoder[i]);
    }
    return ckpt;
}

BatchedQaeParams batched_qae_from_checkpoint(const Checkpoint& ckpt) {
    require_kind(ckpt, "batched-qae");
    BatchedQaeParams params;
    const auto encoder_depth = static_cast<std::size_t>(ckpt.get_int("encoder_depth"));
    const auto decoder_depth = static_cast<std::size_t>(ckpt.get_int("decoder_depth"));
    for (int k = 0; k < kQubitRegister; ++k) {
        auto& block = params.encoder_blocks[static_cast<std::size_t>(k)];
        for (std::size_t i = 0; i < encoder_depth; ++i) {
            block.push_back(
                ckpt.get_matrix("encoder_" + std::to_string(k) + "_" + std::to_string(i)));
        }
    }
    for (std::size_t i = 0; i < decoder_depth; ++i) {
        params.decoder.push_back(ckpt.get_matrix("decoder_" + std::to_string(i)));
    }
    return params;
}

Checkpoint to_checkpoint(const DenseNnParams& params) {
    Checkpoint ckpt;
    ckpt.kind = "dense-nn";
    ckpt.ints.emplace_back("depth", static_cast<long long>(params.weights.size()));
    for (std::size_t i = 0; i < params.weights.size(); ++i) {
        ckpt.matrices.emplace_back("w" + std::to_string(i), params.weights[i]);
    }
    return ckpt;
}

DenseNnParams dense_nn_from_checkpoint(const Checkpoint& ckpt) {
    require_kind(ckpt, "dense-nn");
    DenseNnParams params;
    const auto depth = static_cast<std::size_t>(ckpt.get_int("depth"));
    for (std::size_t i = 0; i < depth; ++i) {
        params.weights.push_back(ckpt.get_matrix("w" + std::to_string(i)));
    }
    return params;
}

Checkpoint to_checkpoint(const Standardizer& scaler) {
    Checkpoint ckpt;
    ckpt.kind = "standardizer";
    ckpt.matrices.emplace_back("mean", scaler.mean.transpose());
    ckpt.matrices.emplace_back("stddev", scaler.stddev.transpose());
    return ckpt;
}

Standardizer standardizer_from_checkpoint(const Checkpoint& ckpt) {
    require_kind(ckpt, "standardizer");
    Standardizer scaler;
    scaler.mean = ckpt.get_matrix("mean").row(0);
    scaler.stddev = ckpt.get_matrix("stddev").row(0);
    return scaler;
}

} // namespace quditml
