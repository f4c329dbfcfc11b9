// checkpoint.hpp — Structured-text model checkpoints. Weights are written
// row-major with 17 significant digits so a save/load round trip is
// bit-exact.

#pragma once

#include "quditml/dataset.hpp"
#include "quditml/models.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace quditml {

// Ordered named integers and row-major real matrices under a version tag
// and a model kind. Field order is the write order, so output is
// deterministic.
struct Checkpoint {
    std::string kind;
    std::vector<std::pair<std::string, long long>> ints;
    std::vector<std::pair<std::string, RMatrix>> matrices;

    long long get_int(const std::string& name) const;
    const RMatrix& get_matrix(const std::string& name) const;
    bool has_int(const std::string& name) const;

    std::string serialize() const;
    static Checkpoint deserialize(const std::string& text);

    void write(const std::filesystem::path& path) const;
    static Checkpoint read(const std::filesystem::path& path);
};

Checkpoint to_checkpoint(const QuditVqcParams& params);
Checkpoint to_checkpoint(const QaeParams& params);
Checkpoint to_checkpoint(const QubitVqcParams& params);
Checkpoint to_checkpoint(const BatchedQaeParams& params);
Checkpoint to_checkpoint(const DenseNnParams& params);
Checkpoint to_checkpoint(const Standardizer& scaler);

QuditVqcParams qudit_vqc_from_checkpoint(const Checkpoint& ckpt);
QaeParams qae_from_checkpoint(const Checkpoint& ckpt);
QubitVqcParams qubit_vqc_from_checkpoint(const Checkpoint& ckpt);
BatchedQaeParams batched_qae_from_checkpoint(const Checkpoint& ckpt);
DenseNnParams dense_nn_from_checkpoint(const Checkpoint& ckpt);
Standardizer standardizer_from_checkpoint(const Checkpoint& ckpt);

} // namespace quditml
