// errors.hpp — Exception types shared across the library

#pragma once

#include <stdexcept>
#include <string>

namespace quditml {

// Dimension/length mismatch between operands.
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Input rejected by a precondition (invalid dimension, label, wiring, ...).
struct InvalidInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A numerical contract was violated (non-Hermitian input, complex residual, ...).
struct ContractViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed file content; message carries file/line/column context.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Unknown model kind or inconsistent run configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Training diverged; remembers the epoch where the loss left the reals.
struct NumericalError : std::runtime_error {
    int epoch;
    NumericalError(const std::string& what, int epoch_index)
        : std::runtime_error(what), epoch(epoch_index) {}
};

} // namespace quditml
