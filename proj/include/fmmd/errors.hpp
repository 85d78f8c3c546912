#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fmmd {

// Two samples live on different meshes.
struct IncompatibleMesh : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Not enough samples to form the requested estimate.
struct InsufficientData : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Empirical covariance has no usable spectrum (e.g. all samples identical).
struct DegenerateSpectrum : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Median heuristic collapsed to a zero bandwidth.
struct DegenerateBandwidth : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Signal-to-noise ratio undefined because the variance term vanished.
struct DegenerateSnr : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Matrix factorization failed even after jitter escalation.
struct NumericalFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operator input violates symmetry/positivity/commutation requirements.
struct InvalidOperator : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Malformed input file; carries the 1-based line where parsing stopped.
struct DataError : std::runtime_error {
    DataError(const std::string& what, std::size_t line_no)
        : std::runtime_error(what + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
    std::size_t line;
};

}  // namespace fmmd
