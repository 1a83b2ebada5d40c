#pragma once

#include <stdexcept>

namespace gnnmerge {

// Error taxonomy used across the library. The CLI maps usage problems to
// exit code 1 and any exception below to exit code 2.

struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParameterError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed files: bad magic, unknown version, truncation, broken invariants.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SingularMatrixError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Models that cannot be merged together (skeleton mismatch, head clash).
struct IncompatibilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigurationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OptimizationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace gnnmerge
