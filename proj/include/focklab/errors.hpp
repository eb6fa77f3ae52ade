#pragma once

#include <stdexcept>
#include <string>

namespace focklab {

// Error taxonomy. The CLI maps these onto exit codes, so keep the
// hierarchy flat and the categories stable.

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A Fock index or requested photon number lies outside the truncation.
struct CutoffViolationError : Error {
    using Error::Error;
};

/// Zero vectors, empty mode sets, non-states and similar degenerate inputs.
struct DegenerateInputError : Error {
    using Error::Error;
};

/// The requested tensor/joint space would exceed the dimension ceiling.
struct DimensionCeilingError : Error {
    using Error::Error;
};

/// Accumulated truncation weight crossed the configured budget.
struct TailBudgetError : Error {
    int step = -1;
    TailBudgetError(const std::string& what, int step_index)
        : Error(what), step(step_index) {}
};

/// Phase-space grid does not enclose the support of the integrand.
struct GridError : Error {
    using Error::Error;
};

/// Operation needs a state in the Williamson frame (per-mode diagonal
/// covariance) and the input is not.
struct UnsupportedFrameError : Error {
    using Error::Error;
};

/// Bad experiment configuration (CLI exit code 2).
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace focklab
