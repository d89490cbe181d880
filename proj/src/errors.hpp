#pragma once

#include <stdexcept>
#include <string>

namespace dra {

// Error taxonomy maps to CLI exit codes: data 4, protocol 3, non-convergence 2.

// Bad or missing values in an analytic dataset, degenerate outcomes.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad run configuration (unknown variable names, invalid parameter values).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exchange-contract violations: stale triggers, ghost manifest entries,
// label mismatches between partners, partner failure signals.
struct ProtocolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Trigger never appeared before the deadline.
struct TimeoutError : ProtocolError {
    using ProtocolError::ProtocolError;
};

// A partner signalled job_fail.ok.
struct WorkerFailed : ProtocolError {
    WorkerFailed(int dp_cd, const std::string& what)
        : ProtocolError(what), dp_cd(dp_cd) {}
    int dp_cd;
};

// Collinearity, negative variances, invalid dispersion.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// max_iter_nb exhausted without meeting XCONV.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace dra
