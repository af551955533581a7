#pragma once

#include <stdexcept>
#include <string>

namespace mfbo {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration (bad field values, impossible budgets, unknown keys).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Problems with external data (missing files, malformed CSV cells).
class DataError : public Error {
public:
    using Error::Error;
};

/// Surrogate fitting failed (non-PD kernel matrix past the jitter cap).
class FitError : public Error {
public:
    using Error::Error;
};

/// A discrete search space ran out of admissible (candidate, fidelity) pairs.
class ExhaustedError : public Error {
public:
    using Error::Error;
};

/// Regret alignment could not place a high-fidelity point at the first budget step.
class AlignmentError : public Error {
public:
    using Error::Error;
};

} // namespace mfbo
