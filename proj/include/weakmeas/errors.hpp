// Exception types shared across the library.
#pragma once

#include <stdexcept>
#include <string>

namespace weakmeas {

/// Input matrix (or record) carries no usable signal, e.g. a numerically
/// zero matrix handed to a polar decomposition.
struct DegenerateInputError : std::domain_error {
    explicit DegenerateInputError(const std::string& what) : std::domain_error(what) {}
};

/// A conditioning step was asked to realize an outcome of probability ~0.
/// Signals a mismatch between the sampler and the propagator table.
struct ImpossibleOutcomeError : std::runtime_error {
    explicit ImpossibleOutcomeError(const std::string& what) : std::runtime_error(what) {}
};

/// Requested a configuration the engine deliberately does not support
/// (e.g. the record-conditioned 4x4 propagator away from beta = 0).
struct UnsupportedConfigError : std::invalid_argument {
    explicit UnsupportedConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Config file rejected: parse error, unknown key, or out-of-range value.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace weakmeas
