// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace isac {

// Base for every error raised by the library. `kind()` is a stable
// machine-readable tag used by the CLI's error line.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "error"; }
};

// Caller broke a documented precondition (dimensions, ranges, symmetry).
class ContractViolation : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "contract_violation"; }
};

// Cholesky (or anything built on it) hit a non-positive pivot.
class DecompositionFailure : public Error {
public:
    DecompositionFailure(const std::string& what, std::size_t pivot)
        : Error(what + " (pivot " + std::to_string(pivot) + ")"), pivot_(pivot) {}
    std::size_t pivot() const noexcept { return pivot_; }
    const char* kind() const noexcept override { return "decomposition_failure"; }

private:
    std::size_t pivot_;
};

// No trade-off weight on the search grid meets the TX gain threshold.
class InfeasibleError : public Error {
public:
    InfeasibleError(const std::string& what, std::size_t stream)
        : Error(what + " (stream " + std::to_string(stream) + ")"), stream_(stream) {}
    std::size_t stream() const noexcept { return stream_; }
    const char* kind() const noexcept override { return "infeasible"; }

private:
    std::size_t stream_;
};

// MVDR steering vector vanished after analog combining.
class DegenerateSteering : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "degenerate_steering"; }
};

// MUSIC could not separate signal and noise subspaces.
class NoPeakError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "no_peak"; }
};

class ConfigError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "config_error"; }
};

// Wraps a module error raised inside one Monte Carlo trial; keeps the
// original kind and prefixes the trial index to the message.
class TrialFailure : public Error {
public:
    TrialFailure(const Error& cause, int trial)
        : Error("trial " + std::to_string(trial) + ": " + cause.what()), kind_(cause.kind()), trial_(trial) {}
    const char* kind() const noexcept override { return kind_.c_str(); }
    int trial() const noexcept { return trial_; }

private:
    std::string kind_;
    int trial_;
};

}  // namespace isac
