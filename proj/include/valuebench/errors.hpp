#pragma once

#include <stdexcept>
#include <string>

namespace valuebench {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Data violates a documented invariant; message names the offending record.
struct InvariantError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BackendError : std::runtime_error {
    bool retryable;
    explicit BackendError(const std::string& msg, bool retryable_ = false)
        : std::runtime_error(msg), retryable(retryable_) {}
};

// The endpoint cannot echo per-token logprobs; caller should fall back to
// the two-call difference strategy.
struct EchoUnsupportedError : BackendError {
    explicit EchoUnsupportedError(const std::string& msg) : BackendError(msg, false) {}
};

struct DegenerateVarianceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InsufficientPairsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace valuebench
