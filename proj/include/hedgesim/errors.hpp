#pragma once

#include <stdexcept>
#include <string>

namespace hedgesim {

// Caller passed a value outside the documented domain of an operation.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Run configuration is malformed or exceeds resource limits.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A bookkeeping identity that must hold by construction was broken.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Requested diagnostic needs data the run did not retain.
class UnavailableError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InfeasibleError : public std::runtime_error {
public:
    InfeasibleError(const std::string& what, int period)
        : std::runtime_error(what), period_(period) {}

    // Earliest delivery period (0-based, relative to the solved horizon)
    // at which the terminal level can no longer be reached.
    int period() const noexcept { return period_; }

private:
    int period_;
};

}  // namespace hedgesim
