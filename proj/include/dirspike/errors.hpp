#pragma once

#include <stdexcept>
#include <string>

namespace dirspike {

// Caller violated a documented precondition (dimension mismatch, dt too
// large, empty grid, ...). Maps to CLI exit code 2.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Malformed or inconsistent configuration file. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Any failure of the numerics themselves. Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Integration produced a non-finite or runaway state.
class BlowupError : public NumericalError {
public:
    BlowupError(const std::string& what, double time)
        : NumericalError(what + " (t=" + std::to_string(time) + ")"), time_(time) {}

    [[nodiscard]] double time() const noexcept { return time_; }

private:
    double time_;
};

}  // namespace dirspike
