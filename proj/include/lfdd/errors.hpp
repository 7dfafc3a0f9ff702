#pragma once

#include <stdexcept>
#include <string>

namespace lfdd {

// Bad argument to a library function (index out of range, inadmissible
// material, grid too small, ...).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Configuration rejected before any computation. `path` names the offending
// field in dotted form ("time.dt").
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string path, const std::string& message)
        : std::runtime_error(path.empty() ? message : path + ": " + message),
          path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

// Non-finite values, failed factorizations. `step` is the time step index
// when raised from a time loop, -1 otherwise.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& message, long step = -1)
        : std::runtime_error(message), step_(step) {}
    long step() const noexcept { return step_; }

private:
    long step_;
};

}  // namespace lfdd
