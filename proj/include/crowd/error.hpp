#pragma once

#include <stdexcept>
#include <string>

namespace crowd {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameters, contradictory boundary data, malformed input.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// An iterative solver did not reach its tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Non-finite values, singular systems and similar numerical failures.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace crowd
