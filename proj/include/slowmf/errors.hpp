#pragma once

#include <stdexcept>
#include <string>

namespace slowmf {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad configuration: inconsistent grid, missing window, unknown key.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Step size too coarse for the requested scale.
class ResolutionError : public ConfigError {
public:
    ResolutionError(const std::string& what, double required_dt)
        : ConfigError(what), required_dt_(required_dt) {}
    double required_dt() const noexcept { return required_dt_; }

private:
    double required_dt_;
};

/// Time or index outside the stored window.
class RangeError : public Error {
public:
    using Error::Error;
};

/// Non-finite or degenerate inputs.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A modelling assumption required by the operation does not hold.
class AssumptionError : public Error {
public:
    using Error::Error;
};

/// Non-finite state during time stepping.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, double time)
        : Error(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

/// Iteration budget exhausted before the tolerance was met.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double last_ratio)
        : Error(what), last_ratio_(last_ratio) {}
    double last_ratio() const noexcept { return last_ratio_; }

private:
    double last_ratio_;
};

}  // namespace slowmf
