#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ncs {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A state outside the closed interval a model is defined on.
class DomainError : public Error {
public:
    DomainError(double x, double lo, double hi, const std::string& what_fn);

    double value() const noexcept { return value_; }
    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }

private:
    double value_;
    double lo_;
    double hi_;
};

/// A model evaluation produced NaN or infinity.
class NonFiniteError : public Error {
public:
    using Error::Error;
};

/// An RK4 stage state left the domain. Stages are numbered 1..4.
class IntegrationDomainError : public DomainError {
public:
    IntegrationDomainError(int stage, const DomainError& cause);

    int stage() const noexcept { return stage_; }

private:
    int stage_;
};

class CalibrationError : public Error {
public:
    using Error::Error;
};

/// Calibration produced |gamma| >= 1.
class GammaOutOfRange : public CalibrationError {
public:
    explicit GammaOutOfRange(double raw);

    double raw() const noexcept { return raw_; }

private:
    double raw_;
};

class ControllerOverflow : public Error {
public:
    using Error::Error;
};

/// A trace-driven loss model ran past its end without wrap enabled.
class TraceExhausted : public Error {
public:
    TraceExhausted(std::size_t index, std::size_t length);
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace ncs
