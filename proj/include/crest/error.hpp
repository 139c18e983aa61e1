#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace crest {

// Base for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Tensor/layer dimension mismatch. Messages always carry both shapes.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Invalid argument value (non-positive size, bad sigma, ...).
class ArgumentError : public Error {
public:
    using Error::Error;
};

// File and parse failures.
class IoError : public Error {
public:
    using Error::Error;
};

// Structurally parseable input whose declared contents are inconsistent.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Non-finite values where finite ones are required.
class NumericError : public Error {
public:
    using Error::Error;
};

// Training diverged (loss went NaN/Inf). Carries the loss trace up to the
// failure so callers can inspect or roll back.
class DivergenceError : public NumericError {
public:
    DivergenceError(const std::string& msg, std::vector<double> trace)
        : NumericError(msg), loss_trace(std::move(trace)) {}

    std::vector<double> loss_trace;
};

}  // namespace crest
