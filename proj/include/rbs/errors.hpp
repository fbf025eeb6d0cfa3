#pragma once

#include <stdexcept>
#include <string>

namespace rbs {

// Base for every error raised by the library. The CLI maps NumericFault to
// exit code 3 and everything else to exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

class InvalidSpec : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

class DomainError : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

class RangeError : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

class RankError : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class CalibrationFailure : public Error {
public:
    CalibrationFailure(const std::string& what, double lo, double hi)
        : Error(what), lo_(lo), hi_(hi) {}

    double bracket_lo() const { return lo_; }
    double bracket_hi() const { return hi_; }

private:
    double lo_;
    double hi_;
};

class NumericFault : public Error {
public:
    using Error::Error;
};

}  // namespace rbs
