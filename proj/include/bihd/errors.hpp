#pragma once

#include <stdexcept>
#include <string>

namespace bihd {

// Bad argument to a library call (dimension mismatch, empty input, ...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Inconsistent model or training configuration (e.g. D not divisible by heads).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or unusable input data (parse errors, label range, empty split).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Model and data disagree on N, L or K.
class ShapeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A precondition on internal state was violated (e.g. a stale training tape).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace bihd
