#pragma once

#include <stdexcept>
#include <string>

namespace qbath {

// Two families: configuration/validation problems (bad input) and numeric
// failures (valid input that the model cannot handle). The CLI maps them to
// distinct exit codes.

class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidSpec : public InputError {
public:
    using InputError::InputError;
};

class DomainError : public InputError {
public:
    using InputError::InputError;
};

class ConfigError : public InputError {
public:
    using InputError::InputError;
};

class GridMismatch : public InputError {
public:
    using InputError::InputError;
};

class OverdampedUnsupported : public InputError {
public:
    using InputError::InputError;
};

class StepTooLarge : public InputError {
public:
    using InputError::InputError;
};

class OverCoupling : public NumericError {
public:
    using NumericError::NumericError;
};

class NonPositiveMode : public NumericError {
public:
    using NumericError::NumericError;
};

class CholeskyFailure : public NumericError {
public:
    using NumericError::NumericError;
};

class NegativeXiSq : public NumericError {
public:
    using NumericError::NumericError;
};

class DegenerateSignal : public NumericError {
public:
    using NumericError::NumericError;
};

class NoConvergence : public NumericError {
public:
    using NumericError::NumericError;
};

}  // namespace qbath
