#pragma once

#include <stdexcept>
#include <string>

namespace sentrade {

/// Base for every recoverable failure raised by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or unusable input (files, config). Maps to exit code 1.
class InputError : public Error {
public:
    using Error::Error;
};

class FormatError : public InputError {
public:
    using InputError::InputError;
};

class ConflictError : public InputError {
public:
    using InputError::InputError;
};

class RangeError : public InputError {
public:
    using InputError::InputError;
};

class DuplicateError : public InputError {
public:
    using InputError::InputError;
};

class ConfigError : public InputError {
public:
    using InputError::InputError;
};

/// A return window needed for labeling is incomplete.
class MissingReturns : public Error {
public:
    using Error::Error;
};

/// Estimation failures. Maps to exit code 2.
class NumericalError : public Error {
public:
    using Error::Error;
};

class CollinearityError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ConvergenceError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace sentrade
