#pragma once

#include <stdexcept>
#include <string>

namespace sqz {

// Base class for all library failures. The CLI maps subtypes to exit codes:
// ConfigError -> 1, DomainError/ModelError/FitError -> 2, IoError -> 3.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what_arg) : std::runtime_error(what_arg) {}
};

// A numeric precondition was violated (non-finite input, argument outside
// its stated range).
class DomainError : public Error {
public:
    using Error::Error;
};

// Inputs are individually valid but describe a non-physical state: pump at
// or above threshold, a measurement below the circuit noise floor, an
// efficiency outside (0, 1].
class ModelError : public Error {
public:
    using Error::Error;
};

// A regression failed: underdetermined data, unidentifiable parameter, or
// no convergence within the iteration budget (in which case the last
// iterate is carried along).
class FitError : public Error {
public:
    explicit FitError(const std::string& what_arg) : Error(what_arg) {}
    FitError(const std::string& what_arg, double last)
        : Error(what_arg), last_iterate(last), has_last_iterate(true) {}

    double last_iterate = 0.0;
    bool has_last_iterate = false;
};

// Configuration or measurement-table parse/validation failure. Messages name
// the offending key or the file:line position.
class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace sqz
