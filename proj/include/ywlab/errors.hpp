#pragma once

#include <stdexcept>
#include <string>

namespace ywlab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Index or parameter outside its admissible range.
class RangeError : public Error {
public:
    using Error::Error;
};

/// Malformed input data (grids, paths, time changes).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Bad or incomplete configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Two objects that must share structure (ladders, bundles) do not.
class IncompatibleError : public Error {
public:
    using Error::Error;
};

/// A measure integral required by an operation is not finite.
class IntegrabilityError : public Error {
public:
    using Error::Error;
};

/// Configuration that is well formed but not supported by an operation.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

/// Byte stream could not be decoded into a bundle.
class DecodeError : public Error {
public:
    using Error::Error;
};

/// Failure of the machinery around a check (I/O, round trips), as opposed
/// to a failed verdict.
class InfrastructureError : public Error {
public:
    using Error::Error;
};

/// The time stepper produced a non-finite state.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, double blow_up_time)
        : Error(what), blow_up_time_(blow_up_time) {}

    double blow_up_time() const noexcept { return blow_up_time_; }

private:
    double blow_up_time_;
};

}  // namespace ywlab
