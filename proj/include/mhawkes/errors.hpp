#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mhawkes {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter or argument violates its documented bounds.
class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// A time or index lies outside the admissible range.
class RangeError : public Error {
public:
    using Error::Error;
};

/// The branching structure is not stationary (spectral radius >= 1).
class NonstationaryError : public Error {
public:
    using Error::Error;
};

/// Input is too small or too degenerate for the requested computation.
class DegenerateError : public Error {
public:
    using Error::Error;
};

/// A price path is too short for the requested sampling scales.
class InsufficientData : public Error {
public:
    using Error::Error;
};

/// The log-likelihood is undefined (a nonpositive intensity at an event).
class InvalidLikelihood : public Error {
public:
    using Error::Error;
};

/// Simulated intensity exceeded the blow-up guard.
class ExplosionError : public Error {
public:
    ExplosionError(const std::string& what, double time_reached)
        : Error(what), time_reached_(time_reached) {}
    [[nodiscard]] double time_reached() const noexcept { return time_reached_; }

private:
    double time_reached_;
};

/// Quote or event data failed an integrity check.
class DataIntegrityError : public Error {
public:
    using Error::Error;
};

/// Malformed input text; carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace mhawkes
