#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bi3 {

// Base class for every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File or stream could not be opened / read / written.
struct IoError : Error {
    using Error::Error;
};

// Input data is malformed (bad KEEL header, ragged CSV, unknown category, ...).
struct ParseError : Error {
    explicit ParseError(const std::string& message) : Error(message) {}
    ParseError(const std::string& message, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + message), line_number(line) {}

    std::size_t line_number = 0;
};

// An operation was invoked outside its documented domain.
struct PreconditionError : Error {
    using Error::Error;
};

// A per-instance statistic cannot be computed for this sample
// (e.g. the only minority sample of its dataset has no minority neighbor).
struct UnsupportedInstanceError : PreconditionError {
    using PreconditionError::PreconditionError;
};

// A rank correlation is undefined because one of the variables has zero
// rank variance.  Callers that aggregate many correlations catch this and
// flag the result instead of aborting.
struct UndefinedCorrelationError : PreconditionError {
    using PreconditionError::PreconditionError;
};

}  // namespace bi3
