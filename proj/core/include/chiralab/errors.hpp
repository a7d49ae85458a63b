#pragma once

#include <stdexcept>
#include <string>

namespace chiralab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad argument value (out of range, wrong magnitude, ...).
struct ParameterError : Error {
    using Error::Error;
};

/// Input too small for the requested stencil / index set.
struct DimensionError : Error {
    using Error::Error;
};

/// Hard-constraint violation (e.g. spin off the admissible circle set).
struct ConstraintError : Error {
    using Error::Error;
};

/// Invalid run configuration; raised before any output is produced.
struct ConfigError : Error {
    using Error::Error;
};

/// Malformed input file; carries the 1-based line number.
struct ParseError : Error {
    int line;
    ParseError(const std::string& msg, int line_)
        : Error(msg + " (line " + std::to_string(line_) + ")"), line(line_) {}
};

}  // namespace chiralab
