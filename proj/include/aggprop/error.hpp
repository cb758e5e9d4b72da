#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace aggprop {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input data that violates a documented precondition (bad config, label
/// coverage, unknown model name, mismatched dimensions).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Malformed text input. Carries the 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line)
    {
    }

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// File-system or stream failure.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace aggprop
