#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace walkrec {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller passed arguments that violate an operation's preconditions.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent input data. Carries the file and 1-based line
/// when the problem was found while parsing.
class DataError : public Error {
public:
    explicit DataError(const std::string& message) : Error(message) {}
    DataError(const std::string& file, std::size_t line, const std::string& message)
        : Error(file + ":" + std::to_string(line) + ": " + message), file_(file), line_(line) {}

    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string file_;
    std::size_t line_ = 0;
};

} // namespace walkrec
