#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bipcomm {

/// Bad or inconsistent user input: malformed files, invalid parameters.
/// The CLI maps it to exit code 1.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed row in a delimited file.
class ParseError : public InputError {
public:
    ParseError(const std::string& path, std::size_t line, const std::string& what)
        : InputError(path + ":" + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// An internal invariant failed (e.g. a BRIM step lowered modularity).
/// The CLI maps it to exit code 2.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace bipcomm
