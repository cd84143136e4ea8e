#pragma once

#include <stdexcept>
#include <string>

namespace trackdens {

/// Bad user-facing input: missing files, malformed records, invalid config.
/// The CLI maps this family to exit code 2.
class input_error : public std::runtime_error {
public:
    explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Record-level parse failure; carries the 1-based line number.
class parse_error : public input_error {
public:
    parse_error(const std::string& msg, std::size_t line)
        : input_error(msg + " (line " + std::to_string(line) + ")"), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Numerical failure inside a fit or solve. CLI exit code 3.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace trackdens
