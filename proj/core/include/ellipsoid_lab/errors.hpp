#pragma once

#include <stdexcept>
#include <string>

namespace ellipsoid_lab {

/// Caller violated a documented precondition (bad dimensions, non-finite
/// input, unsupported option). The CLI maps this to exit code 2.
class UsageError : public std::invalid_argument {
public:
    explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

/// Input is well-formed but numerically degenerate (e.g. a zero vector that
/// has no direction).
class DegenerateInputError : public std::runtime_error {
public:
    explicit DegenerateInputError(const std::string& what) : std::runtime_error(what) {}
};

/// File could not be opened, written or parsed.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ellipsoid_lab
