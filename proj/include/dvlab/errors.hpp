#pragma once

#include <stdexcept>
#include <string>

namespace dvlab {

/// Invalid argument or violated precondition. Maps to CLI exit code 2.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed input file (bad magic, bad schema). Also exit code 2.
class FormatError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Filesystem failure or truncated input. Maps to CLI exit code 1.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Iterative numerical method failed to converge.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace dvlab
