#pragma once

#include <stdexcept>
#include <string>

namespace cvgauss {

/// Malformed input: bad shape, non-finite entries, out-of-range parameters.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A covariance matrix that violates the uncertainty principle (or is not
/// positive definite) was passed to an operation that needs a physical state.
class UnphysicalState : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// File-format and I/O failures.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace cvgauss
