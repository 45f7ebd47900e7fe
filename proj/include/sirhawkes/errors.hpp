#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sirhawkes {

// Parameter outside the admissible domain of a kernel or model.
class ParameterDomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Hazard requested where the kernel has already decayed to zero.
class SingularHazardError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Marked branching factor with rho >= alpha - 1.
class DivergentBranchingError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Operation called with inputs violating its precondition.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class InsufficientSampleError : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

// Malformed input file; row is 1-based and counts the header line.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t row, const std::string& what)
        : std::runtime_error("row " + std::to_string(row) + ": " + what), row_(row) {}

    [[nodiscard]] std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sirhawkes
