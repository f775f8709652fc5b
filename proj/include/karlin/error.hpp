#pragma once

#include <stdexcept>
#include <string>

namespace karlin {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Input would exceed a combinatorial budget (pattern enumeration over 2^d sets).
class CapacityError : public std::length_error {
public:
    using std::length_error::length_error;
};

/// Memory or size budget exceeded.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A sampler hit its iteration cap before its stopping rule fired.
class IterationCapError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace karlin
