#pragma once

#include <stdexcept>
#include <string>

namespace ssb {

// Precondition violations on user-supplied values (bad geometry, bad grid,
// mismatched lengths).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical routine failed to reach its stopping criterion.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A symmetry diagnostic cannot produce a verdict (operator does not commute,
// eigenspace not invariant, collinear pair).
class SymmetryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ssb
