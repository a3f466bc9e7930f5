#pragma once

#include <stdexcept>
#include <string>

namespace supercal {

// Bad structural input: mismatched dimensions, malformed indices, unparsable text.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A declared mathematical hypothesis failed a spot check (convexity, positivity,
// orthonormality of a mesh frame, ...). Carries a short machine-readable witness.
class HypothesisError : public std::runtime_error {
public:
    HypothesisError(const std::string& what, std::string witness = {})
        : std::runtime_error(what), witness_(std::move(witness)) {}
    const std::string& witness() const { return witness_; }

private:
    std::string witness_;
};

// Evaluation requested where the expression is singular (poles, log at 0).
class SingularPointError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A limit / refinement sequence did not settle inside its budget.
class NonConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace supercal
