#pragma once

#include <stdexcept>
#include <string>

namespace spinstab {

// Input that cannot be parsed (config text, graph files, shorthands).
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A model or sector that violates a precondition of the requested check.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Eigensolver did not deliver the requested accuracy.
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A vector that is not an eigenvector of S^2 (a mixed multiplet).
struct SpinMixtureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace spinstab
