#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spinstab/operators.hpp"

namespace spinstab {

inline constexpr std::size_t kDenseThreshold = 4096;

struct Spectrum {
    Vec values;     // ascending
    Dense vectors;  // columns
};

// Full spectrum; SolverError above the threshold.
Spectrum dense_eigensolve(const SparseOperator& h, std::size_t threshold = kDenseThreshold);

struct LanczosOptions {
    std::uint64_t seed = 20240607;
    int max_restarts = 400;
    int krylov_dim = 40;
    double tol = 1e-8;  // residual, relative to max(1, |theta|)
};

struct Eigenpairs {
    Vec values;
    Dense vectors;
    Vec residuals;
    int restarts = 0;
};

// Lowest k pairs, one at a time with deflation against the converged ones.
Eigenpairs lanczos_ground(const SparseOperator& h, int k, const LanczosOptions& opt = {});

struct SolverOptions {
    std::size_t dense_threshold = kDenseThreshold;
    double degeneracy_tol = 1e-7;
    int max_multiplicity = 64;
    LanczosOptions lanczos;
};

struct GroundSpace {
    double energy = 0;
    int multiplicity = 0;
    Dense vectors;
    Vec residuals;
    double tolerance = 0;
    // distance to the first level outside the cluster; negative when the
    // cluster exhausts the space
    double gap = -1;
    std::string method;
};

GroundSpace ground_space(const SparseOperator& h, const SolverOptions& opt = {});

struct SpinValue {
    int two_s;
    double expectation;  // <psi|S^2|psi>
    double residual;     // ||S^2 psi - S(S+1) psi||
};

inline constexpr double kSpinResidualTol = 1e-6;

// SpinMixtureError if psi is not an S^2 eigenvector to kSpinResidualTol.
SpinValue total_spin_of(const Vec& psi, const SparseOperator& s2);

// Rotates an orthonormal set into S^2 eigenvectors and returns their spins.
std::vector<SpinValue> resolve_spins(Dense& vectors, const SparseOperator& s2);

}  // namespace spinstab
