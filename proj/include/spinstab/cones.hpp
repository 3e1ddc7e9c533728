#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spinstab/hamiltonians.hpp"

namespace spinstab {

using CVec = Eigen::VectorXcd;

inline constexpr double kStrictTol = 1e-10;

enum class ConeKind { Diagonal, PSDMatrix };

// Self-dual cone on the span of a basis. Basis state i carries the
// distinguished vector sign[i] * e_i. For PSDMatrix cones the coefficient
// sign[i] * psi[i] is entry (row[i], col[i]) of the square array `block[i]`;
// the full array is block diagonal (zero padded between blocks).
struct Cone {
    ConeKind kind = ConeKind::Diagonal;
    std::string name;
    BasisPtr basis;
    std::vector<int> sign;
    std::vector<int> block, row, col;
    std::vector<int> block_size;
    std::vector<std::size_t> transpose;  // index of (block, col, row)
    Vec order_unit;                      // occupation coordinates

    std::size_t dim() const { return sign.size(); }
};

// Diagonal cones
Cone mlm_cone(const BasisPtr& basis, const Bipartition& bip);
Cone nt_cone(const BasisPtr& basis);
// PSD cones: half-filled Hubbard (rows X, columns Y of |X, Ybar>) and the
// Kondo space read as a Hubbard system on the doubled lattice, restricted to
// singly occupied f orbitals (one block per f configuration).
Cone hubbard_cone(const BasisPtr& basis, const Bipartition& bip);
Cone kondo_cone(const BasisPtr& basis, const Bipartition& doubled_bip);

// Cone the model's theorem refers to; nullopt for phonon models (no cone on a
// truncated occupation space).
std::optional<Cone> model_cone(const ModelSpec& spec, const BasisPtr& basis);

// Coefficient arrays of psi, one per block.
std::vector<Dense> coefficient_blocks(const Vec& psi, const Cone& cone);
Vec from_blocks(const std::vector<Dense>& blocks, const Cone& cone);

struct Positivity {
    bool member = false;
    bool strict = false;
    double margin = 0;      // min coefficient (Diagonal) or min eigenvalue (PSD)
    double asymmetry = 0;   // PSD only: max |eta - eta^T|
    std::size_t witness = 0;  // index (Diagonal) or block (PSD) attaining the margin
};

Positivity positivity(const Vec& psi, const Cone& cone, double tol = kStrictTol);
bool membership(const Vec& psi, const Cone& cone, double tol = kStrictTol);
bool strict_positivity(const Vec& psi, const Cone& cone, double tol = kStrictTol);

// Multiply by the phase that makes <order_unit|psi> real positive; throws
// std::domain_error("gauge undefined") on a vanishing overlap.
Vec gauge_fix(const Vec& psi, const Cone& cone);
CVec gauge_fix(const CVec& psi, const Cone& cone);

// Componentwise conjugation in the distinguished basis (Diagonal) and
// conjugate transpose of the coefficient array (PSD).
CVec modular_conjugation(const CVec& psi, const Cone& cone);
Vec modular_conjugation(const Vec& psi, const Cone& cone);

struct PreservationOptions {
    double tol = 1e-12;
    int samples = 200;
    std::uint64_t seed = 20240607;
};

struct Verdict {
    bool holds = false;
    bool exhaustive = true;  // false for sampled checks
    double worst = 0;        // most negative value seen
    std::string witness;
    std::string mode;
};

// A maps the cone into itself: exact entry test for Diagonal cones, sampled
// <sigma, A rho> >= -tol for PSD cones.
Verdict positivity_preserving(const Dense& a, const Cone& cone, const PreservationOptions& opt = {});

// exp(-beta H) for symmetric H.
Dense semigroup(const Dense& h, double beta);

struct ErgodicityOptions {
    double tol = 1e-12;
    double strict_tol = kStrictTol;
    std::vector<double> betas{0.1, 1.0};
    PreservationOptions sampling;
    std::size_t dense_threshold = 4096;
};

struct Ergodicity {
    bool ergodic = false;
    std::string mode;  // "structural" or "consequence-verified"
    bool metzler = false;
    bool irreducible = false;
    double margin = 0;  // strict-positivity margin of the gauge-fixed ground vector
    std::string witness;
};

// Diagonal: Metzler sign structure + connected off-diagonal graph.
// PSD: unique ground vector, strictly positive after gauge fixing, and
// sampled positivity of exp(-beta H) for each beta.
Ergodicity ergodicity(const SparseOperator& h, const Cone& cone, const ErgodicityOptions& opt = {});

// exp(-beta (A - C)) >= exp(-beta A) entrywise in the distinguished basis.
// ValidationError unless exp(-beta A) and C are positivity preserving.
Verdict monotonicity_check(const Dense& a, const Dense& c, const Cone& cone, const std::vector<double>& betas,
                           double tol = 1e-12);

struct NestingCheck {
    bool embeds = false;       // extreme rays of the small cone land in the big one
    bool projects = false;     // extreme rays of the big cone project into the small one
    bool order_unit = false;   // P xi' strictly positive
    double order_unit_margin = 0;
    std::string witness;
    bool ok() const { return embeds && projects && order_unit; }
};

NestingCheck nesting_consistency(const Nesting& n, const Cone& small, const Cone& big, double tol = kStrictTol);
// Cones on the two bases of a nesting.
std::pair<Cone, Cone> nesting_cones(const Nesting& n, const Graph& small, const Graph& big);

}  // namespace spinstab
