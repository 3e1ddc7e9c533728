#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spinstab/cones.hpp"
#include "spinstab/report.hpp"
#include "spinstab/spectra.hpp"

namespace spinstab {

struct VerifyOptions {
    Tolerances tol;
    bool parallel = true;  // one job per M sector
};

SolverOptions solver_options(const Tolerances& t);
ErgodicityOptions ergodicity_options(const Tolerances& t);

// Twice the ground-state spin the model's theorem predicts; nullopt when no
// theorem applies (e.g. Hubbard away from half filling).
std::optional<int> predicted_two_s(const ModelSpec& spec);

// Each runs validate() first and throws ValidationError with the first
// failing condition and its witness. A model outside the class is also a
// ValidationError.
GroundStateReport verify_mlm_class(const ModelSpec& spec, const VerifyOptions& opt = {});
GroundStateReport verify_nt_class(const ModelSpec& spec, const VerifyOptions& opt = {});
GroundStateReport verify_kondo(const ModelSpec& spec, const VerifyOptions& opt = {});
// Dispatch on spec.model.
GroundStateReport verify_model(const ModelSpec& spec, const VerifyOptions& opt = {});

// Ground energy, degeneracy and spin over all sectors, no validation or cones.
struct SpectralSummary {
    std::vector<int> two_m;
    std::vector<double> sector_e0;
    double e0 = 0;
    int degeneracy = 0;
    std::optional<int> two_s;
    double spin_residual = 0;
};
SpectralSummary spectral_summary(const ModelSpec& spec, const VerifyOptions& opt = {});

struct PairReport {
    std::string relation;  // "Q", "phonon-vacuum" or "nesting"
    GroundStateReport a, b;
    int two_m = 0;
    double overlap = 0;       // <P psi_A | psi_B> after gauge fixing
    bool projected_in_cone = false;
    std::optional<NestingCheck> nesting;
    std::vector<Check> checks;
    std::string verdict;
    Tolerances tolerances;
    std::vector<std::pair<std::string, double>> timings;
};

// Supported pairs: (hubbard, mlm | heisenberg) on one lattice via the
// single-occupancy projection Q; (holstein_hubbard, hubbard) on one lattice
// via the phonon vacuum; and a nesting (same model among mlm, heisenberg,
// hubbard, hubbard_nt) of b's lattice into a's through site_map. Anything
// else is a ValidationError.
PairReport verify_stability_pair(const ModelSpec& a, const ModelSpec& b, const std::vector<int>& site_map = {},
                                 const VerifyOptions& opt = {});
Json to_json(const PairReport& r);

// Couplings from which a model is instantiated on every family member.
struct ModelTemplate {
    ModelId model = ModelId::heisenberg;
    double t = 1.0, u = 4.0, j = 1.0, g = 0.0, omega = 1.0, kondo_j = 1.0;
    int n_max = 6;
};
ModelSpec instantiate(const ModelTemplate& tpl, const Graph& g);

struct ScanEntry {
    int n = 0;
    int sites = 0;
    int imbalance = 0;
    std::string ratio;            // imbalance / |Lambda| as a reduced fraction
    double ratio_value = 0;
    std::optional<int> two_s_predicted;
    std::optional<int> two_s;     // computed, when diagonalized
    double e0 = 0;
    std::size_t dim = 0;          // lowest-|M| sector
    std::size_t nnz_bound = 0;
    bool diagonalized = false;
    bool passed = true;
    std::string note;
};

struct ScanReport {
    LatticeFamily family;
    ModelTemplate model;
    std::vector<ScanEntry> entries;
    std::string verdict;
    Tolerances tolerances;
    std::vector<std::pair<std::string, double>> timings;
};

// Members whose nonzero bound exceeds max_nnz are counting-only entries.
ScanReport magnetic_order_scan(const LatticeFamily& family, const ModelTemplate& tpl, int n_min, int n_max,
                               const VerifyOptions& opt = {}, std::size_t max_nnz = 1000000);
Json to_json(const ScanReport& r);

// vertex v becomes perm[v]; couplings follow.
ModelSpec relabel_spec(const ModelSpec& spec, const std::vector<int>& perm);

struct InvarianceReport {
    ModelSpec spec;
    std::vector<int> perm;
    SpectralSummary original, relabeled;
    double max_energy_difference = 0;
    std::string verdict;
    Tolerances tolerances;
    std::vector<std::pair<std::string, double>> timings;
};
InvarianceReport isomorphism_invariance(const ModelSpec& spec, const std::vector<int>& perm,
                                        const VerifyOptions& opt = {});
Json to_json(const InvarianceReport& r);

// Same lattice, several admissible coupling choices: identical S expected.
struct ConstancyReport {
    std::vector<GroundStateReport> runs;
    bool constant = false;
    std::string verdict;
};
ConstancyReport constancy_check(const std::vector<ModelSpec>& variants, const VerifyOptions& opt = {});

struct ConvergenceEntry {
    int n_max = 0;
    double e0 = 0;
    int degeneracy = 0;
    std::optional<int> two_s;
    std::string verdict;
};
struct ConvergenceReport {
    std::vector<ConvergenceEntry> entries;
    // |E0(n) - E0(n + 2)| for every cutoff pair two apart
    std::vector<std::pair<int, double>> deltas;
    bool spin_stable = false;
    bool converged = false;
    std::string verdict;
};
ConvergenceReport convergence_sweep(const ModelSpec& spec, const std::vector<int>& cutoffs,
                                    const VerifyOptions& opt = {});

}  // namespace spinstab
