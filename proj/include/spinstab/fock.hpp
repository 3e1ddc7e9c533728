#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "spinstab/lattice.hpp"

namespace spinstab {

enum class Spin : int { up = 0, down = 1 };
enum class Species : int { c = 0, f = 1 };

struct Mode {
    int site;
    Spin spin;
    Species species = Species::c;
};

// Occupation masks over sites plus a packed phonon configuration.
// phonon = sum_x occ_x (n_max+1)^(L-1-x), so ordering by code is
// lexicographic in (occ_0, occ_1, ...).
struct BasisState {
    std::uint64_t up = 0;
    std::uint64_t down = 0;
    std::uint64_t f_up = 0;
    std::uint64_t f_down = 0;
    std::uint64_t phonon = 0;

    std::uint64_t mask(Species sp, Spin s) const;
    std::uint64_t& mask(Species sp, Spin s);

    auto key() const { return std::tie(up, down, f_up, f_down, phonon); }
    bool operator<(const BasisState& o) const { return key() < o.key(); }
    bool operator==(const BasisState& o) const { return key() == o.key(); }
    bool operator!=(const BasisState& o) const { return !(*this == o); }
};

// Site-major, up before down, c before f.
struct SpinOrbitalOrder {
    bool with_f = false;
    int index(const Mode& m) const;
    // occupied orbitals strictly before m
    int preceding(const BasisState& s, const Mode& m) const;
};

enum class Subspace { Full, SingleOccupancy, OneHoleNoDouble, Kondo };

struct SubspaceKind {
    Subspace kind = Subspace::Full;
    std::optional<int> phonon_cutoff;  // n_max, phonon-coupled models only
};

std::string subspace_name(Subspace s);

struct SignedIndex {
    std::size_t index;
    int sign;
};

// Ordered basis of a fixed subspace. N and two_m may be unset, in which
// case the basis is the union over that quantum number (used for
// operators that change M, and for whole-Fock-space identities).
class SectorBasis {
public:
    SectorBasis(int sites, SubspaceKind kind, std::optional<int> n, std::optional<int> two_m,
                std::vector<BasisState> electronic);

    int sites() const { return sites_; }
    const SubspaceKind& kind() const { return kind_; }
    std::optional<int> particle_number() const { return n_; }
    std::optional<int> two_m() const { return two_m_; }
    SpinOrbitalOrder order() const { return {kind_.kind == Subspace::Kondo}; }
    bool has_phonons() const { return kind_.phonon_cutoff.has_value(); }
    int phonon_cutoff() const { return kind_.phonon_cutoff.value_or(0); }

    std::size_t size() const { return electronic_.size() * phonon_dim_; }
    std::size_t electronic_size() const { return electronic_.size(); }
    std::size_t phonon_dim() const { return phonon_dim_; }
    const std::vector<BasisState>& electronic() const { return electronic_; }

    BasisState state(std::size_t i) const;
    std::optional<std::size_t> index_of(const BasisState& s) const;

    int phonon_occ(const BasisState& s, int site) const;
    // nullopt if the new occupation is outside [0, n_max]
    std::optional<BasisState> with_phonon(const BasisState& s, int site, int occ) const;

private:
    int sites_;
    SubspaceKind kind_;
    std::optional<int> n_, two_m_;
    std::vector<BasisState> electronic_;  // sorted
    std::size_t phonon_dim_ = 1;
    std::vector<std::uint64_t> radix_;  // (n_max+1)^(L-1-x)
};

// N and two_m as in SectorBasis; passing both sets a single sector.
SectorBasis enumerate_sector(const Graph& g, SubspaceKind kind, std::optional<int> n, std::optional<int> two_m);
SectorBasis enumerate_sector(int sites, SubspaceKind kind, std::optional<int> n, std::optional<int> two_m);
// Whole fermionic Fock space on the graph (all N, all M).
SectorBasis enumerate_fock(int sites);

std::optional<std::pair<BasisState, int>> apply_annihilation(const BasisState& s, const Mode& m,
                                                             const SpinOrbitalOrder& order);
std::optional<std::pair<BasisState, int>> apply_creation(const BasisState& s, const Mode& m,
                                                         const SpinOrbitalOrder& order);

struct FermionOp {
    Mode mode;
    bool dagger;
};

// Product of operators as written left to right, applied to s from the right.
std::optional<std::pair<BasisState, int>> apply_string(const BasisState& s, const std::vector<FermionOp>& ops,
                                                       const SpinOrbitalOrder& order);

// twice S^(3), summed over c and f species
int magnetization(const BasisState& s);
int particle_count(const BasisState& s);

// Vertex v of a (possibly doubled) graph carried by the orbital pair
// (site, species). Plain lattices: identity with species c.
struct VertexModes {
    std::vector<std::pair<int, Species>> vertex;
    int size() const { return int(vertex.size()); }
    static VertexModes plain(int sites);
    // vertex 2x -> (x, c), 2x+1 -> (x, f)
    static VertexModes kondo(int sites);
};

// |X, Y> = (-1)^{|Ybar & B|} [prod' a*_{x up}] [prod'_{y in Ybar} a_{y down}] |omega>,
// |omega> = (-1)^{|B|} [prod'_v a*_{v down}] |0>.  Masks are over vertices.
// Returns the occupation state (up at X, down at Y) and the sign of the
// vector relative to that canonical state.
std::pair<BasisState, int> distinguished_state(const VertexModes& vm, std::uint64_t b_mask, std::uint64_t x_mask,
                                               std::uint64_t y_mask, bool with_f);

// |X, Xbar> located in a SingleOccupancy basis.
SignedIndex mlm_basis_vector(const SectorBasis& basis, const Bipartition& bip, std::uint64_t x_mask);

// |sigma> = a_{h, up} [prod'_x a*_{x sigma_x}] |0>, with sigma_h read as up.
std::pair<BasisState, int> nt_state(const SpinConfig& sigma);
SignedIndex nt_basis_vector(const SectorBasis& basis, const SpinConfig& sigma);
SpinConfig nt_config_of(const BasisState& s, int sites);

}  // namespace spinstab
