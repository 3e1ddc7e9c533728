#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include "spinstab/fock.hpp"

namespace spinstab {

using Vec = Eigen::VectorXd;
using Dense = Eigen::MatrixXd;
using BasisPtr = std::shared_ptr<const SectorBasis>;

inline constexpr double kHermitianTol = 1e-12;

// Real sparse matrix between two bases. When `imaginary` is set the
// represented operator is i times the stored matrix.
class SparseOperator {
public:
    using Matrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

    SparseOperator() = default;
    // Throws if `hermitian` is claimed and the matrix is not hermitian to kHermitianTol.
    SparseOperator(Matrix m, BasisPtr rows, BasisPtr cols, bool hermitian = false, bool imaginary = false);

    const Matrix& matrix() const { return m_; }
    Eigen::Index rows() const { return m_.rows(); }
    Eigen::Index cols() const { return m_.cols(); }
    const BasisPtr& row_basis() const { return rows_; }
    const BasisPtr& col_basis() const { return cols_; }
    bool hermitian() const { return hermitian_; }
    bool imaginary() const { return imaginary_; }

    Dense dense() const { return Dense(m_); }
    Vec apply(const Vec& v) const { return m_ * v; }

    SparseOperator adjoint() const;
    SparseOperator scaled(double a) const;

private:
    Matrix m_;
    BasisPtr rows_, cols_;
    bool hermitian_ = false;
    bool imaginary_ = false;
};

// A*B, A+B and A-B with the imaginary flag tracked (i*i = -1). Sums
// require matching flags.
SparseOperator operator*(const SparseOperator& a, const SparseOperator& b);
SparseOperator operator+(const SparseOperator& a, const SparseOperator& b);
SparseOperator operator-(const SparseOperator& a, const SparseOperator& b);
SparseOperator commutator(const SparseOperator& a, const SparseOperator& b);
double max_abs(const SparseOperator& a);
double max_abs(const SparseOperator::Matrix& a);
bool is_hermitian(const SparseOperator::Matrix& a, double tol = kHermitianTol);

using Emit = std::function<void(const BasisState&, double)>;

// Builds <row| O |col> from a per-column action. Targets outside the row
// basis are dropped when `project` is set, and are an error otherwise.
SparseOperator assemble(const BasisPtr& rows, const BasisPtr& cols,
                        const std::function<void(const BasisState&, const Emit&)>& action, bool hermitian,
                        bool project = false);

BasisPtr share(SectorBasis b);

// Spin-carrying orbital pair (site, species).
struct SpinSite {
    int site;
    Species species = Species::c;
};

// S^(i)_x. For i = 1, 2 the basis must be closed under M changes (two_m unset).
// i = 2 returns the imaginary-marked operator.
SparseOperator spin_op(const BasisPtr& basis, int x, int i, Species sp = Species::c);
// S_a . S_b between two spin sites (each term once, hermitian).
SparseOperator spin_dot(const BasisPtr& basis, SpinSite a, SpinSite b);
// S_x . S_y on c orbitals; x == y is rejected.
SparseOperator heisenberg_bond(const BasisPtr& basis, int x, int y);
// Total spin over every spin site present in the basis (c, plus f for Kondo).
SparseOperator total_spin_squared(const BasisPtr& basis);
SparseOperator total_sz(const BasisPtr& basis);
// S^+ (to.two_m = from.two_m + 2) or S^- (to.two_m = from.two_m - 2).
SparseOperator ladder_op(const BasisPtr& from, const BasisPtr& to);

// sum_{x,y,sigma} t_xy c*_{x sigma} c_{y sigma}; `project` gives P H P.
SparseOperator hopping(const BasisPtr& basis, const Dense& t, bool project = false);
SparseOperator coulomb(const BasisPtr& basis, const Dense& u);
SparseOperator gutzwiller(const BasisPtr& basis);
SparseOperator number_op(const BasisPtr& basis, int x);

// c_{m} from `from` into `to` (dagger for creation).
SparseOperator fermion_op(const BasisPtr& from, const BasisPtr& to, const Mode& m, bool dagger);

// W |X, Ybar> = |X, Y), on any pair of bases closed under W.
SparseOperator hole_particle(const Graph& g, const BasisPtr& from, const BasisPtr& to);
// Q = prod_x (n_x - 1)^2 (diagonal).
SparseOperator hole_particle_target_projection(const BasisPtr& basis);

struct PhononOps {
    SparseOperator b, b_dag;
};
// Single-mode truncated ladder operators on span{|0>..|n_max>}.
PhononOps phonon_ops(int n_max);
// b*_x b_x and (b*_x + b_x) acting on a phonon-carrying basis.
SparseOperator phonon_number(const BasisPtr& basis, int x);
SparseOperator phonon_displacement(const BasisPtr& basis, int x);
// sum_{x,y} g_xy (n_x - 1)(b*_y + b_y)
SparseOperator electron_phonon(const BasisPtr& basis, const Dense& g);

enum class NestingKind { mlm, hubbard, nt };

// kappa: Lambda-space -> Lambda'-space, psi -> psi (x) xi~ on the added sites,
// expressed in occupation coordinates. site_map[v] is the image of vertex v.
struct Nesting {
    NestingKind kind;
    BasisPtr small, big;
    std::vector<int> site_map;
    SparseOperator embed;       // big x small, isometric
    SparseOperator projection;  // small x big, embed^T
};

Nesting make_nesting(NestingKind kind, const Graph& small, const Graph& big, const std::vector<int>& site_map);
Vec embed_state(const Nesting& n, const Vec& psi);

// Sign of the distinguished vector at this occupation state:
// |X, Y> for plain lattices, |sigma> for one-hole states.
int cons_sign(const BasisState& s, int sites, std::uint64_t b_mask);
int nt_sign(const BasisState& s, int sites);

void write_coordinates(std::ostream& out, const SparseOperator& op);

}  // namespace spinstab
