#include "spinstab/operators.hpp"

#include <bit>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "spinstab/error.hpp"

namespace spinstab {

namespace {

std::uint64_t bit(int x) { return std::uint64_t(1) << x; }
std::uint64_t full_mask(int n) { return bit(n) - 1; }


}  // namespace

SparseOperator::SparseOperator(Matrix m, BasisPtr rows, BasisPtr cols, bool hermitian, bool imaginary)
    : m_(std::move(m)), rows_(std::move(rows)), cols_(std::move(cols)), hermitian_(hermitian), imaginary_(imaginary) {
    m_.makeCompressed();
    if (rows_ && Eigen::Index(rows_->size()) != m_.rows()) throw std::invalid_argument("row dimension mismatch");
    if (cols_ && Eigen::Index(cols_->size()) != m_.cols()) throw std::invalid_argument("column dimension mismatch");
    if (hermitian_) {
        if (m_.rows() != m_.cols()) throw std::invalid_argument("hermitian operator must be square");
        // i*A is hermitian iff A is antisymmetric
        double err = imaginary_ ? max_abs(Matrix(m_ + Matrix(m_.transpose()))) : max_abs(Matrix(m_ - Matrix(m_.transpose())));
        if (err > kHermitianTol) throw std::logic_error("operator claimed hermitian but is not");
    }
}

SparseOperator SparseOperator::adjoint() const {
    Matrix t = m_.transpose();
    if (imaginary_) t = -t;
    return SparseOperator(t, cols_, rows_, hermitian_, imaginary_);
}

SparseOperator SparseOperator::scaled(double a) const {
    return SparseOperator(Matrix(a * m_), rows_, cols_, hermitian_, imaginary_);
}

SparseOperator operator*(const SparseOperator& a, const SparseOperator& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("product dimension mismatch");
    SparseOperator::Matrix m = a.matrix() * b.matrix();
    bool imag = a.imaginary() != b.imaginary();
    if (a.imaginary() && b.imaginary()) m = -m;
    return SparseOperator(m, a.row_basis(), b.col_basis(), false, imag);
}

SparseOperator operator+(const SparseOperator& a, const SparseOperator& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("sum dimension mismatch");
    if (a.imaginary() != b.imaginary()) throw std::invalid_argument("cannot add real and imaginary-marked operators");
    return SparseOperator(SparseOperator::Matrix(a.matrix() + b.matrix()), a.row_basis(), a.col_basis(),
                          a.hermitian() && b.hermitian(), a.imaginary());
}

SparseOperator operator-(const SparseOperator& a, const SparseOperator& b) { return a + b.scaled(-1.0); }

SparseOperator commutator(const SparseOperator& a, const SparseOperator& b) { return a * b - b * a; }

double max_abs(const SparseOperator::Matrix& a) {
    double m = 0;
    for (int k = 0; k < a.outerSize(); ++k)
        for (SparseOperator::Matrix::InnerIterator it(a, k); it; ++it) m = std::max(m, std::abs(it.value()));
    return m;
}

double max_abs(const SparseOperator& a) { return max_abs(a.matrix()); }

bool is_hermitian(const SparseOperator::Matrix& a, double tol) {
    if (a.rows() != a.cols()) return false;
    return max_abs(SparseOperator::Matrix(a - SparseOperator::Matrix(a.transpose()))) <= tol;
}

BasisPtr share(SectorBasis b) { return std::make_shared<const SectorBasis>(std::move(b)); }

SparseOperator assemble(const BasisPtr& rows, const BasisPtr& cols,
                        const std::function<void(const BasisState&, const Emit&)>& action, bool hermitian,
                        bool project) {
    std::vector<Eigen::Triplet<double>> trip;
    const std::size_t nc = cols->size();
    trip.reserve(nc * 4);
    for (std::size_t j = 0; j < nc; ++j) {
        const BasisState s = cols->state(j);
        action(s, [&](const BasisState& t, double amp) {
            if (amp == 0.0) return;
            auto i = rows->index_of(t);
            if (!i) {
                if (project) return;
                throw std::logic_error("operator maps outside the target basis");
            }
            trip.emplace_back(Eigen::Index(*i), Eigen::Index(j), amp);
        });
    }
    SparseOperator::Matrix m(Eigen::Index(rows->size()), Eigen::Index(nc));
    m.setFromTriplets(trip.begin(), trip.end());
    m.prune(0.0);
    return SparseOperator(std::move(m), rows, cols, hermitian);
}

namespace {

void emit_string(const BasisState& s, const std::vector<FermionOp>& ops, const SpinOrbitalOrder& order, double amp,
                 const Emit& emit) {
    auto r = apply_string(s, ops, order);
    if (r) emit(r->first, amp * r->second);
}

std::vector<FermionOp> s_plus(SpinSite a) {
    return {{{a.site, Spin::up, a.species}, true}, {{a.site, Spin::down, a.species}, false}};
}
std::vector<FermionOp> s_minus(SpinSite a) {
    return {{{a.site, Spin::down, a.species}, true}, {{a.site, Spin::up, a.species}, false}};
}
std::vector<FermionOp> concat(std::vector<FermionOp> a, const std::vector<FermionOp>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

double sz(const BasisState& s, SpinSite a) {
    const std::uint64_t b = bit(a.site);
    return 0.5 * (((s.mask(a.species, Spin::up) & b) != 0) - ((s.mask(a.species, Spin::down) & b) != 0));
}

std::vector<SpinSite> spin_sites(const SectorBasis& b) {
    std::vector<SpinSite> out;
    for (int x = 0; x < b.sites(); ++x) out.push_back({x, Species::c});
    if (b.kind().kind == Subspace::Kondo)
        for (int x = 0; x < b.sites(); ++x) out.push_back({x, Species::f});
    return out;
}

void check_site(const SectorBasis& b, int x) {
    if (x < 0 || x >= b.sites()) throw std::out_of_range("site out of range");
}

double occ(const BasisState& s, int x) { return double(((s.up >> x) & 1) + ((s.down >> x) & 1)); }

}  // namespace

SparseOperator spin_op(const BasisPtr& basis, int x, int i, Species sp) {
    check_site(*basis, x);
    const auto order = basis->order();
    const SpinSite a{x, sp};
    switch (i) {
        case 3:
            return assemble(basis, basis, [&](const BasisState& s, const Emit& e) { e(s, sz(s, a)); }, true);
        case 1:
            return assemble(basis, basis,
                            [&](const BasisState& s, const Emit& e) {
                                emit_string(s, s_plus(a), order, 0.5, e);
                                emit_string(s, s_minus(a), order, 0.5, e);
                            },
                            true);
        case 2: {
            // S^(2) = i (S^- - S^+)/2
            auto m = assemble(basis, basis,
                              [&](const BasisState& s, const Emit& e) {
                                  emit_string(s, s_minus(a), order, 0.5, e);
                                  emit_string(s, s_plus(a), order, -0.5, e);
                              },
                              false);
            return SparseOperator(m.matrix(), basis, basis, true, true);
        }
        default: throw std::invalid_argument("spin component must be 1, 2 or 3");
    }
}

SparseOperator spin_dot(const BasisPtr& basis, SpinSite a, SpinSite b) {
    check_site(*basis, a.site);
    check_site(*basis, b.site);
    const auto order = basis->order();
    auto pm = concat(s_plus(a), s_minus(b));
    auto mp = concat(s_minus(a), s_plus(b));
    return assemble(basis, basis,
                    [&](const BasisState& s, const Emit& e) {
                        if (a.site == b.site && a.species == b.species) {
                            // S_a^2 = 3/4 on singly occupied orbitals
                            double m = sz(s, a);
                            e(s, m != 0.0 ? 0.75 : 0.0);
                            return;
                        }
                        e(s, sz(s, a) * sz(s, b));
                        emit_string(s, pm, order, 0.5, e);
                        emit_string(s, mp, order, 0.5, e);
                    },
                    true);
}

SparseOperator heisenberg_bond(const BasisPtr& basis, int x, int y) {
    if (x == y) throw std::invalid_argument("heisenberg bond needs two distinct sites");
    return spin_dot(basis, {x, Species::c}, {y, Species::c});
}

SparseOperator total_spin_squared(const BasisPtr& basis) {
    const auto order = basis->order();
    const auto sites = spin_sites(*basis);
    std::vector<std::vector<FermionOp>> strings;
    for (auto a : sites)
        for (auto b : sites) {
            strings.push_back(concat(s_plus(a), s_minus(b)));
            strings.push_back(concat(s_minus(a), s_plus(b)));
        }
    return assemble(basis, basis,
                    [&](const BasisState& s, const Emit& e) {
                        double m = 0.5 * magnetization(s);
                        e(s, m * m);
                        for (const auto& str : strings) emit_string(s, str, order, 0.5, e);
                    },
                    true);
}

SparseOperator total_sz(const BasisPtr& basis) {
    return assemble(basis, basis, [](const BasisState& s, const Emit& e) { e(s, 0.5 * magnetization(s)); }, true);
}

SparseOperator ladder_op(const BasisPtr& from, const BasisPtr& to) {
    if (!from->two_m() || !to->two_m()) throw std::invalid_argument("ladder operators need fixed-M sectors");
    if (from->kind().kind != to->kind().kind || from->particle_number() != to->particle_number() ||
        from->sites() != to->sites() || from->kind().phonon_cutoff != to->kind().phonon_cutoff)
        throw std::invalid_argument("sector mismatch: ladder operator between different subspaces");
    const int d = *to->two_m() - *from->two_m();
    if (d != 2 && d != -2) throw std::invalid_argument("sector mismatch: M must change by one");
    const auto order = from->order();
    std::vector<std::vector<FermionOp>> strings;
    for (auto a : spin_sites(*from)) strings.push_back(d > 0 ? s_plus(a) : s_minus(a));
    return assemble(to, from,
                    [&](const BasisState& s, const Emit& e) {
                        for (const auto& str : strings) emit_string(s, str, order, 1.0, e);
                    },
                    false);
}

SparseOperator hopping(const BasisPtr& basis, const Dense& t, bool project) {
    const int L = basis->sites();
    if (t.rows() != L || t.cols() != L) throw std::invalid_argument("hopping matrix dimension mismatch");
    if ((t - t.transpose()).cwiseAbs().maxCoeff() > 0) throw std::invalid_argument("hopping matrix not symmetric");
    const auto order = basis->order();
    struct Term {
        std::vector<FermionOp> ops;
        double amp;
    };
    std::vector<Term> terms;
    for (int x = 0; x < L; ++x)
        for (int y = 0; y < L; ++y) {
            if (t(x, y) == 0.0) continue;
            for (Spin s : {Spin::up, Spin::down})
                terms.push_back({{{{x, s}, true}, {{y, s}, false}}, t(x, y)});
        }
    return assemble(basis, basis,
                    [&](const BasisState& s, const Emit& e) {
                        for (const auto& term : terms) emit_string(s, term.ops, order, term.amp, e);
                    },
                    true, project);
}

SparseOperator coulomb(const BasisPtr& basis, const Dense& u) {
    const int L = basis->sites();
    if (u.rows() != L || u.cols() != L) throw std::invalid_argument("interaction matrix dimension mismatch");
    if ((u - u.transpose()).cwiseAbs().maxCoeff() > 0) throw std::invalid_argument("interaction matrix not symmetric");
    return assemble(basis, basis,
                    [&](const BasisState& s, const Emit& e) {
                        double v = 0;
                        for (int x = 0; x < L; ++x)
                            for (int y = 0; y < L; ++y) v += 0.5 * u(x, y) * (occ(s, x) - 1) * (occ(s, y) - 1);
                        e(s, v);
                    },
                    true);
}

SparseOperator gutzwiller(const BasisPtr& basis) {
    return assemble(basis, basis, [](const BasisState& s, const Emit& e) { e(s, (s.up & s.down) ? 0.0 : 1.0); }, true);
}

SparseOperator number_op(const BasisPtr& basis, int x) {
    check_site(*basis, x);
    return assemble(basis, basis, [x](const BasisState& s, const Emit& e) { e(s, occ(s, x)); }, true);
}

SparseOperator fermion_op(const BasisPtr& from, const BasisPtr& to, const Mode& m, bool dagger) {
    check_site(*from, m.site);
    const auto order = from->order();
    return assemble(to, from,
                    [&](const BasisState& s, const Emit& e) { emit_string(s, {{m, dagger}}, order, 1.0, e); }, false);
}

int cons_sign(const BasisState& s, int sites, std::uint64_t b_mask) {
    auto [st, sign] = distinguished_state(VertexModes::plain(sites), b_mask, s.up, s.down, false);
    if (st != s) throw std::logic_error("distinguished vector does not match the occupation state");
    return sign;
}

int nt_sign(const BasisState& s, int sites) { return nt_state(nt_config_of(s, sites)).second; }

SparseOperator hole_particle(const Graph& g, const BasisPtr& from, const BasisPtr& to) {
    auto bip = bipartition(g);
    if (!bip) throw ValidationError("graph not bipartite");
    const int L = g.vertex_count();
    if (from->sites() != L || to->sites() != L) throw std::invalid_argument("basis does not match the graph");
    if (from->kind().kind == Subspace::Kondo || from->has_phonons())
        throw std::invalid_argument("hole-particle transformation is defined on plain electron bases");
    if (from->particle_number() && *from->particle_number() != L)
        throw ValidationError("hole-particle transformation needs half filling");
    const std::uint64_t all = full_mask(L), bmask = bip->mask_b();
    const SpinOrbitalOrder order{false};
    return assemble(to, from, [&](const BasisState& s, const Emit& e) {
        const int sa = cons_sign(s, L, bmask);
        const std::uint64_t y = all & ~s.down;
        std::vector<FermionOp> ops;
        for (int x = 0; x < L; ++x)
            if (s.up & bit(x)) ops.push_back({{x, Spin::up}, true});
        for (int x = 0; x < L; ++x)
            if (y & bit(x)) ops.push_back({{x, Spin::down}, true});
        auto r = apply_string(BasisState{}, ops, order);
        e(r->first, double(sa * r->second));
    }, false);
}

SparseOperator hole_particle_target_projection(const BasisPtr& basis) {
    const int L = basis->sites();
    return assemble(basis, basis,
                    [L](const BasisState& s, const Emit& e) {
                        double v = 1;
                        for (int x = 0; x < L; ++x) v *= (occ(s, x) - 1) * (occ(s, x) - 1);
                        e(s, v);
                    },
                    true);
}

PhononOps phonon_ops(int n_max) {
    if (n_max < 1) throw std::invalid_argument("phonon cutoff must be at least 1");
    std::vector<Eigen::Triplet<double>> tb, td;
    for (int k = 1; k <= n_max; ++k) {
        tb.emplace_back(k - 1, k, std::sqrt(double(k)));
        td.emplace_back(k, k - 1, std::sqrt(double(k)));
    }
    SparseOperator::Matrix b(n_max + 1, n_max + 1), bd(n_max + 1, n_max + 1);
    b.setFromTriplets(tb.begin(), tb.end());
    bd.setFromTriplets(td.begin(), td.end());
    return {SparseOperator(b, nullptr, nullptr), SparseOperator(bd, nullptr, nullptr)};
}

SparseOperator phonon_number(const BasisPtr& basis, int x) {
    check_site(*basis, x);
    if (!basis->has_phonons()) throw std::invalid_argument("basis carries no phonons");
    return assemble(basis, basis, [&](const BasisState& s, const Emit& e) { e(s, basis->phonon_occ(s, x)); }, true);
}

namespace {

void emit_displacement(const SectorBasis& b, const BasisState& s, int y, double amp, const Emit& e) {
    const int k = b.phonon_occ(s, y);
    if (auto lo = b.with_phonon(s, y, k - 1)) e(*lo, amp * std::sqrt(double(k)));
    if (auto hi = b.with_phonon(s, y, k + 1)) e(*hi, amp * std::sqrt(double(k + 1)));
}

}  // namespace

SparseOperator phonon_displacement(const BasisPtr& basis, int x) {
    check_site(*basis, x);
    if (!basis->has_phonons()) throw std::invalid_argument("basis carries no phonons");
    return assemble(basis, basis, [&](const BasisState& s, const Emit& e) { emit_displacement(*basis, s, x, 1.0, e); },
                    true);
}

SparseOperator electron_phonon(const BasisPtr& basis, const Dense& g) {
    const int L = basis->sites();
    if (!basis->has_phonons()) throw std::invalid_argument("basis carries no phonons");
    if (g.rows() != L || g.cols() != L) throw std::invalid_argument("coupling matrix dimension mismatch");
    return assemble(basis, basis,
                    [&](const BasisState& s, const Emit& e) {
                        for (int y = 0; y < L; ++y) {
                            double c = 0;
                            for (int x = 0; x < L; ++x) c += g(x, y) * (occ(s, x) - 1);
                            if (c != 0.0) emit_displacement(*basis, s, y, c, e);
                        }
                    },
                    true);
}

Nesting make_nesting(NestingKind kind, const Graph& small, const Graph& big, const std::vector<int>& site_map) {
    const int L = small.vertex_count(), Lp = big.vertex_count();
    if (int(site_map.size()) != L) throw ValidationError("site map does not cover the small lattice");
    std::uint64_t image = 0;
    for (int v : site_map) {
        if (v < 0 || v >= Lp || (image & bit(v))) throw ValidationError("small lattice is not contained in the big one");
        image |= bit(v);
    }
    for (auto [u, v] : small.edges())
        if (!big.has_edge(site_map[u], site_map[v]))
            throw ValidationError("small lattice is not an induced piece of the big one");
    std::vector<int> extra;
    for (int v = 0; v < Lp; ++v)
        if (!(image & bit(v))) extra.push_back(v);

    SubspaceKind sk;
    std::optional<int> n_small, n_big;
    switch (kind) {
        case NestingKind::mlm: sk = {Subspace::SingleOccupancy, {}}; break;
        case NestingKind::hubbard:
            sk = {Subspace::Full, {}};
            n_small = L;
            n_big = Lp;
            break;
        case NestingKind::nt: sk = {Subspace::OneHoleNoDouble, {}}; break;
    }
    auto bs = share(enumerate_sector(L, sk, n_small, std::nullopt));
    auto bb = share(enumerate_sector(Lp, sk, n_big, std::nullopt));

    std::uint64_t b_small = 0, b_big = 0;
    if (kind != NestingKind::nt) {
        auto p = bipartition(small), q = bipartition(big);
        if (!p || !q) throw ValidationError("graph not bipartite");
        b_small = p->mask_b();
        b_big = q->mask_b();
    }
    auto sign_of = [&](const BasisState& s, int sites, std::uint64_t bm) {
        return kind == NestingKind::nt ? nt_sign(s, sites) : cons_sign(s, sites, bm);
    };
    auto map_mask = [&](std::uint64_t m) {
        std::uint64_t r = 0;
        for (int v = 0; v < L; ++v)
            if (m & bit(v)) r |= bit(site_map[v]);
        return r;
    };
    const double w = std::pow(2.0, -0.5 * double(extra.size()));
    const std::uint64_t nz = std::uint64_t(1) << extra.size();

    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t i = 0; i < bs->size(); ++i) {
        const BasisState s = bs->state(i);
        const int si = sign_of(s, L, b_small);
        const std::uint64_t up = map_mask(s.up), dn = map_mask(s.down);
        for (std::uint64_t z = 0; z < nz; ++z) {
            BasisState t{up, dn, 0, 0, 0};
            for (std::size_t k = 0; k < extra.size(); ++k) (z >> k & 1 ? t.up : t.down) |= bit(extra[k]);
            auto j = bb->index_of(t);
            if (!j) throw std::logic_error("embedded state outside the big basis");
            trip.emplace_back(Eigen::Index(*j), Eigen::Index(i), w * si * sign_of(t, Lp, b_big));
        }
    }
    SparseOperator::Matrix k(Eigen::Index(bb->size()), Eigen::Index(bs->size()));
    k.setFromTriplets(trip.begin(), trip.end());
    SparseOperator embed(k, bb, bs);
    return {kind, bs, bb, site_map, embed, embed.adjoint()};
}

Vec embed_state(const Nesting& n, const Vec& psi) {
    if (Eigen::Index(n.small->size()) != psi.size()) throw std::invalid_argument("state dimension mismatch");
    return n.embed.apply(psi);
}

void write_coordinates(std::ostream& out, const SparseOperator& op) {
    out << "# rows " << op.rows() << " cols " << op.cols() << " nnz " << op.matrix().nonZeros();
    if (op.imaginary()) out << " imaginary";
    out << "\n" << std::setprecision(17);
    const auto& m = op.matrix();
    for (int r = 0; r < m.outerSize(); ++r)
        for (SparseOperator::Matrix::InnerIterator it(m, r); it; ++it)
            out << it.row() << " " << it.col() << " " << it.value() << "\n";
}

}  // namespace spinstab
