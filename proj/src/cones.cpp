#include "spinstab/cones.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <tuple>

#include "spinstab/error.hpp"

namespace spinstab {

namespace {

std::uint64_t bit(int x) { return std::uint64_t(1) << x; }
std::uint64_t full_mask(int n) { return bit(n) - 1; }

void require_plain(const BasisPtr& basis) {
    if (!basis) throw std::invalid_argument("cone needs a basis");
    if (basis->has_phonons()) throw std::invalid_argument("cones are defined on phonon-free bases");
}

Cone diagonal_cone(std::string name, const BasisPtr& basis, std::vector<int> sign) {
    Cone c;
    c.kind = ConeKind::Diagonal;
    c.name = std::move(name);
    c.basis = basis;
    c.order_unit.resize(Eigen::Index(sign.size()));
    for (std::size_t i = 0; i < sign.size(); ++i) c.order_unit(Eigen::Index(i)) = sign[i];
    c.sign = std::move(sign);
    return c;
}

struct Entry {
    int sign;
    std::pair<std::uint64_t, std::uint64_t> block;
    std::uint64_t row, col;
};

// Arrange entries into square blocks and check that every (row, col) pair
// of each block is present exactly once.
Cone psd_cone(std::string name, const BasisPtr& basis, const std::vector<Entry>& entries) {
    Cone c;
    c.kind = ConeKind::PSDMatrix;
    c.name = std::move(name);
    c.basis = basis;
    const std::size_t n = entries.size();
    std::map<std::pair<std::uint64_t, std::uint64_t>, int> block_id;
    for (const auto& e : entries) block_id.emplace(e.block, 0);
    int b = 0;
    for (auto& [k, v] : block_id) v = b++;
    std::vector<std::map<std::uint64_t, int>> rows(block_id.size()), cols(block_id.size());
    for (const auto& e : entries) {
        const int id = block_id[e.block];
        rows[id].emplace(e.row, 0);
        cols[id].emplace(e.col, 0);
    }
    c.block_size.resize(block_id.size());
    for (std::size_t k = 0; k < block_id.size(); ++k) {
        // the identity array is the order unit only if row and column keys coincide
        if (rows[k].size() != cols[k].size() ||
            !std::equal(rows[k].begin(), rows[k].end(), cols[k].begin(),
                        [](const auto& a, const auto& b) { return a.first == b.first; }))
            throw std::logic_error("coefficient block rows and columns differ");
        int i = 0;
        for (auto& [m, v] : rows[k]) v = i++;
        i = 0;
        for (auto& [m, v] : cols[k]) v = i++;
        c.block_size[k] = int(rows[k].size());
    }
    c.sign.resize(n);
    c.block.resize(n);
    c.row.resize(n);
    c.col.resize(n);
    std::map<std::tuple<int, int, int>, std::size_t> where;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& e = entries[i];
        c.sign[i] = e.sign;
        c.block[i] = block_id[e.block];
        c.row[i] = rows[c.block[i]].at(e.row);
        c.col[i] = cols[c.block[i]].at(e.col);
        if (!where.emplace(std::tuple{c.block[i], c.row[i], c.col[i]}, i).second)
            throw std::logic_error("two basis states share a coefficient entry");
    }
    std::size_t expected = 0;
    for (int s : c.block_size) expected += std::size_t(s) * std::size_t(s);
    if (expected != n) throw std::logic_error("coefficient blocks are incomplete");
    c.transpose.resize(n);
    c.order_unit = Vec::Zero(Eigen::Index(n));
    for (std::size_t i = 0; i < n; ++i) {
        c.transpose[i] = where.at({c.block[i], c.col[i], c.row[i]});
        if (c.row[i] == c.col[i]) c.order_unit(Eigen::Index(i)) = c.sign[i];
    }
    return c;
}

Vec coefficients(const Vec& psi, const Cone& cone) {
    if (std::size_t(psi.size()) != cone.dim()) throw std::invalid_argument("state dimension does not match the cone");
    Vec c(psi.size());
    for (Eigen::Index i = 0; i < psi.size(); ++i) c(i) = cone.sign[std::size_t(i)] * psi(i);
    return c;
}

Dense to_coefficient_frame(const Dense& a, const Cone& cone) {
    if (std::size_t(a.rows()) != cone.dim() || a.rows() != a.cols())
        throw std::invalid_argument("operator dimension does not match the cone");
    Vec d(a.rows());
    for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = cone.sign[std::size_t(i)];
    return d.asDiagonal() * a * d.asDiagonal();
}

std::string entry_name(const Cone& cone, std::size_t i) {
    std::ostringstream os;
    const BasisState s = cone.basis->state(i);
    os << "#" << i << "(up=" << s.up << ",down=" << s.down;
    if (cone.basis->kind().kind == Subspace::Kondo) os << ",f_up=" << s.f_up << ",f_down=" << s.f_down;
    os << ")";
    return os.str();
}

// Random block-diagonal PSD array of mixed rank, unit Frobenius norm, in
// coefficient coordinates.
Vec random_psd(const Cone& cone, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    std::vector<Dense> blocks;
    for (int n : cone.block_size) {
        const int r = 1 + int(rng() % std::uint64_t(n));
        Dense g(n, r);
        for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = nd(rng);
        blocks.push_back(g * g.transpose());
    }
    Vec c(Eigen::Index(cone.dim()));
    for (std::size_t i = 0; i < cone.dim(); ++i) c(Eigen::Index(i)) = blocks[cone.block[i]](cone.row[i], cone.col[i]);
    return c / c.norm();
}

std::vector<std::size_t> diagonal_entries(const Cone& cone) {
    std::vector<std::size_t> d;
    for (std::size_t i = 0; i < cone.dim(); ++i)
        if (cone.row[i] == cone.col[i]) d.push_back(i);
    return d;
}

// exp(-beta (H - E0)), i.e. the semigroup up to the positive factor exp(-beta E0)
Dense shifted_semigroup(const Eigen::SelfAdjointEigenSolver<Dense>& es, double beta) {
    const Vec& ev = es.eigenvalues();
    Vec w(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) w(i) = std::exp(-beta * (ev(i) - ev(0)));
    return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().transpose();
}

// Coefficient-coordinate extreme rays used by the nesting check.
std::vector<Vec> probe_rays(const Cone& cone) {
    std::vector<Vec> rays;
    const Eigen::Index n = Eigen::Index(cone.dim());
    if (cone.kind == ConeKind::Diagonal) {
        for (Eigen::Index i = 0; i < n; ++i) rays.push_back(Vec::Unit(n, i));
        return rays;
    }
    std::vector<std::vector<Dense>> out;
    for (std::size_t b = 0; b < cone.block_size.size(); ++b) {
        const int m = cone.block_size[b];
        auto put = [&](const Vec& v) {
            std::vector<Dense> blocks;
            for (int s : cone.block_size) blocks.push_back(Dense::Zero(s, s));
            blocks[b] = v * v.transpose();
            out.push_back(std::move(blocks));
        };
        for (int r = 0; r < m; ++r) {
            put(Vec::Unit(m, r));
            for (int s = r + 1; s < m; ++s) {
                put(Vec::Unit(m, r) + Vec::Unit(m, s));
                put(Vec::Unit(m, r) - Vec::Unit(m, s));
            }
        }
    }
    for (const auto& blocks : out) {
        Vec c(n);
        for (std::size_t i = 0; i < cone.dim(); ++i) c(Eigen::Index(i)) = blocks[cone.block[i]](cone.row[i], cone.col[i]);
        rays.push_back(c);
    }
    return rays;
}

Vec from_coefficients(const Vec& c, const Cone& cone) {
    Vec psi(c.size());
    for (Eigen::Index i = 0; i < c.size(); ++i) psi(i) = cone.sign[std::size_t(i)] * c(i);
    return psi;
}

}  // namespace

Cone mlm_cone(const BasisPtr& basis, const Bipartition& bip) {
    require_plain(basis);
    if (basis->kind().kind != Subspace::SingleOccupancy) throw std::invalid_argument("MLM cone needs a SingleOccupancy basis");
    const int L = basis->sites();
    if (int(bip.side.size()) != L) throw std::invalid_argument("bipartition does not match the basis");
    std::vector<int> sign;
    for (std::size_t i = 0; i < basis->size(); ++i) sign.push_back(cons_sign(basis->state(i), L, bip.mask_b()));
    return diagonal_cone("mlm", basis, std::move(sign));
}

Cone nt_cone(const BasisPtr& basis) {
    require_plain(basis);
    if (basis->kind().kind != Subspace::OneHoleNoDouble) throw std::invalid_argument("NT cone needs a OneHoleNoDouble basis");
    std::vector<int> sign;
    for (std::size_t i = 0; i < basis->size(); ++i) sign.push_back(nt_sign(basis->state(i), basis->sites()));
    return diagonal_cone("nt", basis, std::move(sign));
}

Cone hubbard_cone(const BasisPtr& basis, const Bipartition& bip) {
    require_plain(basis);
    if (basis->kind().kind != Subspace::Full) throw std::invalid_argument("Hubbard cone needs a Full basis");
    const int L = basis->sites();
    if (basis->particle_number() != L) throw ValidationError("Hubbard cone needs half filling");
    if (int(bip.side.size()) != L) throw std::invalid_argument("bipartition does not match the basis");
    const std::uint64_t all = full_mask(L);
    std::vector<Entry> entries;
    for (std::size_t i = 0; i < basis->size(); ++i) {
        const BasisState s = basis->state(i);
        const std::uint64_t col = all & ~s.down;
        entries.push_back({cons_sign(s, L, bip.mask_b()), {std::uint64_t(std::popcount(s.up)), 0}, s.up, col});
    }
    return psd_cone("hubbard", basis, entries);
}

Cone kondo_cone(const BasisPtr& basis, const Bipartition& doubled_bip) {
    require_plain(basis);
    if (basis->kind().kind != Subspace::Kondo) throw std::invalid_argument("Kondo cone needs a Kondo basis");
    const int L = basis->sites();
    if (int(doubled_bip.side.size()) != 2 * L) throw std::invalid_argument("bipartition does not match the doubled lattice");
    const auto vm = VertexModes::kondo(L);
    auto interleave = [L](std::uint64_t c, std::uint64_t f) {
        std::uint64_t r = 0;
        for (int x = 0; x < L; ++x) {
            if (c & bit(x)) r |= bit(2 * x);
            if (f & bit(x)) r |= bit(2 * x + 1);
        }
        return r;
    };
    const std::uint64_t all = full_mask(L);
    std::vector<Entry> entries;
    for (std::size_t i = 0; i < basis->size(); ++i) {
        const BasisState s = basis->state(i);
        if ((s.f_up ^ s.f_down) != all || (s.f_up & s.f_down))
            throw std::logic_error("Kondo basis state with an empty or doubly occupied f orbital");
        auto [st, sign] = distinguished_state(vm, doubled_bip.mask_b(), interleave(s.up, s.f_up),
                                              interleave(s.down, s.f_down), true);
        if (st != s) throw std::logic_error("distinguished vector does not match the occupation state");
        entries.push_back({sign, {s.f_up, std::uint64_t(std::popcount(s.up))}, s.up, all & ~s.down});
    }
    return psd_cone("kondo", basis, entries);
}

std::optional<Cone> model_cone(const ModelSpec& spec, const BasisPtr& basis) {
    if (has_phonons(spec.model)) return std::nullopt;
    switch (spec.model) {
        case ModelId::mlm:
        case ModelId::heisenberg: {
            auto bip = bipartition(spec.graph);
            if (!bip) throw ValidationError("graph not bipartite");
            return mlm_cone(basis, *bip);
        }
        case ModelId::hubbard: {
            auto bip = bipartition(spec.graph);
            if (!bip) throw ValidationError("graph not bipartite");
            return hubbard_cone(basis, *bip);
        }
        case ModelId::hubbard_nt: return nt_cone(basis);
        case ModelId::kondo: {
            if (spec.kondo_j == 0.0) throw ValidationError("Kondo coupling is zero");
            auto kg = kondo_graphs(spec.graph);
            return kondo_cone(basis, spec.kondo_j > 0 ? kg.af_bip : kg.f_bip);
        }
        default: return std::nullopt;
    }
}

std::vector<Dense> coefficient_blocks(const Vec& psi, const Cone& cone) {
    if (cone.kind != ConeKind::PSDMatrix) throw std::invalid_argument("coefficient blocks exist for matrix cones only");
    const Vec c = coefficients(psi, cone);
    std::vector<Dense> blocks;
    for (int s : cone.block_size) blocks.push_back(Dense::Zero(s, s));
    for (std::size_t i = 0; i < cone.dim(); ++i) blocks[cone.block[i]](cone.row[i], cone.col[i]) = c(Eigen::Index(i));
    return blocks;
}

Vec from_blocks(const std::vector<Dense>& blocks, const Cone& cone) {
    if (cone.kind != ConeKind::PSDMatrix) throw std::invalid_argument("coefficient blocks exist for matrix cones only");
    if (blocks.size() != cone.block_size.size()) throw std::invalid_argument("block count mismatch");
    for (std::size_t b = 0; b < blocks.size(); ++b)
        if (blocks[b].rows() != cone.block_size[b] || blocks[b].cols() != cone.block_size[b])
            throw std::invalid_argument("block size mismatch");
    Vec psi(Eigen::Index(cone.dim()));
    for (std::size_t i = 0; i < cone.dim(); ++i)
        psi(Eigen::Index(i)) = cone.sign[i] * blocks[cone.block[i]](cone.row[i], cone.col[i]);
    return psi;
}

Positivity positivity(const Vec& psi, const Cone& cone, double tol) {
    Positivity p;
    if (cone.kind == ConeKind::Diagonal) {
        const Vec c = coefficients(psi, cone);
        Eigen::Index at = 0;
        p.margin = c.size() ? c.minCoeff(&at) : 0;
        p.witness = std::size_t(at);
    } else {
        const auto blocks = coefficient_blocks(psi, cone);
        p.margin = std::numeric_limits<double>::infinity();
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            p.asymmetry = std::max(p.asymmetry, (blocks[b] - blocks[b].transpose()).cwiseAbs().maxCoeff());
            Eigen::SelfAdjointEigenSolver<Dense> es(0.5 * (blocks[b] + blocks[b].transpose()), Eigen::EigenvaluesOnly);
            if (es.eigenvalues()(0) < p.margin) {
                p.margin = es.eigenvalues()(0);
                p.witness = b;
            }
        }
    }
    const bool symmetric = p.asymmetry <= tol;
    p.member = symmetric && p.margin >= -tol;
    p.strict = symmetric && p.margin > tol;
    return p;
}

bool membership(const Vec& psi, const Cone& cone, double tol) { return positivity(psi, cone, tol).member; }
bool strict_positivity(const Vec& psi, const Cone& cone, double tol) { return positivity(psi, cone, tol).strict; }

Vec gauge_fix(const Vec& psi, const Cone& cone) {
    if (std::size_t(psi.size()) != cone.dim()) throw std::invalid_argument("state dimension does not match the cone");
    const double o = cone.order_unit.dot(psi);
    if (std::abs(o) <= 1e-12 * std::max(1.0, psi.norm())) throw std::domain_error("gauge undefined");
    return o > 0 ? Vec(psi) : Vec(-psi);
}

CVec gauge_fix(const CVec& psi, const Cone& cone) {
    if (std::size_t(psi.size()) != cone.dim()) throw std::invalid_argument("state dimension does not match the cone");
    const std::complex<double> o = cone.order_unit.cast<std::complex<double>>().dot(psi);
    if (std::abs(o) <= 1e-12 * std::max(1.0, psi.norm())) throw std::domain_error("gauge undefined");
    return psi * (std::conj(o) / std::abs(o));
}

CVec modular_conjugation(const CVec& psi, const Cone& cone) {
    if (std::size_t(psi.size()) != cone.dim()) throw std::invalid_argument("state dimension does not match the cone");
    if (cone.kind == ConeKind::Diagonal) return psi.conjugate();
    CVec out(psi.size());
    for (std::size_t i = 0; i < cone.dim(); ++i) {
        const std::size_t t = cone.transpose[i];
        out(Eigen::Index(i)) = double(cone.sign[i] * cone.sign[t]) * std::conj(psi(Eigen::Index(t)));
    }
    return out;
}

Vec modular_conjugation(const Vec& psi, const Cone& cone) {
    return modular_conjugation(CVec(psi.cast<std::complex<double>>()), cone).real();
}

Verdict positivity_preserving(const Dense& a, const Cone& cone, const PreservationOptions& opt) {
    const Dense ac = to_coefficient_frame(a, cone);
    const double tol = opt.tol * std::max(1.0, a.cwiseAbs().maxCoeff());
    Verdict v;
    v.holds = true;
    v.worst = std::numeric_limits<double>::infinity();
    auto record = [&](double value, const std::string& where) {
        if (value < v.worst) {
            v.worst = value;
            if (value < -tol) {
                v.holds = false;
                v.witness = where;
            }
        }
    };
    if (cone.kind == ConeKind::Diagonal) {
        v.mode = "exact";
        Eigen::Index r = 0, c = 0;
        const double m = ac.size() ? ac.minCoeff(&r, &c) : 0;
        std::ostringstream os;
        os << "entry " << entry_name(cone, std::size_t(r)) << " <- " << entry_name(cone, std::size_t(c)) << " = " << m;
        record(m, os.str());
        return v;
    }
    v.mode = "sampled";
    v.exhaustive = false;
    const auto diag = diagonal_entries(cone);
    for (std::size_t r : diag)
        for (std::size_t c : diag) {
            const double m = ac(Eigen::Index(r), Eigen::Index(c));
            if (m < v.worst) {
                std::ostringstream os;
                os << "<e e^T at " << entry_name(cone, r) << ", A e e^T at " << entry_name(cone, c) << "> = " << m;
                record(m, os.str());
            }
        }
    std::mt19937_64 rng(opt.seed);
    for (int k = 0; k < opt.samples; ++k) {
        const Vec rho = random_psd(cone, rng), sigma = random_psd(cone, rng);
        const double m = sigma.dot(ac * rho);
        if (m < v.worst) {
            std::ostringstream os;
            os << "sample " << k << ": <sigma, A rho> = " << m;
            record(m, os.str());
        }
    }
    return v;
}

Dense semigroup(const Dense& h, double beta) {
    if (h.rows() != h.cols()) throw std::invalid_argument("semigroup needs a square matrix");
    Eigen::SelfAdjointEigenSolver<Dense> es(0.5 * (h + h.transpose()));
    const Vec& ev = es.eigenvalues();
    Vec w(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) w(i) = std::exp(-beta * ev(i));
    return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().transpose();
}

Ergodicity ergodicity(const SparseOperator& h, const Cone& cone, const ErgodicityOptions& opt) {
    if (std::size_t(h.rows()) != cone.dim() || h.rows() != h.cols())
        throw std::invalid_argument("operator dimension does not match the cone");
    if (h.imaginary()) throw std::invalid_argument("ergodicity needs a real operator");
    Ergodicity e;
    const auto& m = h.matrix();
    const Eigen::Index n = m.rows();
    if (cone.kind == ConeKind::Diagonal) {
        e.mode = "structural";
        e.metzler = true;
        std::vector<int> parent(static_cast<std::size_t>(n));
        for (Eigen::Index i = 0; i < n; ++i) parent[std::size_t(i)] = int(i);
        auto find = [&](int x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        Eigen::Index components = n;
        for (int r = 0; r < m.outerSize(); ++r)
            for (SparseOperator::Matrix::InnerIterator it(m, r); it; ++it) {
                if (it.row() == it.col()) continue;
                const double v = cone.sign[std::size_t(it.row())] * cone.sign[std::size_t(it.col())] * it.value();
                if (v > opt.tol) {
                    if (e.metzler) {
                        std::ostringstream os;
                        os << "positive off-diagonal entry " << v << " between " << entry_name(cone, std::size_t(it.row()))
                           << " and " << entry_name(cone, std::size_t(it.col()));
                        e.witness = os.str();
                    }
                    e.metzler = false;
                } else if (v < -opt.tol) {
                    const int a = find(int(it.row())), b = find(int(it.col()));
                    if (a != b) {
                        parent[a] = b;
                        --components;
                    }
                }
            }
        e.irreducible = components <= 1;
        if (e.metzler && !e.irreducible) {
            std::ostringstream os;
            os << "off-diagonal graph has " << components << " components";
            e.witness = os.str();
        }
        e.ergodic = e.metzler && e.irreducible;
        return e;
    }

    e.mode = "consequence-verified";
    if (std::size_t(n) > opt.dense_threshold) {
        e.witness = "dimension exceeds the dense threshold";
        return e;
    }
    Eigen::SelfAdjointEigenSolver<Dense> es(h.dense());
    if (es.info() != Eigen::Success) throw SolverError("dense eigensolver failed");
    const Vec& ev = es.eigenvalues();
    if (n > 1 && ev(1) - ev(0) <= 1e-7 * std::max(1.0, std::abs(ev(0)))) {
        e.witness = "ground state is degenerate";
        return e;
    }
    Vec g;
    try {
        g = gauge_fix(Vec(es.eigenvectors().col(0)), cone);
    } catch (const std::domain_error&) {
        e.witness = "ground state orthogonal to the order unit";
        return e;
    }
    const auto p = positivity(g, cone, opt.strict_tol);
    e.margin = p.margin;
    e.irreducible = p.strict;
    e.metzler = true;
    for (double beta : opt.betas) {
        const auto v = positivity_preserving(shifted_semigroup(es, beta), cone, opt.sampling);
        if (!v.holds) {
            e.metzler = false;
            std::ostringstream os;
            os << "exp(-" << beta << " H): " << v.witness;
            e.witness = os.str();
            break;
        }
    }
    if (e.metzler && !e.irreducible) {
        std::ostringstream os;
        os << "gauge-fixed ground vector not strictly positive (margin " << p.margin << ")";
        e.witness = os.str();
    }
    e.ergodic = e.metzler && e.irreducible;
    return e;
}

Verdict monotonicity_check(const Dense& a, const Dense& c, const Cone& cone, const std::vector<double>& betas,
                           double tol) {
    PreservationOptions opt;
    opt.tol = tol;
    const auto cv = positivity_preserving(c, cone, opt);
    if (!cv.holds) throw ValidationError("C is not positivity preserving: " + cv.witness);
    Verdict out;
    out.holds = true;
    out.worst = std::numeric_limits<double>::infinity();
    for (double beta : betas) {
        const Dense ea = semigroup(a, beta);
        const auto av = positivity_preserving(ea, cone, opt);
        if (!av.holds) throw ValidationError("exp(-beta A) is not positivity preserving: " + av.witness);
        const auto d = positivity_preserving(semigroup(a - c, beta) - ea, cone, opt);
        out.mode = d.mode;
        out.exhaustive = out.exhaustive && d.exhaustive;
        if (d.worst < out.worst) out.worst = d.worst;
        if (!d.holds && out.holds) {
            out.holds = false;
            std::ostringstream os;
            os << "beta " << beta << ": " << d.witness;
            out.witness = os.str();
        }
    }
    return out;
}

std::pair<Cone, Cone> nesting_cones(const Nesting& n, const Graph& small, const Graph& big) {
    if (n.kind == NestingKind::nt) return {nt_cone(n.small), nt_cone(n.big)};
    auto p = bipartition(small), q = bipartition(big);
    if (!p || !q) throw ValidationError("graph not bipartite");
    if (n.kind == NestingKind::mlm) return {mlm_cone(n.small, *p), mlm_cone(n.big, *q)};
    return {hubbard_cone(n.small, *p), hubbard_cone(n.big, *q)};
}

NestingCheck nesting_consistency(const Nesting& n, const Cone& small, const Cone& big, double tol) {
    if (small.dim() != n.small->size() || big.dim() != n.big->size())
        throw std::invalid_argument("cones do not match the nesting bases");
    NestingCheck r;
    r.embeds = true;
    for (const Vec& ray : probe_rays(small)) {
        const Vec image = n.embed.apply(from_coefficients(ray, small));
        if (!membership(image, big, tol)) {
            r.embeds = false;
            r.witness = "embedded extreme ray leaves the big cone";
            break;
        }
    }
    r.projects = true;
    for (const Vec& ray : probe_rays(big)) {
        const Vec image = n.projection.apply(from_coefficients(ray, big));
        if (!membership(image, small, tol)) {
            r.projects = false;
            if (r.witness.empty()) r.witness = "projected extreme ray leaves the small cone";
            break;
        }
    }
    const auto p = positivity(n.projection.apply(big.order_unit), small, tol);
    r.order_unit = p.strict;
    r.order_unit_margin = p.margin;
    if (!p.strict && r.witness.empty()) r.witness = "projected order unit not strictly positive";
    return r;
}

}  // namespace spinstab
