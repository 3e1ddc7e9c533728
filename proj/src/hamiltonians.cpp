#include "spinstab/hamiltonians.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "spinstab/error.hpp"

namespace spinstab {

namespace {

const std::vector<std::pair<ModelId, std::string>>& model_names() {
    static const std::vector<std::pair<ModelId, std::string>> names{
        {ModelId::mlm, "mlm"},
        {ModelId::heisenberg, "heisenberg"},
        {ModelId::hubbard, "hubbard"},
        {ModelId::hubbard_nt, "hubbard_nt"},
        {ModelId::holstein_hubbard, "holstein_hubbard"},
        {ModelId::holstein_nt, "holstein_nt"},
        {ModelId::kondo, "kondo"},
        {ModelId::kondo_holstein, "kondo_holstein"},
    };
    return names;
}

Dense matrix_or_zero(const Dense& m, int L, const char* what) {
    if (m.size() == 0) return Dense::Zero(L, L);
    if (m.rows() != L || m.cols() != L) {
        std::ostringstream os;
        os << what << " matrix is " << m.rows() << "x" << m.cols() << ", lattice has " << L << " sites";
        throw ValidationError(os.str());
    }
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 0) throw ValidationError(std::string(what) + " matrix not symmetric");
    return m;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

std::string vec_str(const Vec& v) {
    std::ostringstream os;
    os << "[";
    for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << fmt(std::abs(v(i)) < 1e-12 ? 0.0 : v(i));
    os << "]";
    return os.str();
}

std::string half(int two_m) {
    if (two_m % 2 == 0) return std::to_string(two_m / 2);
    return std::to_string(two_m) + "/2";
}

std::string config_str(const SpinConfig& s) {
    std::string out;
    for (int v : s) out += v > 0 ? '+' : v < 0 ? '-' : 'o';
    return out;
}

SparseOperator zero_op(const BasisPtr& b) {
    SparseOperator::Matrix m(Eigen::Index(b->size()), Eigen::Index(b->size()));
    return SparseOperator(m, b, b, true);
}

SparseOperator total_phonon_number(const BasisPtr& b) {
    return assemble(b, b,
                    [&](const BasisState& s, const Emit& e) {
                        int n = 0;
                        for (int x = 0; x < b->sites(); ++x) n += b->phonon_occ(s, x);
                        e(s, double(n));
                    },
                    true);
}

SparseOperator heisenberg_sum(const BasisPtr& b, const Dense& j) {
    SparseOperator h = zero_op(b);
    for (int x = 0; x < j.rows(); ++x)
        for (int y = x + 1; y < j.cols(); ++y)
            if (j(x, y) != 0.0) h = h + heisenberg_bond(b, x, y).scaled(j(x, y));
    return h;
}

// Graph generated by the off-diagonal support of a coupling matrix.
Graph support_graph(const Dense& m) {
    std::vector<std::pair<int, int>> e;
    for (int x = 0; x < m.rows(); ++x)
        for (int y = x + 1; y < m.cols(); ++y)
            if (m(x, y) != 0.0) e.emplace_back(x, y);
    return Graph(int(m.rows()), e);
}

struct Checker {
    ValidationReport& r;
    void add(std::string name, bool ok, std::string witness = {}) {
        if (!ok && witness.empty()) witness = "condition violated";
        r.conditions.push_back({std::move(name), ok, ok ? std::string() : std::move(witness)});
    }
};

void check_tree_support(Checker& c, const std::string& prefix, const Graph& g, const Bipartition& bip,
                        const Dense& m, const char* sym) {
    std::string bad;
    for (int x = 0; x < m.rows() && bad.empty(); ++x)
        for (int y = x + 1; y < m.cols(); ++y)
            if (m(x, y) != 0.0 && bip.side[x] == bip.side[y]) {
                bad = "coupling " + std::string(sym) + "(" + std::to_string(x) + "," + std::to_string(y) +
                      ") = " + fmt(m(x, y)) + " joins sites of the same sublattice";
                break;
            }
    c.add(prefix + ":bipartite_support", bad.empty(), bad);
    const Graph tree = normal_spanning_tree(g, 0);
    std::string missing;
    for (auto [u, v] : tree.edges())
        if (m(u, v) == 0.0) {
            missing = "tree edge " + std::to_string(u) + "-" + std::to_string(v) + " missing from G^" + sym;
            break;
        }
    c.add(prefix + ":spanning_tree", missing.empty(), missing);
}

void check_definite(Checker& c, const std::string& name, const Dense& m, bool strict) {
    Eigen::SelfAdjointEigenSolver<Dense> es(m);
    const double lo = es.eigenvalues()(0);
    const bool ok = strict ? lo >= kDefiniteTol : lo >= -kDefiniteTol;
    c.add(name, ok, "min eigenvalue " + fmt(lo) + " along " + vec_str(es.eigenvectors().col(0)));
}

void check_row_sums(Checker& c, const Dense& g) {
    const Vec rs = g.rowwise().sum();
    std::string w;
    for (Eigen::Index x = 1; x < rs.size(); ++x)
        if (std::abs(rs(x) - rs(0)) > kDefiniteTol) {
            w = "row sum of g at site " + std::to_string(x) + " is " + fmt(rs(x)) + ", at site 0 is " + fmt(rs(0));
            break;
        }
    c.add("phonon:g_row_sum", w.empty(), w);
}

}  // namespace

std::string model_name(ModelId m) {
    for (const auto& [id, n] : model_names())
        if (id == m) return n;
    throw std::logic_error("unknown model id");
}

ModelId model_from_name(const std::string& s) {
    for (const auto& [id, n] : model_names())
        if (n == s) return id;
    throw ParseError("unknown model '" + s + "'");
}

std::vector<ModelId> all_models() {
    std::vector<ModelId> out;
    for (const auto& p : model_names()) out.push_back(p.first);
    return out;
}

bool has_phonons(ModelId m) {
    return m == ModelId::holstein_hubbard || m == ModelId::holstein_nt || m == ModelId::kondo_holstein;
}
bool is_nt(ModelId m) { return m == ModelId::hubbard_nt || m == ModelId::holstein_nt; }
bool is_kondo(ModelId m) { return m == ModelId::kondo || m == ModelId::kondo_holstein; }

Dense nearest_neighbour(const Graph& g, double v) {
    Dense m = Dense::Zero(g.vertex_count(), g.vertex_count());
    for (auto [x, y] : g.edges()) m(x, y) = m(y, x) = v;
    return m;
}

Dense complete_bipartite(const Graph& g) {
    auto bip = bipartition(g);
    if (!bip) throw ValidationError("graph not bipartite");
    Dense m = Dense::Zero(g.vertex_count(), g.vertex_count());
    for (int a : bip->part_a)
        for (int b : bip->part_b) m(a, b) = m(b, a) = 1.0;
    return m;
}

SubspaceKind subspace_of(const ModelSpec& spec) {
    std::optional<int> cutoff;
    if (has_phonons(spec.model)) {
        if (spec.n_max < 0) throw ValidationError("phonon cutoff n_max must be non-negative");
        cutoff = spec.n_max;
    }
    switch (spec.model) {
        case ModelId::mlm:
        case ModelId::heisenberg: return {Subspace::SingleOccupancy, cutoff};
        case ModelId::hubbard:
        case ModelId::holstein_hubbard: return {Subspace::Full, cutoff};
        case ModelId::hubbard_nt:
        case ModelId::holstein_nt: return {Subspace::OneHoleNoDouble, cutoff};
        case ModelId::kondo:
        case ModelId::kondo_holstein: return {Subspace::Kondo, cutoff};
    }
    throw std::logic_error("unknown model id");
}

int particle_number_of(const ModelSpec& spec) {
    const int L = spec.sites();
    if (spec.electrons && spec.model != ModelId::hubbard && spec.model != ModelId::holstein_hubbard)
        throw ValidationError("electron count is fixed for model " + model_name(spec.model));
    switch (subspace_of(spec).kind) {
        case Subspace::SingleOccupancy: return L;
        case Subspace::OneHoleNoDouble: return L - 1;
        case Subspace::Kondo: return 2 * L;
        case Subspace::Full: {
            const int n = spec.electrons.value_or(L);
            if (n < 0 || n > 2 * L) throw ValidationError("electron count " + std::to_string(n) + " out of range");
            return n;
        }
    }
    throw std::logic_error("unknown subspace");
}

std::vector<int> sectors_of(const ModelSpec& spec) {
    const int L = spec.sites();
    const int n = particle_number_of(spec);
    int lo = 0, hi = 0;
    switch (subspace_of(spec).kind) {
        case Subspace::SingleOccupancy: lo = -L, hi = L; break;
        case Subspace::OneHoleNoDouble: lo = -(L - 1), hi = L - 1; break;
        case Subspace::Kondo: lo = -2 * L, hi = 2 * L; break;
        case Subspace::Full: lo = std::max(-n, n - 2 * L), hi = std::min(n, 2 * L - n); break;
    }
    std::vector<int> out;
    for (int m = lo; m <= hi; m += 2) out.push_back(m);
    return out;
}

BasisPtr basis_for(const ModelSpec& spec, std::optional<int> two_m) {
    if (spec.sites() == 0) throw ValidationError("empty lattice");
    return share(enumerate_sector(spec.graph, subspace_of(spec), particle_number_of(spec), two_m));
}

SparseOperator build_on(const ModelSpec& spec, const BasisPtr& b) {
    const int L = spec.sites();
    if (b->sites() != L) throw ValidationError("basis does not match the lattice");
    if (has_phonons(spec.model) && !(spec.omega > 0)) throw ValidationError("phonon frequency omega must be positive");
    switch (spec.model) {
        case ModelId::mlm: return heisenberg_sum(b, complete_bipartite(spec.graph));
        case ModelId::heisenberg: {
            Dense j = matrix_or_zero(spec.j, L, "J");
            j.diagonal().setZero();  // J_xx plays no role
            return heisenberg_sum(b, j);
        }
        case ModelId::hubbard:
            return hopping(b, matrix_or_zero(spec.t, L, "t")) + coulomb(b, matrix_or_zero(spec.u, L, "U"));
        case ModelId::hubbard_nt: return hopping(b, matrix_or_zero(spec.t, L, "t"), true);
        case ModelId::holstein_hubbard:
            return hopping(b, matrix_or_zero(spec.t, L, "t")) + coulomb(b, matrix_or_zero(spec.u, L, "U")) +
                   electron_phonon(b, matrix_or_zero(spec.g, L, "g")) + total_phonon_number(b).scaled(spec.omega);
        case ModelId::holstein_nt:
            return hopping(b, matrix_or_zero(spec.t, L, "t"), true) +
                   electron_phonon(b, matrix_or_zero(spec.g, L, "g")) + total_phonon_number(b).scaled(spec.omega);
        case ModelId::kondo:
        case ModelId::kondo_holstein: {
            SparseOperator h = hopping(b, matrix_or_zero(spec.t, L, "t")) + coulomb(b, matrix_or_zero(spec.u, L, "U"));
            if (spec.kondo_j != 0.0)
                for (int x = 0; x < L; ++x)
                    h = h + spin_dot(b, {x, Species::c}, {x, Species::f}).scaled(spec.kondo_j);
            if (spec.model == ModelId::kondo_holstein)
                h = h + electron_phonon(b, matrix_or_zero(spec.g, L, "g")) +
                    total_phonon_number(b).scaled(spec.omega);
            return h;
        }
    }
    throw std::logic_error("unknown model id");
}

BuiltModel build(const ModelSpec& spec, std::optional<int> two_m) {
    auto b = basis_for(spec, two_m);
    return {b, build_on(spec, b)};
}

UEffective u_effective(const ModelSpec& spec) {
    if (!(spec.omega > 0)) throw ValidationError("u_effective needs omega > 0");
    const int L = spec.sites();
    const Dense u = matrix_or_zero(spec.u, L, "U");
    const Dense g = matrix_or_zero(spec.g, L, "g");
    Dense ue = u - (2.0 / spec.omega) * g * g.transpose();
    ue = 0.5 * (ue + ue.transpose());
    Eigen::SelfAdjointEigenSolver<Dense> es(ue, Eigen::EigenvaluesOnly);
    return {ue, es.eigenvalues()(0)};
}

bool ValidationReport::ok() const { return first_failure() == nullptr; }

const ConditionResult* ValidationReport::first_failure() const {
    for (const auto& c : conditions)
        if (!c.passed) return &c;
    return nullptr;
}

const ConditionResult* ValidationReport::find(const std::string& name) const {
    for (const auto& c : conditions)
        if (c.name == name) return &c;
    return nullptr;
}

ValidationReport validate(const ModelSpec& spec) {
    ValidationReport r;
    Checker c{r};
    const Graph& g = spec.graph;
    const int L = g.vertex_count();
    c.add("graph:nonempty", L > 0, "lattice has no sites");
    if (L == 0) return r;
    c.add("graph:connected", g.is_connected(), "lattice is not connected");
    if (!g.is_connected()) return r;

    auto matrix = [&](const Dense& m, const char* what) -> std::optional<Dense> {
        try {
            return matrix_or_zero(m, L, what);
        } catch (const ValidationError& e) {
            c.add(std::string("couplings:") + what, false, e.what());
            return std::nullopt;
        }
    };
    const auto t = matrix(spec.t, "t"), u = matrix(spec.u, "U"), j = matrix(spec.j, "J"), gm = matrix(spec.g, "g");
    if (!t || !u || !j || !gm) return r;

    if (has_phonons(spec.model)) {
        c.add("phonons:omega_positive", spec.omega > 0, "omega = " + fmt(spec.omega));
        c.add("phonons:cutoff", spec.n_max >= 0, "n_max = " + std::to_string(spec.n_max));
    }

    if (is_nt(spec.model)) {
        // (i) positive hopping on every edge of G^t
        std::string neg;
        for (int x = 0; x < L && neg.empty(); ++x)
            for (int y = x + 1; y < L; ++y)
                if ((*t)(x, y) < 0) {
                    neg = "t(" + std::to_string(x) + "," + std::to_string(y) + ") = " + fmt((*t)(x, y));
                    break;
                }
        c.add("nagaoka:hopping_positive", neg.empty(), neg);
        // (ii) a normal spanning tree of G inside G^t
        const Graph tree = normal_spanning_tree(g, 0);
        std::string missing;
        for (auto [a, b] : tree.edges())
            if ((*t)(a, b) == 0.0) {
                missing = "tree edge " + std::to_string(a) + "-" + std::to_string(b) + " missing from G^t";
                break;
            }
        c.add("nagaoka:spanning_tree", missing.empty(), missing);
        // (iii) G_Lambda(M) connected for every M
        const Graph gt = support_graph(*t);
        std::string disc;
        for (int tm = -(L - 1); tm <= L - 1 && disc.empty(); tm += 2) {
            auto cg = nt_config_graph(gt, tm);
            if (cg.is_connected()) continue;
            auto comp = cg.components();
            const int n_comp = *std::max_element(comp.begin(), comp.end()) + 1;
            std::size_t rep = 0;
            while (comp[rep] != 1) ++rep;
            disc = "M=" + half(tm) + ": " + std::to_string(n_comp) + " components; " + config_str(cg.nodes()[0]) +
                   " and " + config_str(cg.nodes()[rep]) + " are not linked by hole moves";
        }
        c.add("nagaoka:connectivity", disc.empty(), disc);
        return r;
    }

    auto bip = bipartition(g);
    c.add("graph:bipartite", bip.has_value(), "lattice has an odd cycle");
    if (!bip) return r;
    if (L % 2) r.notes.push_back("odd number of sites: the half-filled theorems are stated for even |Lambda|");

    switch (spec.model) {
        case ModelId::mlm: break;
        case ModelId::heisenberg: {
            std::string neg;
            for (int x = 0; x < L && neg.empty(); ++x)
                for (int y = x + 1; y < L; ++y)
                    if ((*j)(x, y) < 0) {
                        neg = "J(" + std::to_string(x) + "," + std::to_string(y) + ") = " + fmt((*j)(x, y));
                        break;
                    }
            c.add("exchange:coupling_sign", neg.empty(), neg);
            check_tree_support(c, "exchange", g, *bip, *j, "J");
            break;
        }
        case ModelId::hubbard:
        case ModelId::holstein_hubbard:
        case ModelId::kondo:
        case ModelId::kondo_holstein: {
            check_tree_support(c, "hopping", g, *bip, *t, "t");
            const bool phonon = has_phonons(spec.model);
            const bool strict = !is_kondo(spec.model);
            if (phonon) {
                check_row_sums(c, *gm);
                if (spec.omega > 0)
                    check_definite(c, strict ? "ueff_positive_definite" : "ueff_positive_semidefinite",
                                   u_effective(spec).matrix, strict);
            } else {
                check_definite(c, strict ? "u_positive_definite" : "u_positive_semidefinite", *u, strict);
            }
            if (is_kondo(spec.model)) c.add("kondo:coupling_nonzero", spec.kondo_j != 0.0, "J = 0 has no sign");
            if (spec.electrons && *spec.electrons != L)
                r.notes.push_back("electron count differs from half filling; the total-spin theorem does not apply");
            break;
        }
        default: break;
    }
    return r;
}

KondoGraphs kondo_graphs(const Graph& g) {
    auto bip = bipartition(g);
    if (!bip) throw ValidationError("graph not bipartite");
    const int L = g.vertex_count();
    std::vector<std::string> labels;
    for (int x = 0; x < L; ++x) {
        labels.push_back("c" + std::to_string(x));
        labels.push_back("f" + std::to_string(x));
    }
    std::vector<std::pair<int, int>> af, f;
    for (auto [x, y] : g.edges()) {
        af.emplace_back(2 * x, 2 * y);
        f.emplace_back(2 * x, 2 * y);
        f.emplace_back(2 * x, 2 * y + 1);
        f.emplace_back(2 * y, 2 * x + 1);
    }
    for (int x = 0; x < L; ++x) af.emplace_back(2 * x, 2 * x + 1);
    KondoGraphs out{Graph(2 * L, af, labels), Graph(2 * L, f, labels), {}, {}};
    // AF: A^c with B^f; F: A^c with A^f. Built directly, since the F graph of
    // a single site has no edges.
    auto doubled = [&](bool flip_f) {
        Bipartition b;
        b.side.resize(std::size_t(2 * L));
        for (int x = 0; x < L; ++x) {
            b.side[2 * x] = bip->side[x];
            b.side[2 * x + 1] = flip_f ? 1 - bip->side[x] : bip->side[x];
        }
        for (int v = 0; v < 2 * L; ++v) (b.side[v] == 0 ? b.part_a : b.part_b).push_back(v);
        return b;
    };
    out.af_bip = doubled(true);
    out.f_bip = doubled(false);
    for (const auto& [gr, b] : {std::pair{&out.af, &out.af_bip}, std::pair{&out.f, &out.f_bip}})
        for (auto [u, v] : gr->edges())
            if (b->side[u] == b->side[v]) throw std::logic_error("doubled lattice lost bipartiteness");
    return out;
}

}  // namespace spinstab
