#include "spinstab/spectra.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "spinstab/error.hpp"

namespace spinstab {

namespace {

void require_real_square(const SparseOperator& h) {
    if (h.rows() != h.cols()) throw std::invalid_argument("eigensolver needs a square operator");
    if (h.imaginary()) throw std::invalid_argument("eigensolver needs a real operator");
    if (h.rows() == 0) throw std::invalid_argument("eigensolver needs a nonempty operator");
}

double scale(double theta) { return std::max(1.0, std::abs(theta)); }

void project_out(Vec& w, const Dense& locked, int nlocked) {
    if (nlocked == 0) return;
    auto l = locked.leftCols(nlocked);
    w -= l * (l.transpose() * w);
}

struct Pair {
    double theta;
    Vec x;
    double residual;
    int restarts;
};

// Lanczos with full reorthogonalization and thick restarts: after m steps the
// lowest half of the Ritz vectors is kept together with the residual direction.
Pair lanczos_one(const SparseOperator::Matrix& h, const Dense& locked, int nlocked, const LanczosOptions& opt,
                 std::mt19937_64& rng) {
    const Eigen::Index n = h.rows();
    const Eigen::Index free = n - nlocked;
    if (free <= 0) throw SolverError("no directions left after deflation");
    const Eigen::Index m = std::min<Eigen::Index>(std::max(opt.krylov_dim, 4), free);

    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = double(rng() >> 11) * 0x1.0p-53 - 0.5;
    project_out(v, locked, nlocked);
    v.normalize();

    Dense basis(n, m);
    Dense proj = Dense::Zero(m, m);
    basis.col(0) = v;
    Eigen::Index start = 0;
    double last_residual = 0;
    for (int restart = 0; restart <= opt.max_restarts; ++restart) {
        Eigen::Index k = start;
        Vec r;
        double b = 0;
        for (Eigen::Index j = start; j < m; ++j) {
            Vec w = h * basis.col(j);
            auto q = basis.leftCols(j + 1);
            Vec c = q.transpose() * w;
            w -= q * c;
            const Vec c2 = q.transpose() * w;
            w -= q * c2;
            c += c2;
            project_out(w, locked, nlocked);
            proj.block(0, j, j + 1, 1) = c;
            proj.block(j, 0, 1, j + 1) = c.transpose();
            b = w.norm();
            k = j + 1;
            if (j == m - 1 || b <= 1e-12 * scale(c(j))) {
                r = w;
                break;
            }
            basis.col(j + 1) = w / b;
        }
        Eigen::SelfAdjointEigenSolver<Dense> es(proj.topLeftCorner(k, k));
        Vec x = basis.leftCols(k) * es.eigenvectors().col(0);
        project_out(x, locked, nlocked);
        x.normalize();
        const Vec hx = h * x;
        const double theta = x.dot(hx);
        last_residual = (hx - theta * x).norm();
        if (last_residual <= opt.tol * scale(theta)) return {theta, x, last_residual, restart};

        const Eigen::Index keep = std::max<Eigen::Index>(1, std::min(k - 1, k / 2));
        if (b <= 1e-12 * scale(theta) || keep + 1 > m) {
            // exhausted Krylov space without the requested accuracy: start over from x
            basis.col(0) = x;
            proj.setZero();
            start = 0;
            continue;
        }
        Dense kept = basis.leftCols(k) * es.eigenvectors().leftCols(keep);
        basis.leftCols(keep) = kept;
        proj.setZero();
        for (Eigen::Index i = 0; i < keep; ++i) proj(i, i) = es.eigenvalues()(i);
        Vec nv = r;
        auto q = basis.leftCols(keep);
        nv -= q * (q.transpose() * nv);
        project_out(nv, locked, nlocked);
        basis.col(keep) = nv.normalized();
        start = keep;
    }
    std::ostringstream os;
    os << "Lanczos did not converge after " << opt.max_restarts << " restarts (residual " << last_residual << ")";
    throw SolverError(os.str());
}

}  // namespace

Spectrum dense_eigensolve(const SparseOperator& h, std::size_t threshold) {
    require_real_square(h);
    if (std::size_t(h.rows()) > threshold) {
        std::ostringstream os;
        os << "dimension " << h.rows() << " exceeds the dense threshold " << threshold;
        throw SolverError(os.str());
    }
    Eigen::SelfAdjointEigenSolver<Dense> es(h.dense());
    if (es.info() != Eigen::Success) throw SolverError("dense eigensolver failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

Eigenpairs lanczos_ground(const SparseOperator& h, int k, const LanczosOptions& opt) {
    require_real_square(h);
    if (k < 1) throw std::invalid_argument("lanczos_ground needs k >= 1");
    if (k > h.rows()) throw std::invalid_argument("more eigenpairs requested than the dimension");
    std::mt19937_64 rng(opt.seed);
    Eigenpairs out;
    out.values.resize(k);
    out.residuals.resize(k);
    out.vectors.resize(h.rows(), k);
    for (int i = 0; i < k; ++i) {
        auto p = lanczos_one(h.matrix(), out.vectors, i, opt, rng);
        out.values(i) = p.theta;
        out.vectors.col(i) = p.x;
        out.residuals(i) = p.residual;
        out.restarts += p.restarts;
    }
    // deflation finds levels in order up to round-off; sort to be safe
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return out.values(a) < out.values(b); });
    Eigenpairs sorted = out;
    for (int i = 0; i < k; ++i) {
        sorted.values(i) = out.values(idx[i]);
        sorted.residuals(i) = out.residuals(idx[i]);
        sorted.vectors.col(i) = out.vectors.col(idx[i]);
    }
    return sorted;
}

GroundSpace ground_space(const SparseOperator& h, const SolverOptions& opt) {
    require_real_square(h);
    GroundSpace g;
    const Eigen::Index n = h.rows();
    if (std::size_t(n) <= opt.dense_threshold) {
        auto sp = dense_eigensolve(h, opt.dense_threshold);
        g.energy = sp.values(0);
        g.tolerance = opt.degeneracy_tol * scale(g.energy);
        Eigen::Index m = 1;
        while (m < n && sp.values(m) - g.energy <= g.tolerance) ++m;
        g.multiplicity = int(m);
        g.vectors = sp.vectors.leftCols(m);
        g.gap = m < n ? sp.values(m) - g.energy : -1;
        g.method = "dense";
    } else {
        std::mt19937_64 rng(opt.lanczos.seed);
        Dense locked(n, std::min<Eigen::Index>(n, opt.max_multiplicity + 1));
        std::vector<double> vals, res;
        for (int i = 0;; ++i) {
            if (i > opt.max_multiplicity) throw SolverError("ground-state cluster exceeds the multiplicity limit");
            if (i == n) break;
            auto p = lanczos_one(h.matrix(), locked, i, opt.lanczos, rng);
            if (i == 0) {
                g.energy = p.theta;
                g.tolerance = opt.degeneracy_tol * scale(g.energy);
            } else if (p.theta - g.energy > g.tolerance) {
                g.gap = p.theta - g.energy;
                break;
            }
            locked.col(i) = p.x;
            vals.push_back(p.theta);
            res.push_back(p.residual);
        }
        g.multiplicity = int(vals.size());
        g.vectors = locked.leftCols(g.multiplicity);
        g.energy = *std::min_element(vals.begin(), vals.end());
        g.method = "lanczos";
    }
    g.residuals.resize(g.multiplicity);
    for (int i = 0; i < g.multiplicity; ++i)
        g.residuals(i) = (h.matrix() * g.vectors.col(i) - g.energy * g.vectors.col(i)).norm();
    return g;
}

SpinValue total_spin_of(const Vec& psi, const SparseOperator& s2) {
    if (s2.imaginary()) throw std::invalid_argument("S^2 must be real");
    if (s2.cols() != psi.size()) throw std::invalid_argument("vector and S^2 dimensions differ");
    if (std::abs(psi.norm() - 1.0) > 1e-8) throw std::invalid_argument("vector not normalized");
    const Vec s2psi = s2.matrix() * psi;
    const double v = psi.dot(s2psi);
    const double s = 0.5 * (-1.0 + std::sqrt(std::max(0.0, 1.0 + 4.0 * v)));
    const int two_s = int(std::lround(2 * s));
    const double ss = 0.5 * two_s * (0.5 * two_s + 1.0);
    const double r = (s2psi - ss * psi).norm();
    if (r > kSpinResidualTol) {
        std::ostringstream os;
        os << "not an S^2 eigenvector: <S^2> = " << v << ", residual " << r;
        throw SpinMixtureError(os.str());
    }
    return {two_s, v, r};
}

std::vector<SpinValue> resolve_spins(Dense& vectors, const SparseOperator& s2) {
    const Dense g = vectors.transpose() * (s2.matrix() * vectors);
    Eigen::SelfAdjointEigenSolver<Dense> es(0.5 * (g + g.transpose()));
    vectors = vectors * es.eigenvectors();
    std::vector<SpinValue> out;
    for (Eigen::Index i = 0; i < vectors.cols(); ++i) {
        Vec c = vectors.col(i);
        c.normalize();
        vectors.col(i) = c;
        out.push_back(total_spin_of(c, s2));
    }
    return out;
}

}  // namespace spinstab
