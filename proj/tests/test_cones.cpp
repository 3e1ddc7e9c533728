#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "spinstab/cones.hpp"
#include "spinstab/error.hpp"
#include "spinstab/spectra.hpp"

using namespace spinstab;

namespace {

ModelSpec model(ModelId id, Graph g) {
    ModelSpec s;
    s.model = id;
    s.graph = std::move(g);
    s.t = nearest_neighbour(s.graph, 1.0);
    s.j = nearest_neighbour(s.graph, 1.0);
    s.u = 4.0 * Dense::Identity(s.sites(), s.sites());
    return s;
}

Cone cone_of(const ModelSpec& s, const BasisPtr& b) { return *model_cone(s, b); }

Graph star3() { return family_member({FamilyKind::star}, 2); }

// occupation-frame matrix from a coefficient-frame one
Dense from_frame(const Dense& a, const Cone& c) {
    Vec d(a.rows());
    for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = c.sign[std::size_t(i)];
    return d.asDiagonal() * a * d.asDiagonal();
}

Vec ground(const SparseOperator& h) { return ground_space(h).vectors.col(0); }

}  // namespace

TEST(Cone, OrderUnitAndBasisVectors) {
    auto s = model(ModelId::mlm, star3());
    auto b = basis_for(s, 0);
    auto c = cone_of(s, b);
    EXPECT_EQ(c.kind, ConeKind::Diagonal);
    auto p = positivity(c.order_unit, c);
    EXPECT_TRUE(p.strict);
    EXPECT_DOUBLE_EQ(p.margin, 1.0);
    Vec e = Vec::Zero(Eigen::Index(c.dim()));
    e(2) = c.sign[2];
    EXPECT_TRUE(membership(e, c));
    EXPECT_FALSE(strict_positivity(e, c));
    EXPECT_FALSE(membership(-e, c));
}

TEST(Cone, MlmSignsMatchDistinguishedVectors) {
    auto g = star3();
    auto bip = *bipartition(g);
    auto b = share(enumerate_sector(g, {Subspace::SingleOccupancy}, 4, 0));
    auto c = mlm_cone(b, bip);
    for (std::uint64_t x = 0; x < 16; ++x) {
        if (std::popcount(x) != 2) continue;
        auto v = mlm_basis_vector(*b, bip, x);
        EXPECT_EQ(c.sign[v.index], v.sign);
    }
}

TEST(Cone, HubbardOrderUnitIsIdentity) {
    auto s = model(ModelId::hubbard, path_graph(2));
    auto b = basis_for(s, std::nullopt);
    auto c = cone_of(s, b);
    ASSERT_EQ(c.kind, ConeKind::PSDMatrix);
    // blocks by |X|: sizes 1, 2, 1
    ASSERT_EQ(c.block_size.size(), 3u);
    EXPECT_EQ(c.block_size[0], 1);
    EXPECT_EQ(c.block_size[1], 2);
    EXPECT_EQ(c.block_size[2], 1);
    for (const auto& blk : coefficient_blocks(c.order_unit, c))
        EXPECT_EQ(blk, Dense::Identity(blk.rows(), blk.cols()));
    auto p = positivity(c.order_unit, c);
    EXPECT_TRUE(p.strict);
    EXPECT_DOUBLE_EQ(p.margin, 1.0);
    // rank one array: member, not strict
    auto blocks = coefficient_blocks(c.order_unit, c);
    blocks[1] = Dense{{1, 1}, {1, 1}};
    Vec r = from_blocks(blocks, c);
    EXPECT_TRUE(membership(r, c));
    blocks[1] = Dense{{1, 1}, {1, 1}} + 1e-3 * Dense::Identity(2, 2);
    EXPECT_TRUE(strict_positivity(from_blocks(blocks, c), c));
    blocks[1] = Dense{{1, 2}, {2, 1}};
    EXPECT_FALSE(membership(from_blocks(blocks, c), c));
    blocks[1] = Dense{{1, 0.5}, {0, 1}};
    auto q = positivity(from_blocks(blocks, c), c);
    EXPECT_FALSE(q.member);
    EXPECT_DOUBLE_EQ(q.asymmetry, 0.5);
}

TEST(Cone, HubbardNeedsHalfFilling) {
    auto s = model(ModelId::hubbard, path_graph(2));
    s.electrons = 1;
    EXPECT_THROW(cone_of(s, basis_for(s, std::nullopt)), ValidationError);
    auto p = model(ModelId::holstein_nt, path_graph(2));
    EXPECT_FALSE(model_cone(p, basis_for(p, std::nullopt)).has_value());
}

TEST(Cone, GaugeFix) {
    auto s = model(ModelId::hubbard_nt, family_member({FamilyKind::square}, 1));
    auto c = cone_of(s, basis_for(s, 1));
    Vec xi = c.order_unit / c.order_unit.norm();
    EXPECT_EQ(gauge_fix(Vec(-xi), c), xi);
    CVec ixi = std::complex<double>(0, 1) * xi.cast<std::complex<double>>();
    EXPECT_LE((gauge_fix(ixi, c) - xi.cast<std::complex<double>>()).norm(), 1e-15);
    CVec phase = std::polar(1.0, 2.1) * xi.cast<std::complex<double>>();
    EXPECT_LE((gauge_fix(phase, c) - xi.cast<std::complex<double>>()).norm(), 1e-14);
    // orthogonal to the order unit
    Vec o = Vec::Zero(xi.size());
    o(0) = c.sign[0];
    o(1) = -c.sign[1];
    EXPECT_THROW(gauge_fix(o, c), std::domain_error);
}

TEST(Cone, ModularConjugationIsAnInvolution) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd;
    for (auto id : {ModelId::mlm, ModelId::hubbard}) {
        auto s = model(id, path_graph(4));
        auto c = cone_of(s, basis_for(s, std::nullopt));
        CVec v(Eigen::Index(c.dim()));
        for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = {nd(rng), nd(rng)};
        EXPECT_LE((modular_conjugation(modular_conjugation(v, c), c) - v).norm(), 1e-14);
        // fixes the cone
        EXPECT_EQ(modular_conjugation(c.order_unit, c), c.order_unit);
    }
    // PSD: transposes the coefficient array
    auto s = model(ModelId::hubbard, path_graph(2));
    auto c = cone_of(s, basis_for(s, std::nullopt));
    auto blocks = coefficient_blocks(c.order_unit, c);
    blocks[1] = Dense{{1, 2}, {3, 4}};
    auto t = coefficient_blocks(modular_conjugation(from_blocks(blocks, c), c), c);
    EXPECT_EQ(t[1], (Dense{{1, 3}, {2, 4}}));
}

TEST(Ergodicity, TwoByTwoExamples) {
    // two-site M = 0 basis, two states; work in the coefficient frame
    auto s = model(ModelId::heisenberg, path_graph(2));
    auto b = basis_for(s, 0);
    auto c = cone_of(s, b);
    ASSERT_EQ(c.dim(), 2u);
    auto op = [&](const Dense& a) { return SparseOperator(from_frame(a, c).sparseView(), b, b, true); };
    auto flip = ergodicity(op(Dense{{0, -1}, {-1, 0}}), c);
    EXPECT_TRUE(flip.ergodic);
    EXPECT_EQ(flip.mode, "structural");
    auto diag = ergodicity(op(Dense{{0, 0}, {0, 1}}), c);
    EXPECT_FALSE(diag.ergodic);
    EXPECT_TRUE(diag.metzler);
    EXPECT_FALSE(diag.irreducible);
    auto wrong = ergodicity(op(Dense{{0, 1}, {1, 0}}), c);
    EXPECT_FALSE(wrong.metzler);
    EXPECT_FALSE(wrong.witness.empty());
}

TEST(Ergodicity, NtSquareEverySector) {
    auto s = model(ModelId::hubbard_nt, family_member({FamilyKind::square}, 1));
    for (int m : sectors_of(s)) {
        auto built = build(s, m);
        auto e = ergodicity(built.h, cone_of(s, built.basis));
        EXPECT_TRUE(e.ergodic) << "2M = " << m << ": " << e.witness;
    }
}

TEST(Ergodicity, NtPathIsReducible) {
    auto s = model(ModelId::hubbard_nt, path_graph(4));
    auto built = build(s, -1);
    auto e = ergodicity(built.h, cone_of(s, built.basis));
    EXPECT_TRUE(e.metzler);
    EXPECT_FALSE(e.irreducible);
    EXPECT_EQ(e.witness, "off-diagonal graph has 3 components");
}

TEST(Ergodicity, HeisenbergAndHubbardGroundStates) {
    for (auto id : {ModelId::heisenberg, ModelId::mlm, ModelId::hubbard}) {
        auto s = model(id, path_graph(4));
        auto built = build(s, 0);
        auto c = cone_of(s, built.basis);
        auto e = ergodicity(built.h, c);
        EXPECT_TRUE(e.ergodic) << model_name(id) << ": " << e.witness;
        auto g = gauge_fix(ground(built.h), c);
        EXPECT_TRUE(strict_positivity(g, c)) << model_name(id);
    }
}

TEST(Ergodicity, HubbardIsConsequenceVerified) {
    auto s = model(ModelId::hubbard, star3());
    auto built = build(s, 0);
    auto e = ergodicity(built.h, cone_of(s, built.basis));
    EXPECT_TRUE(e.ergodic) << e.witness;
    EXPECT_EQ(e.mode, "consequence-verified");
    EXPECT_GT(e.margin, kStrictTol);
}

TEST(Ergodicity, KondoBothSigns) {
    for (double j : {2.0, -2.0}) {
        auto s = model(ModelId::kondo, path_graph(2));
        s.kondo_j = j;
        // the ferromagnetic singlet-free sector: |2M| = 2 for J < 0 has a unique ground state
        const int m = j > 0 ? 0 : 2;
        auto built = build(s, m);
        auto c = cone_of(s, built.basis);
        auto e = ergodicity(built.h, c);
        EXPECT_TRUE(e.ergodic) << "J = " << j << ": " << e.witness;
    }
}

TEST(Ergodicity, KondoSingleSiteSinglet) {
    auto s = model(ModelId::kondo, path_graph(1));
    s.t = Dense::Zero(1, 1);
    s.kondo_j = 2.0;
    auto built = build(s, 0);
    auto c = cone_of(s, built.basis);
    ASSERT_EQ(c.dim(), 2u);
    auto g = gauge_fix(ground(built.h), c);
    EXPECT_TRUE(strict_positivity(g, c));
    // the f configuration splits the coefficients into two 1x1 blocks
    EXPECT_EQ(c.block_size.size(), 2u);
}

TEST(Preservation, HeisenbergSemigroupInMlmBasis) {
    auto s = model(ModelId::heisenberg, family_member({FamilyKind::square}, 1));
    auto built = build(s, std::nullopt);
    auto c = cone_of(s, built.basis);
    for (double beta : {0.1, 1.0, 5.0}) {
        auto v = positivity_preserving(semigroup(built.h.dense(), beta), c);
        EXPECT_TRUE(v.holds) << beta << ": " << v.witness;
        EXPECT_TRUE(v.exhaustive);
    }
    // the sign-flipped model is not preserving
    auto v = positivity_preserving(semigroup(-built.h.dense(), 1.0), c);
    EXPECT_FALSE(v.holds);
    EXPECT_FALSE(v.witness.empty());
}

TEST(Preservation, SampledOnPsdCone) {
    auto s = model(ModelId::hubbard, path_graph(2));
    auto built = build(s, std::nullopt);
    auto c = cone_of(s, built.basis);
    auto id = positivity_preserving(Dense::Identity(Eigen::Index(c.dim()), Eigen::Index(c.dim())), c);
    EXPECT_TRUE(id.holds);
    EXPECT_FALSE(id.exhaustive);
    EXPECT_EQ(id.mode, "sampled");
    EXPECT_FALSE(positivity_preserving(-Dense::Identity(Eigen::Index(c.dim()), Eigen::Index(c.dim())), c).holds);
    auto e = positivity_preserving(semigroup(built.h.dense(), 1.0), c);
    EXPECT_TRUE(e.holds) << e.witness;
    // transposition preserves the cone; the sampled test sees it
    Dense t = Dense::Zero(Eigen::Index(c.dim()), Eigen::Index(c.dim()));
    for (std::size_t i = 0; i < c.dim(); ++i) t(Eigen::Index(i), Eigen::Index(c.transpose[i])) = c.sign[i] * c.sign[c.transpose[i]];
    EXPECT_TRUE(positivity_preserving(t, c).holds);
}

TEST(Monotonicity, RandomMetzlerPairs) {
    auto s = model(ModelId::mlm, star3());
    auto b = basis_for(s, 0);
    auto c = cone_of(s, b);
    const Eigen::Index n = Eigen::Index(c.dim());
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0, 1);
    for (int k = 0; k < 20; ++k) {
        Dense a(n, n), cc(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j <= i; ++j) {
                a(i, j) = a(j, i) = i == j ? 2 * u(rng) - 1 : -u(rng);
                cc(i, j) = cc(j, i) = u(rng) < 0.5 ? 0.0 : u(rng);
            }
        auto v = monotonicity_check(from_frame(a, c), from_frame(cc, c), c, {0.1, 1.0});
        EXPECT_TRUE(v.holds) << k << ": " << v.witness;
    }
    // preconditions
    Dense neg = -Dense::Identity(n, n);
    EXPECT_THROW(monotonicity_check(Dense::Zero(n, n), neg, c, {1.0}), ValidationError);
    Dense off = Dense::Ones(n, n);
    EXPECT_THROW(monotonicity_check(from_frame(off, c), Dense::Zero(n, n), c, {1.0}), ValidationError);
}

TEST(NestingCones, ChainTwoInChainFour) {
    const Graph small = path_graph(2), big = path_graph(4);
    for (auto kind : {NestingKind::mlm, NestingKind::nt, NestingKind::hubbard}) {
        auto n = make_nesting(kind, small, big, {0, 1});
        auto [cs, cb] = nesting_cones(n, small, big);
        auto r = nesting_consistency(n, cs, cb);
        EXPECT_TRUE(r.ok()) << int(kind) << ": " << r.witness;
        EXPECT_GT(r.order_unit_margin, 0);
    }
}

TEST(NestingCones, StarFamilyMembers) {
    const LatticeFamily star{FamilyKind::star};
    const Graph small = family_member(star, 1), big = family_member(star, 2);
    for (auto kind : {NestingKind::mlm, NestingKind::hubbard}) {
        auto n = make_nesting(kind, small, big, {0, 1});
        auto [cs, cb] = nesting_cones(n, small, big);
        EXPECT_TRUE(nesting_consistency(n, cs, cb).ok()) << int(kind);
    }
}

TEST(NestingCones, MismatchedSignsDetected) {
    // pair the small cone with a big cone built on the opposite bipartition
    const Graph small = path_graph(2), big = path_graph(4);
    auto n = make_nesting(NestingKind::mlm, small, big, {0, 1});
    auto q = *bipartition(big);
    std::swap(q.part_a, q.part_b);
    for (int& s : q.side) s = 1 - s;
    auto cs = mlm_cone(n.small, *bipartition(small));
    auto cb = mlm_cone(n.big, q);
    auto r = nesting_consistency(n, cs, cb);
    EXPECT_FALSE(r.ok());
    EXPECT_FALSE(r.witness.empty());
}
