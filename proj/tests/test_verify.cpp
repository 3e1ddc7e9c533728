#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "spinstab/config.hpp"
#include "spinstab/error.hpp"
#include "spinstab/verify.hpp"

using namespace spinstab;

namespace {

ModelSpec model(ModelId id, Graph g) {
    ModelSpec s;
    s.model = id;
    s.graph = std::move(g);
    s.t = nearest_neighbour(s.graph, 1.0);
    s.j = nearest_neighbour(s.graph, 1.0);
    s.u = 4.0 * Dense::Identity(s.sites(), s.sites());
    s.omega = 1.0;
    return s;
}

Graph star3() { return family_member({FamilyKind::star}, 2); }
Graph square4() { return family_member({FamilyKind::square}, 1); }

VerifyOptions serial() {
    VerifyOptions o;
    o.parallel = false;
    return o;
}

}  // namespace

TEST(Verify, HeisenbergChainSinglet) {
    const auto r = verify_model(model(ModelId::heisenberg, path_graph(4)));
    EXPECT_EQ(r.verdict, kVerdictPass);
    EXPECT_EQ(r.global.two_s_computed, 0);
    EXPECT_EQ(r.global.degeneracy, 1);
    // open 4-chain, J = 1 on bonds: -3/4 - sqrt(3)/2
    EXPECT_NEAR(r.global.e0, -0.75 - std::sqrt(3.0) / 2, 1e-10);
    const auto s = spectral_summary(model(ModelId::heisenberg, path_graph(4)));
    EXPECT_NEAR(r.global.e0, s.e0, 1e-10);
}

TEST(Verify, MlmStar) {
    ModelSpec s = model(ModelId::mlm, star3());
    s.j = complete_bipartite(s.graph);
    const auto r = verify_mlm_class(s);
    EXPECT_EQ(r.verdict, kVerdictPass);
    EXPECT_NEAR(r.global.e0, -1.25, 1e-10);
    EXPECT_EQ(r.global.two_s_computed, 2);
    EXPECT_EQ(r.global.degeneracy, 3);
    for (const auto& sec : r.sectors) {
        EXPECT_EQ(sec.ergodicity, "ergodic");
        ASSERT_TRUE(sec.margin);
        EXPECT_GT(*sec.margin, 0);
    }
}

TEST(Verify, HubbardStarIsConsequenceVerified) {
    const auto r = verify_model(model(ModelId::hubbard, star3()), serial());
    EXPECT_EQ(r.verdict, kVerdictConsequence);
    EXPECT_EQ(r.global.two_s_computed, 2);
    EXPECT_EQ(r.global.degeneracy, 3);
}

TEST(Verify, HubbardDimerEnergy) {
    const auto r = verify_model(model(ModelId::hubbard, path_graph(2)));
    EXPECT_NEAR(r.global.e0, 2 - 2 * std::sqrt(2.0), 1e-10);
    EXPECT_EQ(r.global.two_s_computed, 0);
}

TEST(Verify, NtSquare) {
    const auto r = verify_nt_class(model(ModelId::hubbard_nt, square4()));
    EXPECT_EQ(r.verdict, kVerdictPass);
    EXPECT_EQ(r.global.two_s_computed, 3);
    EXPECT_EQ(r.global.degeneracy, 4);
}

TEST(Verify, NtPathIsRejectedWithWitness) {
    try {
        verify_nt_class(model(ModelId::hubbard_nt, path_graph(4)));
        FAIL() << "expected a validation failure";
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("components"), std::string::npos) << e.what();
    }
}

TEST(Verify, NtStarIsNotConnected) {
    EXPECT_THROW(verify_nt_class(model(ModelId::hubbard_nt, star3())), ValidationError);
}

TEST(Verify, WrongClassIsRejected) {
    EXPECT_THROW(verify_nt_class(model(ModelId::hubbard, square4())), ValidationError);
    EXPECT_THROW(verify_kondo(model(ModelId::mlm, path_graph(2))), ValidationError);
}

TEST(Verify, Kondo) {
    ModelSpec af = model(ModelId::kondo, path_graph(2));
    af.kondo_j = 1;
    const auto a = verify_kondo(af);
    EXPECT_TRUE(a.passed());
    EXPECT_EQ(a.global.two_s_computed, 0);

    ModelSpec f = model(ModelId::kondo, star3());
    f.kondo_j = -1;
    const auto b = verify_kondo(f);
    EXPECT_TRUE(b.passed());
    EXPECT_EQ(b.global.two_s_computed, 4);
    EXPECT_EQ(b.global.degeneracy, 5);
}

TEST(Verify, HolsteinHubbardDimer) {
    ModelSpec s = model(ModelId::holstein_hubbard, path_graph(2));
    s.g = 0.5 * Dense::Identity(2, 2);
    s.n_max = 4;
    const auto r = verify_model(s);
    EXPECT_TRUE(r.passed());
    EXPECT_EQ(r.global.two_s_computed, 0);
    for (const auto& sec : r.sectors) EXPECT_EQ(sec.ergodicity, "cone-not-defined-under-truncation");
}

TEST(Verify, ConvergenceSweep) {
    ModelSpec s = model(ModelId::holstein_hubbard, path_graph(2));
    s.g = 0.5 * Dense::Identity(2, 2);
    const auto c = convergence_sweep(s, {4, 6, 8});
    ASSERT_EQ(c.entries.size(), 3u);
    EXPECT_TRUE(c.spin_stable);
    ASSERT_EQ(c.deltas.size(), 2u);
    EXPECT_LE(c.deltas.back().second, 1e-6);
    EXPECT_TRUE(c.converged);
    EXPECT_THROW(convergence_sweep(model(ModelId::hubbard, path_graph(2)), {4, 6}), ValidationError);
}

TEST(Verify, PredictedSpin) {
    EXPECT_EQ(predicted_two_s(model(ModelId::heisenberg, star3())), 2);
    EXPECT_EQ(predicted_two_s(model(ModelId::hubbard_nt, square4())), 3);
    ModelSpec away = model(ModelId::hubbard, path_graph(4));
    away.electrons = 2;
    EXPECT_FALSE(predicted_two_s(away));
}

TEST(Pairs, HubbardToMlm) {
    ModelSpec a = model(ModelId::hubbard, star3());
    ModelSpec b = model(ModelId::mlm, star3());
    b.j = complete_bipartite(b.graph);
    const auto r = verify_stability_pair(a, b);
    EXPECT_EQ(r.relation, "Q");
    EXPECT_NE(r.verdict, kVerdictFail);
    EXPECT_TRUE(r.projected_in_cone);
    EXPECT_GT(r.overlap, 0);
}

TEST(Pairs, PhononVacuum) {
    ModelSpec a = model(ModelId::holstein_hubbard, path_graph(2));
    a.g = 0.5 * Dense::Identity(2, 2);
    a.n_max = 4;
    const auto r = verify_stability_pair(a, model(ModelId::hubbard, path_graph(2)));
    EXPECT_EQ(r.relation, "phonon-vacuum");
    EXPECT_NE(r.verdict, kVerdictFail);
}

TEST(Pairs, Nesting) {
    for (ModelId id : {ModelId::mlm, ModelId::hubbard}) {
        const auto r = verify_stability_pair(model(id, path_graph(4)), model(id, path_graph(2)), {0, 1});
        EXPECT_EQ(r.relation, "nesting");
        ASSERT_TRUE(r.nesting);
        EXPECT_TRUE(r.nesting->ok());
        EXPECT_NE(r.verdict, kVerdictFail) << model_name(id);
    }
}

TEST(Pairs, UnsupportedPair) {
    EXPECT_THROW(verify_stability_pair(model(ModelId::mlm, path_graph(2)), model(ModelId::hubbard, path_graph(2))),
                 ValidationError);
}

TEST(Scan, StarSpinGrowsWithArms) {
    ModelTemplate tpl;
    const auto r = magnetic_order_scan({FamilyKind::star}, tpl, 2, 4);
    EXPECT_EQ(r.verdict, kVerdictPass);
    ASSERT_EQ(r.entries.size(), 3u);
    for (const auto& e : r.entries) {
        ASSERT_TRUE(e.two_s);
        EXPECT_EQ(*e.two_s, 2 * (e.n - 1)) << e.n;
    }
}

TEST(Scan, LargeMembersAreCountingOnly) {
    ModelTemplate tpl;
    const auto r = magnetic_order_scan({FamilyKind::decorated_chain}, tpl, 1, 3, {}, 100);
    for (const auto& e : r.entries) {
        EXPECT_EQ(e.ratio, "1/2");
        if (e.nnz_bound > 100) EXPECT_FALSE(e.diagonalized);
    }
}

TEST(Invariance, RelabeledSpectrumMatches) {
    const auto r = isomorphism_invariance(model(ModelId::hubbard, star3()), {3, 1, 0, 2});
    EXPECT_EQ(r.verdict, kVerdictPass);
    EXPECT_LE(r.max_energy_difference, 1e-9);
    EXPECT_THROW(isomorphism_invariance(model(ModelId::hubbard, star3()), {0, 0, 1, 2}), std::invalid_argument);
}

TEST(Invariance, RelabelMovesCouplings) {
    ModelSpec s = model(ModelId::hubbard, star3());
    s.u(0, 0) = 7;
    const auto r = relabel_spec(s, {3, 0, 1, 2});
    EXPECT_EQ(r.graph.neighbors(3).size(), 3u);
    EXPECT_DOUBLE_EQ(r.u(3, 3), 7);
    EXPECT_DOUBLE_EQ(r.t(3, 0), 1);
    // the comparison separates non-isomorphic lattices
    EXPECT_GT(std::abs(spectral_summary(s).e0 - spectral_summary(model(ModelId::hubbard, path_graph(4))).e0), 1e-3);
}

TEST(Constancy, HeisenbergCouplingChoices) {
    const Graph g = path_graph(4);
    ModelSpec nn = model(ModelId::heisenberg, g);
    ModelSpec extra = nn;
    extra.j(0, 3) = extra.j(3, 0) = 0.5;
    ModelSpec full = nn;
    full.j = complete_bipartite(g);
    const auto c = constancy_check({nn, extra, full});
    EXPECT_TRUE(c.constant);
    for (const auto& r : c.runs) EXPECT_EQ(r.global.two_s_computed, 0);
}

TEST(Report, JsonRoundTrip) {
    const auto r = verify_model(model(ModelId::heisenberg, path_graph(2)));
    const Json j = to_json(r);
    std::vector<std::string> keys;
    for (const auto& [k, v] : j.items()) keys.push_back(k);
    EXPECT_EQ(keys, (std::vector<std::string>{"model", "sectors", "global", "verdict", "tolerances", "timings"}));
    const auto back = report_from_json(Json::parse(j.dump()));
    EXPECT_EQ(back.verdict, r.verdict);
    EXPECT_EQ(back.sectors.size(), r.sectors.size());
    EXPECT_EQ(back.global.two_s_computed, r.global.two_s_computed);
    EXPECT_DOUBLE_EQ(back.global.e0, r.global.e0);
    EXPECT_EQ(to_json(back).dump(), j.dump());
}

TEST(Report, RejectsEmptyOrUnsettled) {
    GroundStateReport r;
    r.spec = model(ModelId::heisenberg, path_graph(2));
    r.verdict = kVerdictPass;
    EXPECT_THROW(to_json(r), std::invalid_argument);
    r.sectors.push_back({});
    r.verdict = "maybe";
    EXPECT_THROW(to_json(r), std::invalid_argument);
    r.checks = {{"a", true, "", "sampled"}};
    r.settle();
    EXPECT_EQ(r.verdict, kVerdictConsequence);
    r.checks.push_back({"b", false, ""});
    r.settle();
    EXPECT_EQ(r.verdict, kVerdictFail);
}

TEST(Report, Tolerances) {
    Tolerances t;
    EXPECT_NO_THROW(t.check());
    t.strict = 0;
    EXPECT_THROW(t.check(), ValidationError);
    EXPECT_EQ(format_half(3), "3/2");
    EXPECT_EQ(format_half(-4), "-2");
}

TEST(Config, ParsesKeysAndRecipes) {
    std::istringstream in(
        "# comment\n"
        "command = verify\n"
        "model = hubbard\n"
        "lattice = star:2\n"
        "U = 8\n"
        "t = nn=0.5\n"
        "strict_tol = 1e-9\n");
    RunConfig cfg;
    read_config(in, cfg);
    check_config(cfg);
    const auto s = make_spec(cfg);
    EXPECT_EQ(s.model, ModelId::hubbard);
    EXPECT_EQ(s.sites(), 4);
    EXPECT_DOUBLE_EQ(s.u(2, 2), 8);
    EXPECT_DOUBLE_EQ(s.t(0, 1), 0.5);
    EXPECT_DOUBLE_EQ(cfg.tol.strict, 1e-9);
}

TEST(Config, Errors) {
    RunConfig cfg;
    EXPECT_THROW(apply_setting(cfg, "bogus", "1"), ParseError);
    EXPECT_THROW(apply_setting(cfg, "n_max", "lots"), ParseError);
    EXPECT_THROW(parse_lattice("moebius:3"), ParseError);
    EXPECT_THROW(CouplingRecipe::parse("nn="), ParseError);
    std::istringstream bad("model hubbard\n");
    EXPECT_THROW(read_config(bad, cfg), ParseError);
    cfg.command = "verify";
    cfg.lattice = "path:2";
    cfg.model = "nonsense";
    EXPECT_THROW(check_config(cfg), ParseError);
}

TEST(Config, LatticeSpellings) {
    EXPECT_EQ(parse_lattice("path:4").vertex_count(), 4);
    EXPECT_EQ(parse_lattice("cycle:6").edges().size(), 6u);
    EXPECT_EQ(parse_lattice("lieb:1").vertex_count(), 12);
    EXPECT_EQ(parse_lattice("star:3").vertex_count(), 6);
    EXPECT_EQ(parse_int_list("2,0,1"), (std::vector<int>{2, 0, 1}));
}
