#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "spinstab/error.hpp"
#include "spinstab/lattice.hpp"

using namespace spinstab;

namespace {

Graph triangle() { return Graph(3, {{0, 1}, {1, 2}, {0, 2}}); }

long binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

TEST(Graph, RejectsSelfLoopsAndDuplicates) {
    EXPECT_THROW(Graph(2, {{0, 0}}), std::invalid_argument);
    EXPECT_THROW(Graph(2, {{0, 1}, {1, 0}}), std::invalid_argument);
    EXPECT_THROW(Graph(2, {{0, 2}}), std::invalid_argument);
}

TEST(Graph, Connectivity) {
    EXPECT_TRUE(path_graph(4).is_connected());
    EXPECT_FALSE(Graph(4, {{0, 1}, {2, 3}}).is_connected());
}

TEST(Bipartition, Examples) {
    auto b = bipartition(path_graph(4));
    ASSERT_TRUE(b);
    EXPECT_EQ(b->part_a, (std::vector<int>{0, 2}));
    EXPECT_EQ(b->part_b, (std::vector<int>{1, 3}));
    EXPECT_FALSE(bipartition(triangle()));
    auto s = bipartition(family_member({FamilyKind::star}, 2));
    ASSERT_TRUE(s);
    EXPECT_EQ(s->part_a, (std::vector<int>{0}));
    EXPECT_EQ(s->part_b, (std::vector<int>{1, 2, 3}));
}

TEST(Bipartition, DisconnectedIsAnError) {
    EXPECT_THROW(bipartition(Graph(4, {{0, 1}, {2, 3}})), ValidationError);
}

TEST(SpanningTree, Examples) {
    EXPECT_EQ(normal_spanning_tree(path_graph(4), 0), path_graph(4));
    EXPECT_EQ(normal_spanning_tree(cycle_graph(4), 0), path_graph(4));
    auto star = family_member({FamilyKind::star}, 2);
    EXPECT_EQ(normal_spanning_tree(star, 0), star);
    EXPECT_THROW(normal_spanning_tree(star, 7), std::out_of_range);
}

TEST(SpanningTree, IsNormal) {
    // every graph edge joins a vertex to one of its tree ancestors
    for (auto g : {family_member({FamilyKind::square}, 2), family_member({FamilyKind::lieb}, 1), cycle_graph(6)}) {
        auto t = normal_spanning_tree(g, 0);
        EXPECT_EQ(int(t.edges().size()), g.vertex_count() - 1);
        std::vector<int> parent(g.vertex_count(), -1);
        std::vector<int> stack{0};
        std::vector<char> seen(g.vertex_count(), 0);
        seen[0] = 1;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int w : t.neighbors(u))
                if (!seen[w]) {
                    seen[w] = 1;
                    parent[w] = u;
                    stack.push_back(w);
                }
        }
        auto ancestor = [&](int a, int d) {
            for (int v = parent[d]; v >= 0; v = parent[v])
                if (v == a) return true;
            return false;
        };
        for (auto [u, v] : g.edges()) EXPECT_TRUE(ancestor(u, v) || ancestor(v, u)) << u << "-" << v;
    }
}

TEST(Families, MemberSizes) {
    auto s = family_member({FamilyKind::star}, 2);
    EXPECT_EQ(s.vertex_count(), 4);
    EXPECT_EQ(s.edges().size(), 3u);
    EXPECT_EQ(family_member({FamilyKind::bethe_ball, 3}, 1).vertex_count(), 4);
    EXPECT_EQ(family_member({FamilyKind::bethe_ball, 3}, 2).vertex_count(), 10);
    EXPECT_EQ(family_member({FamilyKind::square}, 1).vertex_count(), 4);
    EXPECT_EQ(family_member({FamilyKind::square}, 2).vertex_count(), 16);
    EXPECT_EQ(family_member({FamilyKind::chain}, 2).vertex_count(), 4);
    EXPECT_EQ(family_member({FamilyKind::lieb}, 1).vertex_count(), 12);
    EXPECT_EQ(family_member({FamilyKind::decorated_chain}, 3).vertex_count(), 12);
    EXPECT_THROW(family_member({FamilyKind::bethe_ball, 4}, 1), std::invalid_argument);
    EXPECT_THROW(family_member({FamilyKind::star}, 0), std::invalid_argument);
}

TEST(Families, NestedWithConsistentLabels) {
    for (auto f : {LatticeFamily{FamilyKind::chain}, LatticeFamily{FamilyKind::decorated_chain},
                   LatticeFamily{FamilyKind::star}, LatticeFamily{FamilyKind::bethe_ball, 3},
                   LatticeFamily{FamilyKind::square}, LatticeFamily{FamilyKind::lieb}}) {
        for (int n = 1; n <= 2; ++n) {
            auto a = family_member(f, n), b = family_member(f, n + 1);
            ASSERT_LT(a.vertex_count(), b.vertex_count());
            EXPECT_TRUE(a.is_connected());
            std::set<std::pair<int, int>> induced;
            for (auto e : b.edges())
                if (e.second < a.vertex_count()) induced.insert(e);
            const std::set<std::pair<int, int>> own(a.edges().begin(), a.edges().end());
            EXPECT_TRUE(induced == own)
                << family_name(f.kind) << " n=" << n;
            auto bip = bipartition(b);
            ASSERT_TRUE(bip);
            EXPECT_TRUE(bip->in_a(0));
        }
    }
}

TEST(Families, Imbalance) {
    EXPECT_EQ(sublattice_imbalance(family_member({FamilyKind::star}, 3)), 4);
    EXPECT_EQ(sublattice_imbalance(family_member({FamilyKind::square}, 1)), 0);
    EXPECT_THROW(sublattice_imbalance(triangle()), ValidationError);
    for (int n = 1; n <= 3; ++n) {
        auto l = family_member({FamilyKind::lieb}, n);
        EXPECT_EQ(3 * sublattice_imbalance(l), l.vertex_count());
        auto d = family_member({FamilyKind::decorated_chain}, n);
        EXPECT_EQ(2 * sublattice_imbalance(d), d.vertex_count());
    }
}

TEST(Families, SpinDensitySequences) {
    auto star = spin_density_sequence({FamilyKind::star}, 2, 4);
    ASSERT_EQ(star.size(), 3u);
    EXPECT_EQ(star[0].s_num, 1);
    EXPECT_EQ(star[0].s_den, 4);
    EXPECT_EQ(star[1].s_num, 1);
    EXPECT_EQ(star[1].s_den, 3);
    EXPECT_EQ(star[2].s_num, 3);
    EXPECT_EQ(star[2].s_den, 8);

    // Bethe z=3: imbalance = |sum_k (-1)^k |H_k|| with |H_k| = 3 * 2^(k-1)
    auto bethe = spin_density_sequence({FamilyKind::bethe_ball, 3}, 1, 6);
    double prev_gap = 1;
    for (const auto& e : bethe) {
        long signed_sum = 1, total = 1;
        for (int k = 1; k <= e.n; ++k) {
            long h = 3L << (k - 1);
            signed_sum += (k % 2 == 0) ? h : -h;
            total += h;
        }
        EXPECT_EQ(e.sites, total);
        EXPECT_EQ(e.imbalance, std::labs(signed_sum));
        double gap = std::abs(double(e.imbalance) / e.sites - 1.0 / 3.0);
        EXPECT_LT(gap, prev_gap);
        prev_gap = gap;
    }
    EXPECT_LT(prev_gap, 0.01);

    for (const auto& e : spin_density_sequence({FamilyKind::decorated_chain}, 1, 4)) {
        EXPECT_EQ(e.s_num, 1);
        EXPECT_EQ(e.s_den, 4);
    }
}

TEST(ConfigGraph, Examples) {
    auto sq = nt_config_graph(family_member({FamilyKind::square}, 1), 3);
    EXPECT_EQ(sq.nodes().size(), 4u);
    EXPECT_EQ(sq.edges().size(), 4u);
    EXPECT_TRUE(sq.is_connected());

    auto two = nt_config_graph(path_graph(2), 1);
    EXPECT_EQ(two.nodes().size(), 2u);
    EXPECT_EQ(two.edges().size(), 1u);
    EXPECT_TRUE(two.is_connected());

    // On a path the spin sequence read past the hole is conserved, so the
    // components are labelled by the 3 arrangements of (up, up, down).
    auto p4 = nt_config_graph(path_graph(4), 1);
    EXPECT_FALSE(p4.is_connected());
    auto comp = p4.components();
    EXPECT_EQ(*std::max_element(comp.begin(), comp.end()) + 1, 3);

    EXPECT_THROW(nt_config_graph(path_graph(4), 2), ValidationError);
    EXPECT_THROW(nt_config_graph(path_graph(4), 5), ValidationError);
}

TEST(ConfigGraph, NodeCountsAndComponents) {
    // component counts per sector (number of down spins 0..L-1), from a
    // brute-force search over hole moves
    const std::vector<std::pair<Graph, std::vector<int>>> cases{
        {family_member({FamilyKind::square}, 1), {1, 1, 1, 1}},
        {family_member({FamilyKind::star}, 2), {1, 3, 3, 1}},
        {path_graph(4), {1, 3, 3, 1}},
        {cycle_graph(5), {1, 1, 2, 1, 1}},
        {family_member({FamilyKind::star}, 3), {1, 5, 10, 10, 5, 1}},
    };
    for (const auto& [g, expected] : cases) {
        const int L = g.vertex_count();
        for (int downs = 0; downs < L; ++downs) {
            const int tm = L - 1 - 2 * downs;
            auto cg = nt_config_graph(g, tm);
            EXPECT_EQ(long(cg.nodes().size()), L * binom(L - 1, downs));
            for (const auto& s : cg.nodes()) {
                int abs_sum = 0, sum = 0;
                for (int v : s) {
                    abs_sum += std::abs(v);
                    sum += v;
                }
                EXPECT_EQ(abs_sum, L - 1);
                EXPECT_EQ(sum, tm);
            }
            auto comp = cg.components();
            const int n_comp = comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
            EXPECT_EQ(n_comp, expected[downs]) << "L=" << L << " downs=" << downs;
            EXPECT_EQ(cg.is_connected(), expected[downs] == 1);
        }
    }
}

TEST(Relabel, Examples) {
    auto star = family_member({FamilyKind::star}, 2);
    EXPECT_EQ(relabel(star, {0, 1, 2, 3}), star);
    EXPECT_EQ(relabel(star, {0, 2, 1, 3}), star);
    EXPECT_EQ(relabel(path_graph(4), {3, 2, 1, 0}), path_graph(4));
    EXPECT_THROW(relabel(star, {0, 0, 1, 2}), std::invalid_argument);
    auto g = relabel(path_graph(4), {1, 0, 2, 3});
    auto b = bipartition(g);
    ASSERT_TRUE(b);
    EXPECT_EQ(b->part_a, (std::vector<int>{0, 3}));
}

TEST(GraphIO, RoundTripAndErrors) {
    auto g = family_member({FamilyKind::lieb}, 1);
    std::stringstream ss;
    write_graph(ss, g);
    EXPECT_EQ(read_graph(ss), g);
    std::istringstream bad1("0 1\n");
    EXPECT_THROW(read_graph(bad1), ParseError);
    std::istringstream bad2("vertices 3\n0 x\n");
    EXPECT_THROW(read_graph(bad2), ParseError);
    std::istringstream bad3("vertices 2\n0 0\n");
    EXPECT_THROW(read_graph(bad3), ParseError);
    std::istringstream ok("# comment\nvertices 3\n0 1 # edge\n\n1 2\n");
    EXPECT_EQ(read_graph(ok), path_graph(3));
}
