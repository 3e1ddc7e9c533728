#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace spinstab {

// Undirected simple graph on vertices 0..n-1. Immutable after construction.
class Graph {
public:
    Graph() = default;
    Graph(int vertex_count, std::vector<std::pair<int, int>> edges,
          std::vector<std::string> labels = {});

    int vertex_count() const { return n_; }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    const std::vector<int>& neighbors(int v) const { return adj_.at(v); }
    bool has_edge(int u, int v) const;
    bool is_connected() const { return connected_; }
    std::string label(int v) const;
    const std::vector<std::string>& labels() const { return labels_; }

    bool operator==(const Graph& o) const { return n_ == o.n_ && edges_ == o.edges_; }

private:
    int n_ = 0;
    std::vector<std::pair<int, int>> edges_;  // u < v, sorted
    std::vector<std::vector<int>> adj_;       // ascending
    std::vector<std::string> labels_;
    bool connected_ = false;
};

struct Bipartition {
    std::vector<int> part_a;
    std::vector<int> part_b;
    std::vector<int> side;  // 0 for A, 1 for B

    bool in_a(int v) const { return side.at(v) == 0; }
    bool in_b(int v) const { return side.at(v) == 1; }
    std::uint64_t mask_b() const;
};

// BFS 2-coloring with vertex 0 in part A; nullopt on an odd cycle.
std::optional<Bipartition> bipartition(const Graph& g);

// DFS tree, ascending neighbour order.
Graph normal_spanning_tree(const Graph& g, int root);

enum class FamilyKind { chain, decorated_chain, star, bethe_ball, square, lieb };

struct LatticeFamily {
    FamilyKind kind = FamilyKind::chain;
    int z = 3;  // bethe_ball only
};

std::string family_name(FamilyKind k);
std::optional<FamilyKind> family_from_name(const std::string& s);

// chain(n): path on 2n vertices.
// decorated_chain(n): n cells (a, b, two leaves on b), 4n vertices.
// star(n): S_{2n-1}, centre 0.
// bethe_ball(z, n): root and shells H_1..H_n.
// square(n): 2n x 2n grid.
// lieb(n): 2n x 2n Lieb unit cells (corner + two edge sites), 12 n^2 vertices.
// Vertex labels are nested: member(n) is an induced subgraph of member(n+1)
// on the vertices 0..|member(n)|-1.
Graph family_member(const LatticeFamily& f, int n);

Graph path_graph(int n);
Graph cycle_graph(int n);

int sublattice_imbalance(const Graph& g);

struct DensityEntry {
    int n;
    int sites;
    int imbalance;
    // s_n = imbalance / (2 sites), kept as a reduced fraction
    std::int64_t s_num;
    std::int64_t s_den;
    double s() const { return double(s_num) / double(s_den); }
};

std::vector<DensityEntry> spin_density_sequence(const LatticeFamily& f, int n_min, int n_max);

// One-hole spin configuration: sigma_x in {-1, 0, +1}, exactly one zero.
using SpinConfig = std::vector<int>;

class ConfigGraph {
public:
    ConfigGraph(std::vector<SpinConfig> nodes, std::vector<std::pair<int, int>> edges, int two_m);

    const std::vector<SpinConfig>& nodes() const { return nodes_; }
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }
    int two_m() const { return two_m_; }
    bool is_connected() const;
    // component id per node
    std::vector<int> components() const;

private:
    std::vector<SpinConfig> nodes_;
    std::vector<std::pair<int, int>> edges_;
    int two_m_;
};

int hole_position(const SpinConfig& s);

// Nodes in lexicographic order of (hole position, spins).
ConfigGraph nt_config_graph(const Graph& g_t, int two_m);

// Vertex v of g becomes perm[v].
Graph relabel(const Graph& g, const std::vector<int>& perm);

Graph read_graph(std::istream& in);
void write_graph(std::ostream& out, const Graph& g);

}  // namespace spinstab
