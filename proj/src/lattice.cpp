#include "spinstab/lattice.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

#include "spinstab/error.hpp"

namespace spinstab {

Graph::Graph(int vertex_count, std::vector<std::pair<int, int>> edges, std::vector<std::string> labels)
    : n_(vertex_count), labels_(std::move(labels)) {
    if (n_ < 0) throw std::invalid_argument("negative vertex count");
    if (!labels_.empty() && int(labels_.size()) != n_)
        throw std::invalid_argument("label count does not match vertex count");
    std::set<std::pair<int, int>> seen;
    for (auto [u, v] : edges) {
        if (u < 0 || v < 0 || u >= n_ || v >= n_) throw std::invalid_argument("edge endpoint out of range");
        if (u == v) throw std::invalid_argument("self-loop at vertex " + std::to_string(u));
        auto e = std::minmax(u, v);
        if (!seen.insert(e).second)
            throw std::invalid_argument("duplicate edge " + std::to_string(e.first) + "-" + std::to_string(e.second));
    }
    edges_.assign(seen.begin(), seen.end());
    adj_.assign(n_, {});
    for (auto [u, v] : edges_) {
        adj_[u].push_back(v);
        adj_[v].push_back(u);
    }
    for (auto& a : adj_) std::sort(a.begin(), a.end());

    if (n_ == 0) {
        connected_ = false;
        return;
    }
    std::vector<char> seen_v(n_, 0);
    std::vector<int> stack{0};
    seen_v[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int w : adj_[u])
            if (!seen_v[w]) {
                seen_v[w] = 1;
                ++count;
                stack.push_back(w);
            }
    }
    connected_ = (count == n_);
}

bool Graph::has_edge(int u, int v) const {
    if (u < 0 || u >= n_) return false;
    const auto& a = adj_[u];
    return std::binary_search(a.begin(), a.end(), v);
}

std::string Graph::label(int v) const {
    if (!labels_.empty()) return labels_.at(v);
    return std::to_string(v);
}

std::uint64_t Bipartition::mask_b() const {
    std::uint64_t m = 0;
    for (int v : part_b) m |= std::uint64_t(1) << v;
    return m;
}

std::optional<Bipartition> bipartition(const Graph& g) {
    if (!g.is_connected()) throw ValidationError("graph not connected");
    const int n = g.vertex_count();
    std::vector<int> side(n, -1);
    std::queue<int> q;
    side[0] = 0;
    q.push(0);
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (int w : g.neighbors(u)) {
            if (side[w] < 0) {
                side[w] = 1 - side[u];
                q.push(w);
            } else if (side[w] == side[u]) {
                return std::nullopt;
            }
        }
    }
    Bipartition b;
    b.side = side;
    for (int v = 0; v < n; ++v) (side[v] == 0 ? b.part_a : b.part_b).push_back(v);
    return b;
}

Graph normal_spanning_tree(const Graph& g, int root) {
    const int n = g.vertex_count();
    if (root < 0 || root >= n) throw std::out_of_range("root out of range");
    if (!g.is_connected()) throw ValidationError("graph not connected");
    std::vector<char> seen(n, 0);
    std::vector<std::pair<int, int>> tree;
    // iterative DFS that mirrors the recursive visit order
    std::vector<std::pair<int, std::size_t>> stack{{root, 0}};
    seen[root] = 1;
    while (!stack.empty()) {
        auto& [u, i] = stack.back();
        const auto& nb = g.neighbors(u);
        if (i >= nb.size()) {
            stack.pop_back();
            continue;
        }
        int w = nb[i++];
        if (!seen[w]) {
            seen[w] = 1;
            tree.emplace_back(u, w);
            stack.emplace_back(w, 0);
        }
    }
    return Graph(n, tree, g.labels());
}

std::string family_name(FamilyKind k) {
    switch (k) {
        case FamilyKind::chain: return "chain";
        case FamilyKind::decorated_chain: return "decorated_chain";
        case FamilyKind::star: return "star";
        case FamilyKind::bethe_ball: return "bethe_ball";
        case FamilyKind::square: return "square";
        case FamilyKind::lieb: return "lieb";
    }
    return "?";
}

std::optional<FamilyKind> family_from_name(const std::string& s) {
    for (auto k : {FamilyKind::chain, FamilyKind::decorated_chain, FamilyKind::star, FamilyKind::bethe_ball,
                   FamilyKind::square, FamilyKind::lieb})
        if (family_name(k) == s) return k;
    if (s == "bethe") return FamilyKind::bethe_ball;
    return std::nullopt;
}

namespace {

// Grid-like generator: points carry a shell index so that labels nest.
struct Point {
    int shell, r, c;
    bool operator<(const Point& o) const { return std::tie(shell, r, c) < std::tie(o.shell, o.r, o.c); }
};

Graph grid_from_points(std::vector<Point> pts) {
    std::sort(pts.begin(), pts.end());
    std::map<std::pair<int, int>, int> id;
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        id[{pts[i].r, pts[i].c}] = int(i);
        labels.push_back("(" + std::to_string(pts[i].r) + "," + std::to_string(pts[i].c) + ")");
    }
    std::vector<std::pair<int, int>> edges;
    for (auto& [rc, i] : id) {
        for (auto d : {std::pair{1, 0}, std::pair{0, 1}}) {
            auto it = id.find({rc.first + d.first, rc.second + d.second});
            if (it != id.end()) edges.emplace_back(i, it->second);
        }
    }
    return Graph(int(pts.size()), edges, labels);
}

}  // namespace

Graph path_graph(int n) {
    if (n < 1) throw std::invalid_argument("path needs at least one vertex");
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
    return Graph(n, e);
}

Graph cycle_graph(int n) {
    if (n < 3) throw std::invalid_argument("cycle needs at least three vertices");
    std::vector<std::pair<int, int>> e;
    for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
    return Graph(n, e);
}

Graph family_member(const LatticeFamily& f, int n) {
    if (n < 1) throw std::invalid_argument("family index must be positive");
    switch (f.kind) {
        case FamilyKind::chain: return path_graph(2 * n);
        case FamilyKind::decorated_chain: {
            std::vector<std::pair<int, int>> e;
            for (int k = 0; k < n; ++k) {
                int a = 4 * k, b = a + 1;
                e.emplace_back(a, b);
                e.emplace_back(b, a + 2);
                e.emplace_back(b, a + 3);
                if (k + 1 < n) e.emplace_back(b, a + 4);
            }
            return Graph(4 * n, e);
        }
        case FamilyKind::star: {
            std::vector<std::pair<int, int>> e;
            for (int i = 1; i <= 2 * n - 1; ++i) e.emplace_back(0, i);
            return Graph(2 * n, e);
        }
        case FamilyKind::bethe_ball: {
            const int z = f.z;
            if (z < 3 || z % 2 == 0) throw std::invalid_argument("bethe_ball requires odd z >= 3");
            std::vector<std::pair<int, int>> e;
            std::vector<int> shell{0};
            int next = 1;
            for (int k = 1; k <= n; ++k) {
                std::vector<int> nxt;
                for (int p : shell) {
                    int kids = (k == 1) ? z : z - 1;
                    for (int c = 0; c < kids; ++c) {
                        e.emplace_back(p, next);
                        nxt.push_back(next++);
                    }
                }
                shell = std::move(nxt);
            }
            return Graph(next, e);
        }
        case FamilyKind::square: {
            std::vector<Point> pts;
            for (int r = 0; r < 2 * n; ++r)
                for (int c = 0; c < 2 * n; ++c) pts.push_back({std::max(r, c) / 2, r, c});
            return grid_from_points(pts);
        }
        case FamilyKind::lieb: {
            std::vector<Point> pts;
            for (int r = 0; r < 4 * n; ++r)
                for (int c = 0; c < 4 * n; ++c)
                    if (r % 2 == 0 || c % 2 == 0) pts.push_back({std::max(r, c) / 4, r, c});
            return grid_from_points(pts);
        }
    }
    throw std::invalid_argument("unknown family");
}

int sublattice_imbalance(const Graph& g) {
    auto b = bipartition(g);
    if (!b) throw ValidationError("graph not bipartite");
    return std::abs(int(b->part_a.size()) - int(b->part_b.size()));
}

std::vector<DensityEntry> spin_density_sequence(const LatticeFamily& f, int n_min, int n_max) {
    if (n_max < 1 || n_min < 1) throw std::invalid_argument("n_max must be at least 1");
    std::vector<DensityEntry> out;
    for (int n = n_min; n <= n_max; ++n) {
        Graph g = family_member(f, n);
        int imb = sublattice_imbalance(g);
        std::int64_t num = imb, den = 2 * std::int64_t(g.vertex_count());
        std::int64_t d = std::gcd(num, den);
        if (d == 0) d = 1;
        out.push_back({n, g.vertex_count(), imb, num / d, den / d});
    }
    return out;
}

ConfigGraph::ConfigGraph(std::vector<SpinConfig> nodes, std::vector<std::pair<int, int>> edges, int two_m)
    : nodes_(std::move(nodes)), edges_(std::move(edges)), two_m_(two_m) {}

std::vector<int> ConfigGraph::components() const {
    const int n = int(nodes_.size());
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (auto [a, b] : edges_) parent[find(a)] = find(b);
    std::map<int, int> relabel;
    std::vector<int> comp(n);
    for (int i = 0; i < n; ++i) {
        int r = find(i);
        auto it = relabel.emplace(r, int(relabel.size())).first;
        comp[i] = it->second;
    }
    return comp;
}

bool ConfigGraph::is_connected() const {
    if (nodes_.empty()) return false;
    auto c = components();
    return *std::max_element(c.begin(), c.end()) == 0;
}

int hole_position(const SpinConfig& s) {
    int h = -1;
    for (int i = 0; i < int(s.size()); ++i)
        if (s[i] == 0) {
            if (h >= 0) throw std::invalid_argument("more than one hole");
            h = i;
        }
    if (h < 0) throw std::invalid_argument("no hole");
    return h;
}

ConfigGraph nt_config_graph(const Graph& g_t, int two_m) {
    const int n = g_t.vertex_count();
    if (!g_t.is_connected()) throw ValidationError("graph not connected");
    const int electrons = n - 1;
    if ((electrons + two_m) % 2 != 0 || std::abs(two_m) > electrons)
        throw ValidationError("empty sector: 2M=" + std::to_string(two_m) + " with " + std::to_string(electrons) +
                              " electrons");
    const int n_up = (electrons + two_m) / 2;
    std::vector<SpinConfig> nodes;
    std::map<SpinConfig, int> index;
    for (int h = 0; h < n; ++h) {
        // choose the up-spins among the other sites, lexicographically
        std::vector<int> others;
        for (int x = 0; x < n; ++x)
            if (x != h) others.push_back(x);
        std::vector<int> sel(electrons, -1);
        std::fill(sel.begin(), sel.begin() + (electrons - n_up), -1);
        std::fill(sel.begin() + (electrons - n_up), sel.end(), 1);
        do {
            SpinConfig s(n, 0);
            for (int i = 0; i < electrons; ++i) s[others[i]] = sel[i];
            index.emplace(s, int(nodes.size()));
            nodes.push_back(s);
        } while (std::next_permutation(sel.begin(), sel.end()));
    }
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < int(nodes.size()); ++i) {
        const auto& s = nodes[i];
        int h = hole_position(s);
        for (int y : g_t.neighbors(h)) {
            SpinConfig t = s;
            std::swap(t[h], t[y]);
            int j = index.at(t);
            if (i < j) edges.emplace_back(i, j);
        }
    }
    return ConfigGraph(std::move(nodes), std::move(edges), two_m);
}

Graph relabel(const Graph& g, const std::vector<int>& perm) {
    const int n = g.vertex_count();
    if (int(perm.size()) != n) throw std::invalid_argument("permutation size mismatch");
    std::vector<char> hit(n, 0);
    for (int p : perm) {
        if (p < 0 || p >= n || hit[p]) throw std::invalid_argument("permutation is not a bijection");
        hit[p] = 1;
    }
    std::vector<std::pair<int, int>> e;
    for (auto [u, v] : g.edges()) e.emplace_back(perm[u], perm[v]);
    std::vector<std::string> labels;
    if (!g.labels().empty()) {
        labels.resize(n);
        for (int v = 0; v < n; ++v) labels[perm[v]] = g.labels()[v];
    }
    return Graph(n, e, labels);
}

Graph read_graph(std::istream& in) {
    std::string line;
    int n = -1;
    std::vector<std::pair<int, int>> edges;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        if (n < 0) {
            if (first != "vertices" || !(ls >> n) || n < 1)
                throw ParseError("graph file line " + std::to_string(lineno) + ": expected 'vertices N'");
            continue;
        }
        int u = 0, v = 0;
        try {
            std::size_t pos = 0;
            u = std::stoi(first, &pos);
            if (pos != first.size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw ParseError("graph file line " + std::to_string(lineno) + ": bad vertex '" + first + "'");
        }
        std::string rest;
        if (!(ls >> v) || (ls >> rest))
            throw ParseError("graph file line " + std::to_string(lineno) + ": expected 'u v'");
        edges.emplace_back(u, v);
    }
    if (n < 0) throw ParseError("graph file: missing 'vertices N' header");
    try {
        return Graph(n, edges);
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("graph file: ") + e.what());
    }
}

void write_graph(std::ostream& out, const Graph& g) {
    out << "vertices " << g.vertex_count() << "\n";
    for (auto [u, v] : g.edges()) out << u << " " << v << "\n";
}

}  // namespace spinstab
