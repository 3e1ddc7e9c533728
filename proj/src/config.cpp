#include "spinstab/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "spinstab/error.hpp"

namespace spinstab {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return d;
    } catch (const std::exception&) {
        throw ParseError(key + ": expected a number, got '" + v + "'");
    }
}

long long to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long i = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return i;
    } catch (const std::exception&) {
        throw ParseError(key + ": expected an integer, got '" + v + "'");
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(trim(cur));
    return out;
}

Dense read_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open coupling file '" + path + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
        std::istringstream ls(line);
        std::vector<double> row;
        std::string tok;
        while (ls >> tok) row.push_back(to_double(path, tok));
        if (!row.empty()) rows.push_back(std::move(row));
    }
    const Eigen::Index n = Eigen::Index(rows.size());
    Dense m(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        if (Eigen::Index(rows[r].size()) != n) throw ParseError("coupling file '" + path + "' is not a square matrix");
        for (Eigen::Index c = 0; c < n; ++c) m(r, c) = rows[r][c];
    }
    return m;
}

}  // namespace

CouplingRecipe CouplingRecipe::parse(const std::string& raw) {
    std::string text = trim(raw);
    // "U=4" style: drop a leading symbol
    if (auto eq = text.find('='); eq != std::string::npos) {
        const std::string head = trim(text.substr(0, eq));
        if (head != "nn" && head != "file") text = trim(text.substr(eq + 1));
    }
    CouplingRecipe r;
    if (text.empty()) throw ParseError("empty coupling");
    if (text.rfind("nn=", 0) == 0) {
        r.kind = Kind::nn;
        r.value = to_double("nn", trim(text.substr(3)));
    } else if (text == "complete_bipartite") {
        r.kind = Kind::complete_bipartite;
    } else if (text.rfind("file:", 0) == 0) {
        r.kind = Kind::file;
        r.path = text.substr(5);
    } else {
        r.value = to_double("coupling", text);
        r.kind = r.value == 0.0 ? Kind::zero : Kind::scalar;
    }
    return r;
}

Dense CouplingRecipe::on(const Graph& g) const {
    const int L = g.vertex_count();
    switch (kind) {
        case Kind::zero: return Dense::Zero(L, L);
        case Kind::scalar: return value * Dense::Identity(L, L);
        case Kind::nn: return nearest_neighbour(g, value);
        case Kind::complete_bipartite: return complete_bipartite(g);
        case Kind::file: return read_matrix(path);
    }
    return {};
}

std::string CouplingRecipe::str() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::zero: os << "0"; break;
        case Kind::scalar: os << value; break;
        case Kind::nn: os << "nn=" << value; break;
        case Kind::complete_bipartite: os << "complete_bipartite"; break;
        case Kind::file: os << "file:" << path; break;
    }
    return os.str();
}

Graph parse_lattice(const std::string& raw) {
    const std::string text = trim(raw);
    if (text.empty()) throw ParseError("no lattice given");
    if (text.rfind("file:", 0) == 0 || text.find(':') == std::string::npos) {
        const std::string path = text.rfind("file:", 0) == 0 ? text.substr(5) : text;
        std::ifstream in(path);
        if (!in) throw ParseError("lattice '" + text + "' is neither a shorthand nor a readable graph file");
        return read_graph(in);
    }
    const auto parts = split(text, ':');
    const std::string& kind = parts[0];
    std::vector<int> args;
    for (std::size_t i = 1; i < parts.size(); ++i) args.push_back(int(to_int("lattice", parts[i])));
    if (args.empty()) throw ParseError("lattice '" + text + "' needs a size");
    try {
        if (kind == "path" && args.size() == 1) return path_graph(args[0]);
        if (kind == "cycle" && args.size() == 1) return cycle_graph(args[0]);
        if (auto f = family_from_name(kind)) {
            LatticeFamily fam{*f};
            if (*f == FamilyKind::bethe_ball && args.size() == 2) {
                fam.z = args[0];
                return family_member(fam, args[1]);
            }
            if (args.size() == 1) return family_member(fam, args[0]);
        }
    } catch (const std::invalid_argument& e) {
        throw ParseError("lattice '" + text + "': " + e.what());
    }
    throw ParseError("unknown lattice shorthand '" + text + "'");
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    for (const auto& p : split(text, ','))
        if (!p.empty()) out.push_back(int(to_int("list", p)));
    return out;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& p : split(text, ','))
        if (!p.empty()) out.push_back(to_double("list", p));
    return out;
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{
        "command",       "model",         "lattice",      "t",           "U",
        "J",             "g",             "kondo_j",      "omega",       "n_max",
        "electrons",     "sector",        "hermitian_tol", "definite_tol", "strict_tol",
        "degeneracy_tol", "spin_residual_tol", "lanczos_tol", "isomorphism_tol", "convergence_tol",
        "samples",       "betas",         "dense_threshold", "seed",      "max_restarts",
        "output",        "format",        "coordinates",  "graph_out",   "pair_model",
        "pair_lattice",  "site_map",      "family",       "z",           "range",
        "max_nnz",       "permutation",   "cutoffs",      "parallel",
    };
    return keys;
}

void apply_setting(RunConfig& c, const std::string& key_raw, const std::string& value_raw) {
    const std::string key = trim(key_raw), v = trim(value_raw);
    auto integer = [&] { return to_int(key, v); };
    auto number = [&] { return to_double(key, v); };
    if (key == "command") c.command = v;
    else if (key == "model") c.model = v;
    else if (key == "lattice") c.lattice = v;
    else if (key == "t") c.t = CouplingRecipe::parse(v);
    else if (key == "U" || key == "u") c.u = CouplingRecipe::parse(v);
    else if (key == "J" || key == "j") c.j = CouplingRecipe::parse(v);
    else if (key == "g") c.g = CouplingRecipe::parse(v);
    else if (key == "kondo_j") c.kondo_j = number();
    else if (key == "omega") c.omega = number();
    else if (key == "n_max") c.n_max = int(integer());
    else if (key == "electrons") c.electrons = int(integer());
    else if (key == "sector") {
        if (v == "all") c.sector.reset();
        else c.sector = int(integer());
    }
    else if (key == "hermitian_tol") c.tol.hermitian = number();
    else if (key == "definite_tol") c.tol.definite = number();
    else if (key == "strict_tol") c.tol.strict = number();
    else if (key == "degeneracy_tol") c.tol.degeneracy = number();
    else if (key == "spin_residual_tol") c.tol.spin_residual = number();
    else if (key == "lanczos_tol") c.tol.lanczos = number();
    else if (key == "isomorphism_tol") c.tol.isomorphism = number();
    else if (key == "convergence_tol") c.tol.convergence = number();
    else if (key == "samples") c.tol.samples = int(integer());
    else if (key == "betas") c.tol.betas = parse_double_list(v);
    else if (key == "dense_threshold") c.tol.dense_threshold = std::size_t(std::max(0LL, integer()));
    else if (key == "seed") c.tol.seed = std::uint64_t(integer());
    else if (key == "max_restarts") c.tol.max_restarts = int(integer());
    else if (key == "output") c.output = v;
    else if (key == "format") {
        if (v != "json" && v != "table") throw ParseError("format must be json or table");
        c.format = v;
    }
    else if (key == "coordinates") c.coordinates = v;
    else if (key == "graph_out") c.graph_out = v;
    else if (key == "pair_model") c.pair_model = v;
    else if (key == "pair_lattice") c.pair_lattice = v;
    else if (key == "site_map") c.site_map = parse_int_list(v);
    else if (key == "family") c.family = v;
    else if (key == "z") c.z = int(integer());
    else if (key == "range") {
        const auto dots = v.find("..");
        if (dots == std::string::npos) {
            c.n_from = c.n_to = int(integer());
        } else {
            c.n_from = int(to_int(key, trim(v.substr(0, dots))));
            c.n_to = int(to_int(key, trim(v.substr(dots + 2))));
        }
    }
    else if (key == "max_nnz") c.max_nnz = std::size_t(std::max(0LL, integer()));
    else if (key == "permutation") c.permutation = v;
    else if (key == "cutoffs") c.cutoffs = parse_int_list(v);
    else if (key == "parallel") {
        if (v != "true" && v != "false") throw ParseError("parallel must be true or false");
        c.parallel = v == "true";
    }
    else throw ParseError("unknown key '" + key + "'");
}

void read_config(std::istream& in, RunConfig& cfg) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        try {
            apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
        } catch (const ParseError& e) {
            throw ParseError("config line " + std::to_string(lineno) + ": " + e.what());
        }
    }
}

void read_config_file(const std::string& path, RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file '" + path + "'");
    read_config(in, cfg);
}

void check_config(const RunConfig& cfg) {
    static const std::vector<std::string> commands{"lattice", "build", "diagonalize", "verify", "scan", "pair", "invariance"};
    if (std::find(commands.begin(), commands.end(), cfg.command) == commands.end())
        throw ParseError("unknown command '" + cfg.command + "'");
    if (cfg.command != "scan") {
        if (cfg.lattice.empty()) throw ParseError("no lattice given");
    } else if (cfg.family.empty()) {
        throw ParseError("scan needs a family");
    }
    if (cfg.command != "lattice") model_from_name(cfg.model);
    if (cfg.command == "pair" && cfg.pair_model.empty()) throw ParseError("pair needs pair_model");
    cfg.tol.check();
}

ModelSpec make_spec(const RunConfig& cfg, const std::string& model, const Graph& g) {
    ModelSpec s;
    s.model = model_from_name(model);
    s.graph = g;
    const CouplingRecipe one{CouplingRecipe::Kind::nn, 1.0, {}};
    s.t = cfg.t.value_or(one).on(g);
    s.u = cfg.u.value_or(CouplingRecipe{CouplingRecipe::Kind::scalar, 4.0, {}}).on(g);
    const CouplingRecipe j_default =
        s.model == ModelId::mlm ? CouplingRecipe{CouplingRecipe::Kind::complete_bipartite, 0, {}} : one;
    s.j = cfg.j.value_or(j_default).on(g);
    s.g = cfg.g.value_or(CouplingRecipe{}).on(g);
    s.kondo_j = cfg.kondo_j;
    s.omega = cfg.omega;
    s.n_max = cfg.n_max;
    s.electrons = cfg.electrons;
    return s;
}

ModelSpec make_spec(const RunConfig& cfg) { return make_spec(cfg, cfg.model, parse_lattice(cfg.lattice)); }

}  // namespace spinstab
