#include "spinstab/report.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "spinstab/error.hpp"

namespace spinstab {

namespace {

Json matrix_json(const Dense& m) {
    if (m.size() == 0) return nullptr;
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Dense matrix_from(const Json& j) {
    if (j.is_null()) return {};
    const Eigen::Index n = Eigen::Index(j.size());
    Dense m(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        if (Eigen::Index(j[r].size()) != n) throw std::invalid_argument("coupling matrix not square");
        for (Eigen::Index c = 0; c < n; ++c) m(r, c) = j[r][c].get<double>();
    }
    return m;
}

template <class T>
Json opt(const std::optional<T>& v) {
    return v ? Json(*v) : Json(nullptr);
}

template <class T>
std::optional<T> opt_from(const Json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<T>();
}

bool valid_verdict(const std::string& v) { return v == kVerdictPass || v == kVerdictFail || v == kVerdictConsequence; }

}  // namespace

void Tolerances::check() const {
    const std::pair<const char*, double> all[] = {
        {"hermitian", hermitian}, {"definite", definite},           {"strict", strict},
        {"degeneracy", degeneracy}, {"spin_residual", spin_residual}, {"lanczos", lanczos},
        {"isomorphism", isomorphism}, {"convergence", convergence},
    };
    for (auto [name, v] : all)
        if (!(v > 0)) throw ValidationError(std::string("tolerance ") + name + " must be positive");
    if (samples <= 0) throw ValidationError("samples must be positive");
    if (betas.empty()) throw ValidationError("at least one beta is needed");
    for (double b : betas)
        if (!(b > 0)) throw ValidationError("betas must be positive");
    if (max_restarts <= 0) throw ValidationError("max_restarts must be positive");
}

void GroundStateReport::settle() {
    bool sampled = false;
    for (const auto& c : checks) {
        if (!c.passed) {
            verdict = kVerdictFail;
            return;
        }
        if (c.mode != "exact") sampled = true;
    }
    verdict = sampled ? kVerdictConsequence : kVerdictPass;
}

std::string format_half(int two_x) {
    if (two_x % 2 == 0) return std::to_string(two_x / 2);
    return std::to_string(two_x) + "/2";
}

Json to_json(const ModelSpec& spec) {
    Json g;
    g["vertices"] = spec.graph.vertex_count();
    Json edges = Json::array();
    for (auto [u, v] : spec.graph.edges()) edges.push_back({u, v});
    g["edges"] = edges;
    Json j;
    j["name"] = model_name(spec.model);
    j["graph"] = g;
    j["t"] = matrix_json(spec.t);
    j["u"] = matrix_json(spec.u);
    j["j"] = matrix_json(spec.j);
    j["g"] = matrix_json(spec.g);
    j["kondo_j"] = spec.kondo_j;
    j["omega"] = spec.omega;
    j["n_max"] = spec.n_max;
    j["electrons"] = opt(spec.electrons);
    return j;
}

ModelSpec model_spec_from_json(const Json& j) {
    ModelSpec s;
    s.model = model_from_name(j.at("name").get<std::string>());
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : j.at("graph").at("edges")) edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    s.graph = Graph(j.at("graph").at("vertices").get<int>(), edges);
    s.t = matrix_from(j.at("t"));
    s.u = matrix_from(j.at("u"));
    s.j = matrix_from(j.at("j"));
    s.g = matrix_from(j.at("g"));
    s.kondo_j = j.at("kondo_j").get<double>();
    s.omega = j.at("omega").get<double>();
    s.n_max = j.at("n_max").get<int>();
    s.electrons = opt_from<int>(j.at("electrons"));
    return s;
}

Json to_json(const Tolerances& t) {
    Json j;
    j["hermitian"] = t.hermitian;
    j["definite"] = t.definite;
    j["strict"] = t.strict;
    j["degeneracy"] = t.degeneracy;
    j["spin_residual"] = t.spin_residual;
    j["lanczos"] = t.lanczos;
    j["isomorphism"] = t.isomorphism;
    j["convergence"] = t.convergence;
    j["samples"] = t.samples;
    j["betas"] = t.betas;
    j["dense_threshold"] = t.dense_threshold;
    j["seed"] = t.seed;
    j["max_restarts"] = t.max_restarts;
    return j;
}

Tolerances tolerances_from_json(const Json& j) {
    Tolerances t;
    t.hermitian = j.at("hermitian").get<double>();
    t.definite = j.at("definite").get<double>();
    t.strict = j.at("strict").get<double>();
    t.degeneracy = j.at("degeneracy").get<double>();
    t.spin_residual = j.at("spin_residual").get<double>();
    t.lanczos = j.at("lanczos").get<double>();
    t.isomorphism = j.at("isomorphism").get<double>();
    t.convergence = j.at("convergence").get<double>();
    t.samples = j.at("samples").get<int>();
    t.betas = j.at("betas").get<std::vector<double>>();
    t.dense_threshold = j.at("dense_threshold").get<std::size_t>();
    t.seed = j.at("seed").get<std::uint64_t>();
    t.max_restarts = j.at("max_restarts").get<int>();
    return t;
}

Json to_json(const GroundStateReport& r) {
    if (r.sectors.empty()) throw std::invalid_argument("report has no sectors");
    if (!valid_verdict(r.verdict)) throw std::invalid_argument("invalid verdict '" + r.verdict + "'");
    Json j;
    j["model"] = to_json(r.spec);
    Json sectors = Json::array();
    for (const auto& s : r.sectors) {
        Json e;
        e["two_m"] = s.two_m;
        e["M"] = format_half(s.two_m);
        e["dim"] = s.dim;
        e["nnz"] = s.nnz;
        e["E0"] = s.e0;
        e["multiplicity"] = s.multiplicity;
        e["gap"] = s.gap;
        e["method"] = s.method;
        e["two_s"] = opt(s.two_s);
        e["spin_residual"] = s.spin_residual;
        e["ergodicity"] = s.ergodicity;
        e["ergodicity_mode"] = s.ergodicity_mode;
        e["margin"] = opt(s.margin);
        e["witness"] = s.witness;
        sectors.push_back(std::move(e));
    }
    j["sectors"] = sectors;
    Json g;
    g["command"] = r.command;
    g["E0"] = r.global.e0;
    g["degeneracy"] = r.global.degeneracy;
    g["two_s_computed"] = opt(r.global.two_s_computed);
    g["two_s_predicted"] = opt(r.global.two_s_predicted);
    g["S_computed"] = r.global.two_s_computed ? Json(format_half(*r.global.two_s_computed)) : Json(nullptr);
    g["S_predicted"] = r.global.two_s_predicted ? Json(format_half(*r.global.two_s_predicted)) : Json(nullptr);
    g["spin_residual"] = r.global.spin_residual;
    Json checks = Json::array();
    for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"mode", c.mode}, {"detail", c.detail}});
    g["checks"] = checks;
    g["notes"] = r.notes;
    j["global"] = g;
    j["verdict"] = r.verdict;
    j["tolerances"] = to_json(r.tolerances);
    Json t;
    for (const auto& [k, v] : r.timings) t[k] = v;
    j["timings"] = t;
    return j;
}

GroundStateReport report_from_json(const Json& j) {
    GroundStateReport r;
    r.spec = model_spec_from_json(j.at("model"));
    for (const auto& e : j.at("sectors")) {
        SectorReport s;
        s.two_m = e.at("two_m").get<int>();
        s.dim = e.at("dim").get<std::size_t>();
        s.nnz = e.at("nnz").get<std::size_t>();
        s.e0 = e.at("E0").get<double>();
        s.multiplicity = e.at("multiplicity").get<int>();
        s.gap = e.at("gap").get<double>();
        s.method = e.at("method").get<std::string>();
        s.two_s = opt_from<int>(e.at("two_s"));
        s.spin_residual = e.at("spin_residual").get<double>();
        s.ergodicity = e.at("ergodicity").get<std::string>();
        s.ergodicity_mode = e.at("ergodicity_mode").get<std::string>();
        s.margin = opt_from<double>(e.at("margin"));
        s.witness = e.at("witness").get<std::string>();
        r.sectors.push_back(std::move(s));
    }
    if (r.sectors.empty()) throw std::invalid_argument("report has no sectors");
    const Json& g = j.at("global");
    r.command = g.at("command").get<std::string>();
    r.global.e0 = g.at("E0").get<double>();
    r.global.degeneracy = g.at("degeneracy").get<int>();
    r.global.two_s_computed = opt_from<int>(g.at("two_s_computed"));
    r.global.two_s_predicted = opt_from<int>(g.at("two_s_predicted"));
    r.global.spin_residual = g.at("spin_residual").get<double>();
    for (const auto& c : g.at("checks"))
        r.checks.push_back({c.at("name").get<std::string>(), c.at("passed").get<bool>(), c.at("detail").get<std::string>(),
                            c.at("mode").get<std::string>()});
    r.notes = g.at("notes").get<std::vector<std::string>>();
    r.verdict = j.at("verdict").get<std::string>();
    if (!valid_verdict(r.verdict)) throw std::invalid_argument("invalid verdict '" + r.verdict + "'");
    r.tolerances = tolerances_from_json(j.at("tolerances"));
    for (const auto& [k, v] : j.at("timings").items()) r.timings.emplace_back(k, v.get<double>());
    return r;
}

void emit_json(std::ostream& out, const Json& j) { out << j.dump(2) << "\n"; }

void emit_table(std::ostream& out, const GroundStateReport& r) {
    out << "model " << model_name(r.spec.model) << " on " << r.spec.sites() << " sites, "
        << r.spec.graph.edges().size() << " edges\n";
    out << std::left << std::setw(7) << "M" << std::setw(9) << "dim" << std::setw(20) << "E0" << std::setw(6) << "mult"
        << std::setw(13) << "gap" << std::setw(6) << "S" << std::setw(22) << "ergodicity"
        << "margin\n";
    for (const auto& s : r.sectors) {
        std::ostringstream e0, gap, margin;
        e0 << std::setprecision(12) << s.e0;
        if (s.gap < 0) gap << "-";
        else gap << std::setprecision(6) << s.gap;
        if (s.margin) margin << std::setprecision(4) << *s.margin;
        else margin << "-";
        out << std::setw(7) << format_half(s.two_m) << std::setw(9) << s.dim << std::setw(20) << e0.str() << std::setw(6)
            << s.multiplicity << std::setw(13) << gap.str() << std::setw(6)
            << (s.two_s ? format_half(*s.two_s) : std::string("-")) << std::setw(22) << s.ergodicity << margin.str()
            << "\n";
    }
    out << std::right << std::setprecision(12) << "E0 = " << r.global.e0 << ", degeneracy " << r.global.degeneracy;
    if (r.global.two_s_computed) out << ", S = " << format_half(*r.global.two_s_computed);
    if (r.global.two_s_predicted) out << " (predicted " << format_half(*r.global.two_s_predicted) << ")";
    out << "\n";
    for (const auto& c : r.checks) {
        out << (c.passed ? "  ok   " : "  FAIL ") << c.name;
        if (c.mode != "exact") out << " [" << c.mode << "]";
        if (!c.detail.empty()) out << ": " << c.detail;
        out << "\n";
    }
    for (const auto& n : r.notes) out << "  note: " << n << "\n";
    out << "verdict: " << r.verdict << "\n";
}

}  // namespace spinstab
