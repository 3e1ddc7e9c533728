#include "spinstab/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <numeric>
#include <sstream>

#include "spinstab/error.hpp"

namespace spinstab {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string num(double v, int precision = 12) {
    std::ostringstream os;
    os.precision(precision);
    os << v;
    return os.str();
}

std::string sector_name(int two_m) { return "M=" + format_half(two_m); }

void require_valid(const ModelSpec& spec, GroundStateReport& r) {
    const auto v = validate(spec);
    if (const auto* f = v.first_failure()) throw ValidationError(f->name + ": " + f->witness);
    for (const auto& n : v.notes) r.notes.push_back(n);
}

struct SectorJob {
    SectorReport rep;
    GroundSpace g;
    BasisPtr basis;
    std::vector<Check> checks;
    double build = 0, solve = 0, cones = 0, spin = 0;
};

SectorJob run_sector(const ModelSpec& spec, int two_m, const VerifyOptions& opt, bool with_cones) {
    SectorJob job;
    auto t0 = Clock::now();
    auto built = build(spec, two_m);
    job.build = since(t0);
    job.basis = built.basis;
    job.rep.two_m = two_m;
    job.rep.dim = built.basis->size();
    job.rep.nnz = std::size_t(built.h.matrix().nonZeros());

    t0 = Clock::now();
    job.g = ground_space(built.h, solver_options(opt.tol));
    job.solve = since(t0);
    job.rep.e0 = job.g.energy;
    job.rep.multiplicity = job.g.multiplicity;
    job.rep.gap = job.g.gap;
    job.rep.method = job.g.method;
    const std::string name = sector_name(two_m);
    const double res = job.g.residuals.size() ? job.g.residuals.maxCoeff() : 0.0;
    job.checks.push_back({name + ": solver residual", res <= opt.tol.lanczos * std::max(1.0, std::abs(job.g.energy)),
                          "max residual " + num(res, 3)});
    job.checks.push_back({name + ": unique ground state", job.g.multiplicity == 1,
                          job.g.multiplicity == 1 ? "" : "multiplicity " + std::to_string(job.g.multiplicity)});

    if (!with_cones) {
        job.rep.ergodicity = "cone-not-defined-under-truncation";
        return job;
    }
    t0 = Clock::now();
    std::optional<Cone> cone;
    try {
        cone = model_cone(spec, built.basis);
    } catch (const ValidationError& e) {
        job.rep.ergodicity = "cone-not-defined";
        job.rep.witness = e.what();
        job.cones = since(t0);
        return job;
    }
    if (!cone) {
        job.rep.ergodicity = "cone-not-defined-under-truncation";
        job.cones = since(t0);
        return job;
    }
    const auto e = ergodicity(built.h, *cone, ergodicity_options(opt.tol));
    job.rep.ergodicity = e.ergodic ? "ergodic" : "not-ergodic";
    job.rep.ergodicity_mode = e.mode;
    job.rep.witness = e.witness;
    const std::string mode = e.mode == "structural" ? "exact" : e.mode;
    job.checks.push_back({name + ": ergodic", e.ergodic, e.witness, mode});
    if (job.g.multiplicity == 1) {
        try {
            const Vec psi = gauge_fix(Vec(job.g.vectors.col(0)), *cone);
            const auto p = positivity(psi, *cone, opt.tol.strict);
            job.rep.margin = p.margin;
            job.checks.push_back({name + ": strictly positive ground state", p.strict, "margin " + num(p.margin, 6)});
        } catch (const std::domain_error&) {
            job.checks.push_back({name + ": strictly positive ground state", false, "ground state orthogonal to the order unit"});
        }
    }
    job.cones = since(t0);
    return job;
}

std::vector<SectorJob> run_sectors(const ModelSpec& spec, const std::vector<int>& sectors, const VerifyOptions& opt,
                                   bool with_cones) {
    std::vector<SectorJob> jobs;
    if (opt.parallel && sectors.size() > 1) {
        std::vector<std::future<SectorJob>> fs;
        for (int m : sectors)
            fs.push_back(std::async(std::launch::async, [&, m] { return run_sector(spec, m, opt, with_cones); }));
        for (auto& f : fs) jobs.push_back(f.get());
    } else {
        for (int m : sectors) jobs.push_back(run_sector(spec, m, opt, with_cones));
    }
    return jobs;
}

int lowest_index(const std::vector<int>& sectors) {
    int best = 0;
    for (int i = 1; i < int(sectors.size()); ++i)
        if (std::abs(sectors[i]) < std::abs(sectors[best]) ||
            (std::abs(sectors[i]) == std::abs(sectors[best]) && sectors[i] > sectors[best]))
            best = i;
    return best;
}

// Spin of the ground vectors of one sector; rotates degenerate vectors into
// S^2 eigenvectors first.
std::vector<SpinValue> sector_spins(const SectorJob& job) {
    Dense v = job.g.vectors;
    const auto s2 = total_spin_squared(job.basis);
    if (v.cols() == 1) return {total_spin_of(Vec(v.col(0)), s2)};
    return resolve_spins(v, s2);
}

GroundStateReport run_verify(const ModelSpec& spec, const VerifyOptions& opt, const std::string& cls) {
    const auto t_start = Clock::now();
    opt.tol.check();
    GroundStateReport r;
    r.spec = spec;
    r.tolerances = opt.tol;
    require_valid(spec, r);
    const bool phonons = has_phonons(spec.model);
    if (phonons) r.notes.push_back("cone-not-defined-under-truncation: spectral checks only");

    const auto sectors = sectors_of(spec);
    auto jobs = run_sectors(spec, sectors, opt, !phonons);
    double t_build = 0, t_solve = 0, t_cones = 0;
    for (const auto& j : jobs) {
        t_build += j.build;
        t_solve += j.solve;
        t_cones += j.cones;
    }

    double e0 = jobs[0].g.energy;
    for (const auto& j : jobs) e0 = std::min(e0, j.g.energy);
    const double tol = opt.tol.degeneracy * std::max(1.0, std::abs(e0));
    int degeneracy = 0;
    for (const auto& j : jobs)
        if (j.g.energy - e0 <= tol) degeneracy += j.g.multiplicity;
    r.global.e0 = e0;
    r.global.degeneracy = degeneracy;

    auto t0 = Clock::now();
    const int low = lowest_index(sectors);
    bool mixed = false;
    std::string spin_error;
    for (auto& j : jobs) {
        if (j.g.energy - e0 > tol) continue;
        try {
            const auto spins = sector_spins(j);
            j.rep.two_s = spins.front().two_s;
            for (const auto& s : spins) {
                j.rep.spin_residual = std::max(j.rep.spin_residual, s.residual);
                if (s.two_s != spins.front().two_s) mixed = true;
            }
        } catch (const SpinMixtureError& e) {
            spin_error = sector_name(j.rep.two_m) + ": " + e.what();
        }
    }
    const double t_spin = since(t0);
    for (const auto& j : jobs) r.global.spin_residual = std::max(r.global.spin_residual, j.rep.spin_residual);
    if (jobs[std::size_t(low)].g.energy - e0 <= tol) r.global.two_s_computed = jobs[std::size_t(low)].rep.two_s;
    for (const auto& j : jobs)
        if (j.rep.two_s && r.global.two_s_computed && *j.rep.two_s != *r.global.two_s_computed) mixed = true;
    r.global.two_s_predicted = predicted_two_s(spec);

    r.checks.push_back({"spin eigenvectors", spin_error.empty() && !mixed && r.global.two_s_computed.has_value(),
                        !spin_error.empty() ? spin_error
                        : mixed             ? "ground multiplets of different spin"
                        : !r.global.two_s_computed ? "lowest |M| sector does not contain the ground state"
                                                   : "max S^2 residual " + num(r.global.spin_residual, 3)});
    if (r.global.two_s_predicted) {
        const bool ok = r.global.two_s_computed == r.global.two_s_predicted;
        r.checks.push_back({"spin", ok,
                            "S computed " + (r.global.two_s_computed ? format_half(*r.global.two_s_computed) : "-") +
                                ", predicted " + format_half(*r.global.two_s_predicted) + " (" + cls + ")"});
        const int expected = *r.global.two_s_predicted + 1;
        r.checks.push_back({"degeneracy", degeneracy == expected,
                            std::to_string(degeneracy) + " states, expected " + std::to_string(expected)});
    } else {
        r.notes.push_back("no spin prediction applies to this model; spin reported only");
        if (r.global.two_s_computed) {
            const int expected = *r.global.two_s_computed + 1;
            r.checks.push_back({"degeneracy", degeneracy == expected,
                                std::to_string(degeneracy) + " states, expected 2S+1 = " + std::to_string(expected)});
        }
    }
    for (auto& j : jobs) {
        for (auto& c : j.checks) r.checks.push_back(std::move(c));
        r.sectors.push_back(std::move(j.rep));
    }
    r.settle();
    r.timings = {{"build", t_build}, {"solve", t_solve}, {"cones", t_cones}, {"spin", t_spin}, {"total", since(t_start)}};
    return r;
}

std::size_t binom(int n, int k) {
    if (k < 0 || k > n) return 0;
    double r = 1;
    for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
    return std::size_t(std::llround(r));
}

// Dimension of a sector from counting alone.
std::size_t sector_dimension(const ModelSpec& spec, int two_m) {
    const int L = spec.sites();
    const int n = particle_number_of(spec);
    std::size_t dim = 0;
    switch (subspace_of(spec).kind) {
        case Subspace::SingleOccupancy:
            if ((L + two_m) % 2 == 0) dim = binom(L, (L + two_m) / 2);
            break;
        case Subspace::Full:
            if ((n + two_m) % 2 == 0) dim = binom(L, (n + two_m) / 2) * binom(L, (n - two_m) / 2);
            break;
        case Subspace::OneHoleNoDouble:
            if ((L - 1 + two_m) % 2 == 0) dim = std::size_t(L) * binom(L - 1, (L - 1 + two_m) / 2);
            break;
        case Subspace::Kondo:
            for (int k = 0; k <= L; ++k) {
                // k f-up spins; L c electrons with c_up - c_down = two_m - (2k - L)
                const int dc = two_m - (2 * k - L);
                if ((L + dc) % 2) continue;
                dim += binom(L, k) * binom(L, (L + dc) / 2) * binom(L, (L - dc) / 2);
            }
            break;
    }
    if (has_phonons(spec.model)) dim *= std::size_t(std::llround(std::pow(double(spec.n_max + 1), double(L))));
    return dim;
}

std::size_t offdiag_pairs(const Dense& m) {
    std::size_t k = 0;
    for (Eigen::Index x = 0; x < m.rows(); ++x)
        for (Eigen::Index y = x + 1; y < m.cols(); ++y)
            if (m(x, y) != 0.0) ++k;
    return k;
}

// Upper bound on nonzeros per row: diagonal plus every off-diagonal term.
std::size_t row_bound(const ModelSpec& spec) {
    const int L = spec.sites();
    std::size_t terms = 1;
    switch (spec.model) {
        case ModelId::mlm:
        case ModelId::heisenberg: terms += spec.j.size() ? offdiag_pairs(spec.j) : 0; break;
        default: terms += 4 * (spec.t.size() ? offdiag_pairs(spec.t) : 0); break;
    }
    if (is_kondo(spec.model)) terms += 2 * std::size_t(L);
    if (has_phonons(spec.model)) terms += 2 * std::size_t(L);
    return terms;
}

SectorJob ground_of(const ModelSpec& spec, int two_m, const VerifyOptions& opt) {
    SectorJob j;
    auto built = build(spec, two_m);
    j.basis = built.basis;
    j.g = ground_space(built.h, solver_options(opt.tol));
    return j;
}

std::string reduced(std::int64_t a, std::int64_t b) {
    const std::int64_t d = std::gcd(a, b) ? std::gcd(a, b) : 1;
    if (b / d == 1) return std::to_string(a / d);
    return std::to_string(a / d) + "/" + std::to_string(b / d);
}

Json timings_json(const std::vector<std::pair<std::string, double>>& t) {
    Json j = Json::object();
    for (const auto& [k, v] : t) j[k] = v;
    return j;
}

Json checks_json(const std::vector<Check>& cs) {
    Json a = Json::array();
    for (const auto& c : cs) a.push_back({{"name", c.name}, {"passed", c.passed}, {"mode", c.mode}, {"detail", c.detail}});
    return a;
}

std::string settle(const std::vector<Check>& cs) {
    GroundStateReport tmp;
    tmp.checks = cs;
    tmp.settle();
    return tmp.verdict;
}

Json summary_json(const SpectralSummary& s) {
    Json j;
    j["sectors"] = Json::array();
    for (std::size_t i = 0; i < s.two_m.size(); ++i)
        j["sectors"].push_back({{"two_m", s.two_m[i]}, {"M", format_half(s.two_m[i])}, {"E0", s.sector_e0[i]}});
    j["E0"] = s.e0;
    j["degeneracy"] = s.degeneracy;
    j["two_s"] = s.two_s ? Json(*s.two_s) : Json(nullptr);
    return j;
}

}  // namespace

SolverOptions solver_options(const Tolerances& t) {
    SolverOptions o;
    o.dense_threshold = t.dense_threshold;
    o.degeneracy_tol = t.degeneracy;
    o.lanczos.seed = t.seed;
    o.lanczos.max_restarts = t.max_restarts;
    o.lanczos.tol = t.lanczos;
    return o;
}

ErgodicityOptions ergodicity_options(const Tolerances& t) {
    ErgodicityOptions o;
    o.strict_tol = t.strict;
    o.betas = t.betas;
    o.sampling.samples = t.samples;
    o.sampling.seed = t.seed;
    o.dense_threshold = t.dense_threshold;
    return o;
}

std::optional<int> predicted_two_s(const ModelSpec& spec) {
    const int L = spec.sites();
    switch (spec.model) {
        case ModelId::mlm:
        case ModelId::heisenberg: return sublattice_imbalance(spec.graph);
        case ModelId::hubbard:
        case ModelId::holstein_hubbard:
            if (particle_number_of(spec) != L) return std::nullopt;
            return sublattice_imbalance(spec.graph);
        case ModelId::hubbard_nt:
        case ModelId::holstein_nt: return L - 1;
        case ModelId::kondo:
        case ModelId::kondo_holstein:
            if (spec.kondo_j > 0) return 0;
            if (spec.kondo_j < 0) return 2 * sublattice_imbalance(spec.graph);
            return std::nullopt;
    }
    return std::nullopt;
}

GroundStateReport verify_mlm_class(const ModelSpec& spec, const VerifyOptions& opt) {
    switch (spec.model) {
        case ModelId::mlm:
        case ModelId::heisenberg:
        case ModelId::hubbard:
        case ModelId::holstein_hubbard: break;
        default: throw ValidationError("model " + model_name(spec.model) + " is not in the MLM class");
    }
    return run_verify(spec, opt, "imbalance/2");
}

GroundStateReport verify_nt_class(const ModelSpec& spec, const VerifyOptions& opt) {
    if (!is_nt(spec.model)) throw ValidationError("model " + model_name(spec.model) + " is not in the one-hole class");
    return run_verify(spec, opt, "(|Lambda|-1)/2");
}

GroundStateReport verify_kondo(const ModelSpec& spec, const VerifyOptions& opt) {
    if (!is_kondo(spec.model)) throw ValidationError("model " + model_name(spec.model) + " is not a Kondo model");
    return run_verify(spec, opt, spec.kondo_j > 0 ? "J > 0: 0" : "J < 0: imbalance");
}

GroundStateReport verify_model(const ModelSpec& spec, const VerifyOptions& opt) {
    if (is_nt(spec.model)) return verify_nt_class(spec, opt);
    if (is_kondo(spec.model)) return verify_kondo(spec, opt);
    return verify_mlm_class(spec, opt);
}

SpectralSummary spectral_summary(const ModelSpec& spec, const VerifyOptions& opt) {
    SpectralSummary s;
    s.two_m = sectors_of(spec);
    std::vector<SectorJob> jobs;
    if (opt.parallel && s.two_m.size() > 1) {
        std::vector<std::future<SectorJob>> fs;
        for (int m : s.two_m) fs.push_back(std::async(std::launch::async, [&, m] { return ground_of(spec, m, opt); }));
        for (auto& f : fs) jobs.push_back(f.get());
    } else {
        for (int m : s.two_m) jobs.push_back(ground_of(spec, m, opt));
    }
    s.e0 = jobs[0].g.energy;
    for (const auto& j : jobs) {
        s.sector_e0.push_back(j.g.energy);
        s.e0 = std::min(s.e0, j.g.energy);
    }
    const double tol = opt.tol.degeneracy * std::max(1.0, std::abs(s.e0));
    for (const auto& j : jobs)
        if (j.g.energy - s.e0 <= tol) s.degeneracy += j.g.multiplicity;
    const auto& low = jobs[std::size_t(lowest_index(s.two_m))];
    if (low.g.energy - s.e0 <= tol) {
        try {
            const auto spins = sector_spins(low);
            s.two_s = spins.front().two_s;
            for (const auto& v : spins) {
                s.spin_residual = std::max(s.spin_residual, v.residual);
                if (v.two_s != *s.two_s) s.two_s.reset();
            }
        } catch (const SpinMixtureError&) {
        }
    }
    return s;
}

PairReport verify_stability_pair(const ModelSpec& a, const ModelSpec& b, const std::vector<int>& site_map,
                                 const VerifyOptions& opt) {
    const auto t_start = Clock::now();
    PairReport p;
    p.tolerances = opt.tol;
    const bool same_lattice = a.graph == b.graph;
    const bool plain = a.model == ModelId::mlm || a.model == ModelId::heisenberg || a.model == ModelId::hubbard ||
                       a.model == ModelId::hubbard_nt;
    if (same_lattice && a.model == ModelId::hubbard && (b.model == ModelId::mlm || b.model == ModelId::heisenberg))
        p.relation = "Q";
    else if (same_lattice && a.model == ModelId::holstein_hubbard && b.model == ModelId::hubbard)
        p.relation = "phonon-vacuum";
    else if (a.model == b.model && plain && !site_map.empty())
        p.relation = "nesting";
    else
        throw ValidationError("pair (" + model_name(a.model) + ", " + model_name(b.model) + ") is not supported");
    for (const ModelSpec* s : {&a, &b})
        if ((s->model == ModelId::hubbard || s->model == ModelId::holstein_hubbard) && particle_number_of(*s) != s->sites())
            throw ValidationError("stability pairs need half filling");

    p.a = verify_model(a, opt);
    p.b = verify_model(b, opt);
    auto mode_of = [](const GroundStateReport& r) {
        return r.verdict == kVerdictConsequence ? std::string("consequence-verified") : std::string("exact");
    };
    p.checks.push_back({"A: " + model_name(a.model), p.a.passed(), "verdict " + p.a.verdict, mode_of(p.a)});
    p.checks.push_back({"B: " + model_name(b.model), p.b.passed(), "verdict " + p.b.verdict, mode_of(p.b)});
    const bool spins = p.a.global.two_s_computed && p.a.global.two_s_computed == p.b.global.two_s_computed;
    p.checks.push_back(
        {"equal spin", spins,
         "S_A = " + (p.a.global.two_s_computed ? format_half(*p.a.global.two_s_computed) : std::string("-")) +
             ", S_B = " + (p.b.global.two_s_computed ? format_half(*p.b.global.two_s_computed) : std::string("-"))});

    const auto sb = sectors_of(b), sa = sectors_of(a);
    p.two_m = sb[std::size_t(lowest_index(sb))];
    const int two_m_a = sa[std::size_t(lowest_index(sa))];
    const auto ja = ground_of(a, two_m_a, opt), jb = ground_of(b, p.two_m, opt);
    const Cone cb = *model_cone(b, jb.basis);
    if (ja.g.multiplicity != 1 || jb.g.multiplicity != 1) {
        p.checks.push_back({"overlap", false, "ground state of the chosen sector is degenerate"});
        p.verdict = settle(p.checks);
        return p;
    }
    const Vec psi_a = ja.g.vectors.col(0);
    Vec proj = Vec::Zero(Eigen::Index(jb.basis->size()));
    if (p.relation == "nesting") {
        const auto n = make_nesting(a.model == ModelId::hubbard      ? NestingKind::hubbard
                                    : a.model == ModelId::hubbard_nt ? NestingKind::nt
                                                                     : NestingKind::mlm,
                                    b.graph, a.graph, site_map);
        auto [small_cone, big_cone] = nesting_cones(n, b.graph, a.graph);
        p.nesting = nesting_consistency(n, small_cone, big_cone, opt.tol.strict);
        p.checks.push_back({"nesting consistency", p.nesting->ok(), p.nesting->witness});
        Vec big = Vec::Zero(Eigen::Index(n.big->size()));
        for (std::size_t i = 0; i < ja.basis->size(); ++i)
            big(Eigen::Index(*n.big->index_of(ja.basis->state(i)))) = psi_a(Eigen::Index(i));
        const Vec small = n.projection.apply(big);
        for (std::size_t i = 0; i < jb.basis->size(); ++i)
            proj(Eigen::Index(i)) = small(Eigen::Index(*n.small->index_of(jb.basis->state(i))));
    } else {
        for (std::size_t i = 0; i < ja.basis->size(); ++i) {
            BasisState s = ja.basis->state(i);
            if (s.phonon != 0) continue;
            if (auto k = jb.basis->index_of(s)) proj(Eigen::Index(*k)) = psi_a(Eigen::Index(i));
        }
    }
    const Vec psi_b = gauge_fix(Vec(jb.g.vectors.col(0)), cb);
    if (proj.norm() <= opt.tol.strict) {
        p.checks.push_back({"overlap", false, "projected ground vector vanishes"});
    } else {
        try {
            proj = gauge_fix(proj, cb);
            p.projected_in_cone = membership(proj / proj.norm(), cb, opt.tol.strict);
            p.overlap = proj.dot(psi_b);
            p.checks.push_back({"projected vector in cone", p.projected_in_cone, ""});
            p.checks.push_back({"overlap", p.overlap > opt.tol.strict, "<P psi_A | psi_B> = " + num(p.overlap)});
        } catch (const std::domain_error&) {
            p.checks.push_back({"overlap", false, "projected ground vector orthogonal to the order unit"});
        }
    }
    p.verdict = settle(p.checks);
    p.timings = {{"total", since(t_start)}};
    return p;
}

Json to_json(const PairReport& r) {
    Json j;
    j["model"] = {{"a", to_json(r.a.spec)}, {"b", to_json(r.b.spec)}};
    j["sectors"] = Json::array({{{"side", "a"}, {"report", to_json(r.a)}}, {{"side", "b"}, {"report", to_json(r.b)}}});
    Json g;
    g["relation"] = r.relation;
    g["two_m"] = r.two_m;
    g["overlap"] = r.overlap;
    g["projected_in_cone"] = r.projected_in_cone;
    if (r.nesting)
        g["nesting"] = {{"embeds", r.nesting->embeds},
                        {"projects", r.nesting->projects},
                        {"order_unit", r.nesting->order_unit},
                        {"order_unit_margin", r.nesting->order_unit_margin}};
    g["checks"] = checks_json(r.checks);
    j["global"] = g;
    j["verdict"] = r.verdict;
    j["tolerances"] = to_json(r.tolerances);
    j["timings"] = timings_json(r.timings);
    return j;
}

ModelSpec instantiate(const ModelTemplate& tpl, const Graph& g) {
    ModelSpec s;
    s.model = tpl.model;
    s.graph = g;
    const int L = g.vertex_count();
    s.t = nearest_neighbour(g, tpl.t);
    s.j = nearest_neighbour(g, tpl.j);
    s.u = tpl.u * Dense::Identity(L, L);
    s.g = tpl.g * Dense::Identity(L, L);
    s.omega = tpl.omega;
    s.kondo_j = tpl.kondo_j;
    s.n_max = tpl.n_max;
    if (tpl.model == ModelId::mlm) s.j = complete_bipartite(g);
    return s;
}

ScanReport magnetic_order_scan(const LatticeFamily& family, const ModelTemplate& tpl, int n_min, int n_max,
                               const VerifyOptions& opt, std::size_t max_nnz) {
    const auto t_start = Clock::now();
    if (n_min > n_max) throw std::invalid_argument("empty scan range");
    ScanReport r;
    r.family = family;
    r.model = tpl;
    r.tolerances = opt.tol;
    bool ok = true;
    for (int n = n_min; n <= n_max; ++n) {
        ScanEntry e;
        e.n = n;
        const Graph g = family_member(family, n);
        const ModelSpec spec = instantiate(tpl, g);
        e.sites = g.vertex_count();
        e.imbalance = sublattice_imbalance(g);
        e.ratio = reduced(e.imbalance, e.sites);
        e.ratio_value = double(e.imbalance) / double(e.sites);
        const auto v = validate(spec);
        if (const auto* f = v.first_failure()) {
            e.passed = false;
            e.note = "validation failed: " + f->name + ": " + f->witness;
            ok = false;
            r.entries.push_back(std::move(e));
            continue;
        }
        e.two_s_predicted = predicted_two_s(spec);
        const auto sectors = sectors_of(spec);
        const int m = sectors[std::size_t(lowest_index(sectors))];
        e.dim = sector_dimension(spec, m);
        e.nnz_bound = e.dim * row_bound(spec);
        if (e.nnz_bound > max_nnz) {
            e.note = "counting-only: nonzero bound " + std::to_string(e.nnz_bound) + " exceeds " + std::to_string(max_nnz);
            r.entries.push_back(std::move(e));
            continue;
        }
        try {
            const auto job = ground_of(spec, m, opt);
            e.e0 = job.g.energy;
            const auto spins = sector_spins(job);
            e.two_s = spins.front().two_s;
            e.diagonalized = true;
            for (const auto& s : spins)
                if (s.two_s != *e.two_s) {
                    e.passed = false;
                    e.note = "degenerate ground states of different spin";
                }
            if (e.two_s_predicted && e.two_s != e.two_s_predicted) {
                e.passed = false;
                e.note = "S = " + format_half(*e.two_s) + ", predicted " + format_half(*e.two_s_predicted);
            }
        } catch (const SolverError& ex) {
            e.note = std::string("counting-only: solver failed: ") + ex.what();
        } catch (const SpinMixtureError& ex) {
            e.passed = false;
            e.note = ex.what();
        }
        ok = ok && e.passed;
        r.entries.push_back(std::move(e));
    }
    r.verdict = ok ? kVerdictPass : kVerdictFail;
    r.timings = {{"total", since(t_start)}};
    return r;
}

Json to_json(const ScanReport& r) {
    Json j;
    j["model"] = {{"name", model_name(r.model.model)},
                  {"family", family_name(r.family.kind)},
                  {"z", r.family.z},
                  {"t", r.model.t},
                  {"u", r.model.u},
                  {"j", r.model.j},
                  {"g", r.model.g},
                  {"omega", r.model.omega},
                  {"kondo_j", r.model.kondo_j},
                  {"n_max", r.model.n_max}};
    Json entries = Json::array();
    for (const auto& e : r.entries) {
        Json x;
        x["n"] = e.n;
        x["sites"] = e.sites;
        x["imbalance"] = e.imbalance;
        x["ratio"] = e.ratio;
        x["ratio_value"] = e.ratio_value;
        x["S_predicted"] = e.two_s_predicted ? Json(format_half(*e.two_s_predicted)) : Json(nullptr);
        x["S"] = e.two_s ? Json(format_half(*e.two_s)) : Json(nullptr);
        x["S_per_site"] = e.two_s ? Json(0.5 * *e.two_s / e.sites) : Json(nullptr);
        x["E0"] = e.diagonalized ? Json(e.e0) : Json(nullptr);
        x["dim"] = e.dim;
        x["nnz_bound"] = e.nnz_bound;
        x["diagonalized"] = e.diagonalized;
        x["passed"] = e.passed;
        x["note"] = e.note;
        entries.push_back(std::move(x));
    }
    j["sectors"] = entries;
    std::size_t diag = 0;
    for (const auto& e : r.entries) diag += e.diagonalized;
    j["global"] = {{"members", r.entries.size()}, {"diagonalized", diag}};
    j["verdict"] = r.verdict;
    j["tolerances"] = to_json(r.tolerances);
    j["timings"] = timings_json(r.timings);
    return j;
}

ModelSpec relabel_spec(const ModelSpec& spec, const std::vector<int>& perm) {
    const int L = spec.sites();
    if (int(perm.size()) != L) throw std::invalid_argument("permutation does not match the lattice");
    std::vector<int> seen(std::size_t(L), 0);
    for (int p : perm) {
        if (p < 0 || p >= L || seen[std::size_t(p)]++) throw std::invalid_argument("not a permutation");
    }
    ModelSpec out = spec;
    out.graph = relabel(spec.graph, perm);
    auto move = [&](const Dense& m) {
        if (m.size() == 0) return m;
        Dense r(m.rows(), m.cols());
        for (int x = 0; x < L; ++x)
            for (int y = 0; y < L; ++y) r(perm[x], perm[y]) = m(x, y);
        return r;
    };
    out.t = move(spec.t);
    out.u = move(spec.u);
    out.j = move(spec.j);
    out.g = move(spec.g);
    return out;
}

InvarianceReport isomorphism_invariance(const ModelSpec& spec, const std::vector<int>& perm, const VerifyOptions& opt) {
    const auto t_start = Clock::now();
    InvarianceReport r;
    r.spec = spec;
    r.perm = perm;
    r.tolerances = opt.tol;
    r.original = spectral_summary(spec, opt);
    r.relabeled = spectral_summary(relabel_spec(spec, perm), opt);
    for (std::size_t i = 0; i < r.original.sector_e0.size(); ++i)
        r.max_energy_difference =
            std::max(r.max_energy_difference, std::abs(r.original.sector_e0[i] - r.relabeled.sector_e0[i]));
    const bool ok = r.original.two_m == r.relabeled.two_m && r.max_energy_difference <= opt.tol.isomorphism &&
                    r.original.degeneracy == r.relabeled.degeneracy && r.original.two_s == r.relabeled.two_s;
    r.verdict = ok ? kVerdictPass : kVerdictFail;
    r.timings = {{"total", since(t_start)}};
    return r;
}

Json to_json(const InvarianceReport& r) {
    Json j;
    j["model"] = to_json(r.spec);
    j["sectors"] = Json::array({{{"labeling", "original"}, {"summary", summary_json(r.original)}},
                                {{"labeling", "relabeled"}, {"summary", summary_json(r.relabeled)}}});
    j["global"] = {{"permutation", r.perm}, {"max_energy_difference", r.max_energy_difference}};
    j["verdict"] = r.verdict;
    j["tolerances"] = to_json(r.tolerances);
    j["timings"] = timings_json(r.timings);
    return j;
}

ConstancyReport constancy_check(const std::vector<ModelSpec>& variants, const VerifyOptions& opt) {
    if (variants.empty()) throw std::invalid_argument("no coupling variants");
    ConstancyReport r;
    bool all_pass = true;
    for (const auto& v : variants) {
        r.runs.push_back(verify_model(v, opt));
        all_pass = all_pass && r.runs.back().passed();
    }
    r.constant = true;
    for (const auto& run : r.runs)
        r.constant = r.constant && run.global.two_s_computed && run.global.two_s_computed == r.runs[0].global.two_s_computed;
    r.verdict = r.constant && all_pass ? kVerdictPass : kVerdictFail;
    return r;
}

ConvergenceReport convergence_sweep(const ModelSpec& spec, const std::vector<int>& cutoffs, const VerifyOptions& opt) {
    if (!has_phonons(spec.model)) throw ValidationError("convergence sweeps apply to phonon models");
    if (cutoffs.empty()) throw std::invalid_argument("no cutoffs");
    ConvergenceReport r;
    bool all_pass = true;
    for (int n : cutoffs) {
        ModelSpec s = spec;
        s.n_max = n;
        const auto rep = verify_model(s, opt);
        r.entries.push_back({n, rep.global.e0, rep.global.degeneracy, rep.global.two_s_computed, rep.verdict});
        all_pass = all_pass && rep.passed();
    }
    r.spin_stable = true;
    for (const auto& e : r.entries) r.spin_stable = r.spin_stable && e.two_s && e.two_s == r.entries[0].two_s;
    r.converged = true;
    for (const auto& a : r.entries)
        for (const auto& b : r.entries)
            if (b.n_max == a.n_max + 2) {
                const double d = std::abs(a.e0 - b.e0);
                r.deltas.emplace_back(a.n_max, d);
                r.converged = r.converged && d <= opt.tol.convergence;
            }
    r.verdict = all_pass && r.spin_stable && r.converged ? kVerdictPass : kVerdictFail;
    return r;
}

}  // namespace spinstab
