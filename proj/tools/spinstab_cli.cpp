// spinstab_cli: command-line front end.
//
//   spinstab_cli verify --model mlm --lattice star:2
//   spinstab_cli scan --model heisenberg --family star --range 2..4
//   spinstab_cli pair --model hubbard --pair_model mlm --lattice star:2
//   spinstab_cli build --model hubbard --lattice path:4 --sector 0 --coordinates h.txt
//
// Exit codes: 0 all checks pass, 1 a theorem check failed, 2 parse error,
// 3 validation failure, 4 solver failure.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "spinstab/config.hpp"
#include "spinstab/error.hpp"
#include "spinstab/verify.hpp"

using namespace spinstab;

namespace {

enum Exit { kOk = 0, kTheorem = 1, kParse = 2, kValidation = 3, kSolver = 4 };

using Clock = std::chrono::steady_clock;

void write_out(const RunConfig& cfg, const Json& j, const std::string& table) {
    if (!cfg.output.empty()) {
        std::ofstream out(cfg.output);
        if (!out) throw std::runtime_error("cannot write report to '" + cfg.output + "'");
        emit_json(out, j);
    }
    if (cfg.format == "table") std::cout << table;
    else if (cfg.output.empty()) emit_json(std::cout, j);
    else std::cout << "verdict: " << j.value("verdict", std::string("-")) << " (report: " << cfg.output << ")\n";
}

int exit_for(const std::string& verdict) { return verdict == kVerdictFail ? kTheorem : kOk; }

Json validation_json(const ModelSpec& spec, const ValidationReport& v, const Tolerances& tol) {
    Json conds = Json::array();
    for (const auto& c : v.conditions) conds.push_back({{"name", c.name}, {"passed", c.passed}, {"witness", c.witness}});
    Json j;
    j["model"] = to_json(spec);
    j["sectors"] = Json::array();
    j["global"] = {{"validation", conds}, {"notes", v.notes}};
    j["verdict"] = kVerdictFail;
    j["tolerances"] = to_json(tol);
    j["timings"] = Json::object();
    return j;
}

// Writes a validation report and returns true when the spec fails validation.
bool reject_invalid(const RunConfig& cfg, const ModelSpec& spec) {
    const auto v = validate(spec);
    const auto* f = v.first_failure();
    if (!f) return false;
    std::cerr << "validation failed: " << f->name << ": " << f->witness << "\n";
    write_out(cfg, validation_json(spec, v, cfg.tol), "validation failed: " + f->name + ": " + f->witness + "\n");
    return true;
}

VerifyOptions options(const RunConfig& cfg) {
    VerifyOptions o;
    o.tol = cfg.tol;
    o.parallel = cfg.parallel;
    return o;
}

int cmd_lattice(const RunConfig& cfg) {
    const Graph g = parse_lattice(cfg.lattice);
    Json j;
    Json edges = Json::array();
    for (auto [u, v] : g.edges()) edges.push_back({u, v});
    j["model"] = {{"lattice", cfg.lattice}, {"vertices", g.vertex_count()}, {"edges", edges}};
    Json global;
    global["connected"] = g.is_connected();
    std::optional<Bipartition> bip;
    if (g.is_connected()) bip = bipartition(g);
    global["bipartite"] = bip.has_value();
    if (bip) {
        const int imb = sublattice_imbalance(g);
        global["part_a"] = bip->part_a;
        global["part_b"] = bip->part_b;
        global["imbalance"] = imb;
        global["imbalance_per_site"] = double(imb) / g.vertex_count();
    }
    Json sectors = Json::array();
    if (g.is_connected() && g.vertex_count() <= 12) {
        for (int two_m = -(g.vertex_count() - 1); two_m <= g.vertex_count() - 1; two_m += 2) {
            const auto cg = nt_config_graph(g, two_m);
            const auto comp = cg.components();
            const int n = comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
            sectors.push_back({{"two_m", two_m}, {"M", format_half(two_m)}, {"nodes", cg.nodes().size()}, {"components", n}});
        }
    }
    j["sectors"] = sectors;
    j["global"] = global;
    j["verdict"] = kVerdictPass;
    j["tolerances"] = to_json(cfg.tol);
    j["timings"] = Json::object();
    if (!cfg.graph_out.empty()) {
        std::ofstream out(cfg.graph_out);
        if (!out) throw std::runtime_error("cannot write graph to '" + cfg.graph_out + "'");
        write_graph(out, g);
    }
    std::ostringstream table;
    table << g.vertex_count() << " vertices, " << g.edges().size() << " edges";
    if (bip) table << ", |A| = " << bip->part_a.size() << ", |B| = " << bip->part_b.size();
    table << "\n";
    write_out(cfg, j, table.str());
    return kOk;
}

int cmd_build(const RunConfig& cfg) {
    const auto t0 = Clock::now();
    const ModelSpec spec = make_spec(cfg);
    const std::vector<int> sectors = cfg.sector ? std::vector<int>{*cfg.sector} : sectors_of(spec);
    std::ofstream coords;
    if (!cfg.coordinates.empty()) {
        coords.open(cfg.coordinates);
        if (!coords) throw std::runtime_error("cannot write coordinates to '" + cfg.coordinates + "'");
    }
    Json list = Json::array();
    std::ostringstream table;
    bool ok = true;
    for (int m : sectors) {
        const auto built = build(spec, m);
        const bool herm = is_hermitian(built.h.matrix(), cfg.tol.hermitian);
        ok = ok && herm;
        list.push_back({{"two_m", m},
                        {"M", format_half(m)},
                        {"dim", built.basis->size()},
                        {"nnz", built.h.matrix().nonZeros()},
                        {"hermitian", herm}});
        table << "M=" << format_half(m) << " dim " << built.basis->size() << " nnz " << built.h.matrix().nonZeros()
              << (herm ? "" : " NOT HERMITIAN") << "\n";
        if (coords) {
            coords << "# sector 2M=" << m << "\n";
            write_coordinates(coords, built.h);
        }
    }
    Json j;
    j["model"] = to_json(spec);
    j["sectors"] = list;
    j["global"] = {{"subspace", subspace_name(subspace_of(spec).kind)}, {"particles", particle_number_of(spec)}};
    j["verdict"] = ok ? kVerdictPass : kVerdictFail;
    j["tolerances"] = to_json(cfg.tol);
    j["timings"] = {{"total", std::chrono::duration<double>(Clock::now() - t0).count()}};
    write_out(cfg, j, table.str());
    return ok ? kOk : kTheorem;
}

int cmd_diagonalize(const RunConfig& cfg) {
    const auto t0 = Clock::now();
    const ModelSpec spec = make_spec(cfg);
    Json list = Json::array();
    Json global;
    std::ostringstream table;
    if (cfg.sector) {
        const auto built = build(spec, *cfg.sector);
        const auto g = ground_space(built.h, solver_options(cfg.tol));
        list.push_back({{"two_m", *cfg.sector}, {"M", format_half(*cfg.sector)}, {"dim", built.basis->size()},
                        {"E0", g.energy}, {"multiplicity", g.multiplicity}, {"gap", g.gap}, {"method", g.method}});
        global = {{"E0", g.energy}, {"degeneracy", g.multiplicity}};
        table.precision(12);
        table << "M=" << format_half(*cfg.sector) << " E0 " << g.energy << " multiplicity " << g.multiplicity << "\n";
    } else {
        const auto s = spectral_summary(spec, options(cfg));
        table.precision(12);
        for (std::size_t i = 0; i < s.two_m.size(); ++i) {
            list.push_back({{"two_m", s.two_m[i]}, {"M", format_half(s.two_m[i])}, {"E0", s.sector_e0[i]}});
            table << "M=" << format_half(s.two_m[i]) << " E0 " << s.sector_e0[i] << "\n";
        }
        global = {{"E0", s.e0}, {"degeneracy", s.degeneracy},
                  {"S", s.two_s ? Json(format_half(*s.two_s)) : Json(nullptr)}};
        table << "E0 " << s.e0 << " degeneracy " << s.degeneracy;
        if (s.two_s) table << " S " << format_half(*s.two_s);
        table << "\n";
    }
    Json j;
    j["model"] = to_json(spec);
    j["sectors"] = list;
    j["global"] = global;
    j["verdict"] = kVerdictPass;
    j["tolerances"] = to_json(cfg.tol);
    j["timings"] = {{"total", std::chrono::duration<double>(Clock::now() - t0).count()}};
    write_out(cfg, j, table.str());
    return kOk;
}

int cmd_verify(const RunConfig& cfg) {
    const ModelSpec spec = make_spec(cfg);
    if (reject_invalid(cfg, spec)) return kValidation;
    auto report = verify_model(spec, options(cfg));
    if (!cfg.cutoffs.empty()) {
        const auto sweep = convergence_sweep(spec, cfg.cutoffs, options(cfg));
        std::ostringstream deltas;
        deltas.precision(3);
        for (const auto& [n, d] : sweep.deltas)
            deltas << (deltas.tellp() > 0 ? ", " : "") << "|E0(" << n << ") - E0(" << n + 2 << ")| = " << d;
        report.checks.push_back({"cutoff convergence", sweep.converged, deltas.str()});
        report.checks.push_back({"spin stable across cutoffs", sweep.spin_stable, ""});
        report.settle();
    }
    std::ostringstream table;
    emit_table(table, report);
    write_out(cfg, to_json(report), table.str());
    return exit_for(report.verdict);
}

ModelTemplate scan_template(const RunConfig& cfg) {
    ModelTemplate tpl;
    tpl.model = model_from_name(cfg.model);
    auto value = [](const std::optional<CouplingRecipe>& r, CouplingRecipe::Kind want, double dflt, const char* name) {
        if (!r) return dflt;
        if (r->kind == CouplingRecipe::Kind::zero) return 0.0;
        if (r->kind != want) throw ParseError(std::string("scan: coupling ") + name + " must be " +
                                              (want == CouplingRecipe::Kind::nn ? "nn=v" : "a scalar"));
        return r->value;
    };
    tpl.t = value(cfg.t, CouplingRecipe::Kind::nn, 1.0, "t");
    tpl.j = value(cfg.j, CouplingRecipe::Kind::nn, 1.0, "J");
    tpl.u = value(cfg.u, CouplingRecipe::Kind::scalar, 4.0, "U");
    tpl.g = value(cfg.g, CouplingRecipe::Kind::scalar, 0.0, "g");
    tpl.omega = cfg.omega;
    tpl.kondo_j = cfg.kondo_j;
    tpl.n_max = cfg.n_max;
    return tpl;
}

int cmd_scan(const RunConfig& cfg) {
    const auto kind = family_from_name(cfg.family);
    if (!kind) throw ParseError("unknown family '" + cfg.family + "'");
    LatticeFamily fam{*kind, cfg.z};
    const auto r = magnetic_order_scan(fam, scan_template(cfg), cfg.n_from, cfg.n_to, options(cfg), cfg.max_nnz);
    std::ostringstream table;
    table << "n  sites  imbalance/sites  S_pred  S     dim        note\n";
    for (const auto& e : r.entries)
        table << e.n << "  " << e.sites << "  " << e.ratio << "  "
              << (e.two_s_predicted ? format_half(*e.two_s_predicted) : "-") << "  "
              << (e.two_s ? format_half(*e.two_s) : "-") << "  " << e.dim << "  " << e.note << "\n";
    table << "verdict: " << r.verdict << "\n";
    write_out(cfg, to_json(r), table.str());
    return exit_for(r.verdict);
}

int cmd_pair(const RunConfig& cfg) {
    const ModelSpec a = make_spec(cfg);
    const Graph gb = cfg.pair_lattice.empty() ? a.graph : parse_lattice(cfg.pair_lattice);
    const ModelSpec b = make_spec(cfg, cfg.pair_model, gb);
    std::vector<int> map = cfg.site_map;
    if (map.empty() && !(gb == a.graph)) {
        map.resize(std::size_t(gb.vertex_count()));
        std::iota(map.begin(), map.end(), 0);
    }
    for (const ModelSpec* s : {&a, &b})
        if (reject_invalid(cfg, *s)) return kValidation;
    const auto r = verify_stability_pair(a, b, map, options(cfg));
    std::ostringstream table;
    table << "relation " << r.relation << ": S_A "
          << (r.a.global.two_s_computed ? format_half(*r.a.global.two_s_computed) : "-") << ", S_B "
          << (r.b.global.two_s_computed ? format_half(*r.b.global.two_s_computed) : "-") << ", overlap " << r.overlap
          << "\n";
    for (const auto& c : r.checks) table << (c.passed ? "  ok   " : "  FAIL ") << c.name << (c.detail.empty() ? "" : ": ") << c.detail << "\n";
    table << "verdict: " << r.verdict << "\n";
    write_out(cfg, to_json(r), table.str());
    return exit_for(r.verdict);
}

int cmd_invariance(const RunConfig& cfg) {
    const ModelSpec spec = make_spec(cfg);
    std::vector<int> perm;
    if (cfg.permutation.empty() || cfg.permutation == "random") {
        perm.resize(std::size_t(spec.sites()));
        std::iota(perm.begin(), perm.end(), 0);
        std::mt19937_64 rng(cfg.tol.seed);
        std::shuffle(perm.begin(), perm.end(), rng);
    } else {
        perm = parse_int_list(cfg.permutation);
    }
    const auto r = isomorphism_invariance(spec, perm, options(cfg));
    std::ostringstream table;
    table.precision(3);
    table << "E0 " << r.original.e0 << " vs " << r.relabeled.e0 << ", max sector difference " << r.max_energy_difference
          << "\nverdict: " << r.verdict << "\n";
    write_out(cfg, to_json(r), table.str());
    return exit_for(r.verdict);
}

int run(const RunConfig& cfg) {
    if (cfg.command == "lattice") return cmd_lattice(cfg);
    if (cfg.command == "build") return cmd_build(cfg);
    if (cfg.command == "diagonalize") return cmd_diagonalize(cfg);
    if (cfg.command == "verify") return cmd_verify(cfg);
    if (cfg.command == "scan") return cmd_scan(cfg);
    if (cfg.command == "pair") return cmd_pair(cfg);
    return cmd_invariance(cfg);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ground-state spin verification for lattice electron models"};
    std::string command, config_path;
    app.add_option("command", command, "lattice | build | diagonalize | verify | scan | pair | invariance");
    app.add_option("--config", config_path, "key = value config file; flags override it");
    std::map<std::string, std::string> values;
    std::vector<std::pair<std::string, CLI::Option*>> flags;
    for (const auto& key : config_keys()) {
        if (key == "command") continue;
        flags.emplace_back(key, app.add_option("--" + key, values[key]));
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kParse;
    }
    try {
        RunConfig cfg;
        if (!config_path.empty()) read_config_file(config_path, cfg);
        if (!command.empty()) cfg.command = command;
        for (const auto& [key, opt] : flags)
            if (opt->count() > 0) apply_setting(cfg, key, values[key]);
        try {
            check_config(cfg);
        } catch (const ValidationError& e) {
            // a malformed tolerance is a configuration error
            throw ParseError(e.what());
        }
        return run(cfg);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kParse;
    } catch (const ValidationError& e) {
        std::cerr << "validation failed: " << e.what() << "\n";
        return kValidation;
    } catch (const SolverError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kSolver;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kSolver;
    }
}
