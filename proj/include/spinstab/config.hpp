#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "spinstab/hamiltonians.hpp"
#include "spinstab/report.hpp"

namespace spinstab {

// A coupling matrix described independently of the lattice it lands on:
// "4" (4 on the diagonal), "nn=1", "complete_bipartite", "0" or a file
// holding a whitespace-separated square matrix ("file:path").
struct CouplingRecipe {
    enum class Kind { zero, scalar, nn, complete_bipartite, file };
    Kind kind = Kind::zero;
    double value = 0;
    std::string path;

    static CouplingRecipe parse(const std::string& text);  // ParseError
    Dense on(const Graph& g) const;                         // ParseError on unreadable files
    std::string str() const;
};

// "star:2", "path:4", "cycle:6", "bethe_ball:2" (z from the second argument),
// "bethe_ball:3:2", "lieb:1", or a graph file path (optionally "file:path").
Graph parse_lattice(const std::string& text);

std::vector<int> parse_int_list(const std::string& text);  // "0,1,2"
std::vector<double> parse_double_list(const std::string& text);

struct RunConfig {
    std::string command;
    std::string model = "heisenberg";
    std::string lattice;
    std::optional<CouplingRecipe> t, u, j, g;  // unset: model default
    double kondo_j = 1.0;
    double omega = 1.0;
    int n_max = 6;
    std::optional<int> electrons;
    std::optional<int> sector;  // 2M, build/diagonalize only
    Tolerances tol;

    std::string output;        // JSON report path; empty: stdout
    std::string format = "json";  // json | table
    std::string coordinates;   // build: coordinate export path
    std::string graph_out;     // lattice: graph file export path

    std::string pair_model;
    std::string pair_lattice;
    std::vector<int> site_map;

    std::string family;
    int z = 3;
    int n_from = 1, n_to = 1;
    std::size_t max_nnz = 1000000;

    std::string permutation;   // "2,0,1" or "random"
    std::vector<int> cutoffs;  // verify on phonon models: convergence sweep

    bool parallel = true;
};

// Every recognised key, in documentation order.
const std::vector<std::string>& config_keys();

// ParseError on unknown keys and malformed values.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);
// "key = value" lines; '#' starts a comment.
void read_config(std::istream& in, RunConfig& cfg);
void read_config_file(const std::string& path, RunConfig& cfg);

// ValidationError for non-positive tolerances; ParseError for unknown
// commands or models.
void check_config(const RunConfig& cfg);

ModelSpec make_spec(const RunConfig& cfg, const std::string& model, const Graph& g);
ModelSpec make_spec(const RunConfig& cfg);

}  // namespace spinstab
