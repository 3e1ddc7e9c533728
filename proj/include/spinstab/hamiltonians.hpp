#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spinstab/lattice.hpp"
#include "spinstab/operators.hpp"

namespace spinstab {

enum class ModelId { mlm, heisenberg, hubbard, hubbard_nt, holstein_hubbard, holstein_nt, kondo, kondo_holstein };

std::string model_name(ModelId m);
ModelId model_from_name(const std::string& s);  // ParseError on unknown names
std::vector<ModelId> all_models();

bool has_phonons(ModelId m);
bool is_nt(ModelId m);
bool is_kondo(ModelId m);

// Coupling matrices are |Lambda| x |Lambda|; an empty matrix means zero.
struct ModelSpec {
    ModelId model = ModelId::heisenberg;
    Graph graph;
    Dense t, u, j, g;
    double kondo_j = 0.0;
    double omega = 0.0;
    int n_max = 6;
    // Electron count for hubbard / holstein_hubbard; unset means half filling.
    std::optional<int> electrons;

    int sites() const { return graph.vertex_count(); }
};

// Nearest-neighbour matrix: v on every edge of g.
Dense nearest_neighbour(const Graph& g, double v);
// Complete bipartite couplings J^MLM (1 between every A and B site).
Dense complete_bipartite(const Graph& g);

SubspaceKind subspace_of(const ModelSpec& spec);
int particle_number_of(const ModelSpec& spec);
// Every 2M with a nonempty sector, ascending.
std::vector<int> sectors_of(const ModelSpec& spec);
// Union over M when two_m is unset.
BasisPtr basis_for(const ModelSpec& spec, std::optional<int> two_m);

struct BuiltModel {
    BasisPtr basis;
    SparseOperator h;
};

// Throws ValidationError for malformed couplings or an empty sector.
BuiltModel build(const ModelSpec& spec, std::optional<int> two_m);
SparseOperator build_on(const ModelSpec& spec, const BasisPtr& basis);

struct UEffective {
    Dense matrix;
    double min_eigenvalue;
};
// U - (2/omega) g g^T
UEffective u_effective(const ModelSpec& spec);

struct ConditionResult {
    std::string name;
    bool passed;
    std::string witness;  // set whenever passed is false
};

struct ValidationReport {
    std::vector<ConditionResult> conditions;
    std::vector<std::string> notes;

    bool ok() const;
    const ConditionResult* first_failure() const;
    const ConditionResult* find(const std::string& name) const;
};

inline constexpr double kDefiniteTol = 1e-10;

ValidationReport validate(const ModelSpec& spec);

// Doubled lattice: vertex 2x is (x, c), 2x + 1 is (x, f).
struct KondoGraphs {
    Graph af, f;
    Bipartition af_bip, f_bip;
};
KondoGraphs kondo_graphs(const Graph& g);

}  // namespace spinstab
