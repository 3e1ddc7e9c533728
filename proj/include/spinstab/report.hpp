#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "spinstab/hamiltonians.hpp"

namespace spinstab {

using Json = nlohmann::ordered_json;

struct Tolerances {
    double hermitian = 1e-12;
    double definite = 1e-10;
    double strict = 1e-10;
    double degeneracy = 1e-7;      // relative to max(1, |E0|)
    double spin_residual = 1e-6;
    double lanczos = 1e-8;
    double isomorphism = 1e-9;
    double convergence = 1e-6;     // |E0(n_max) - E0(n_max + 2)|
    int samples = 200;
    std::vector<double> betas{0.1, 1.0};
    std::size_t dense_threshold = 4096;
    std::uint64_t seed = 20240607;
    int max_restarts = 400;

    // ValidationError unless every tolerance is positive.
    void check() const;
};

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
    std::string mode = "exact";  // exact | sampled | consequence-verified
};

struct SectorReport {
    int two_m = 0;
    std::size_t dim = 0;
    std::size_t nnz = 0;
    double e0 = 0;
    int multiplicity = 0;
    double gap = -1;
    std::string method;
    std::optional<int> two_s;
    double spin_residual = 0;
    // ergodic | not-ergodic | cone-not-defined-under-truncation
    std::string ergodicity;
    std::string ergodicity_mode;
    std::optional<double> margin;
    std::string witness;
};

struct GlobalReport {
    double e0 = 0;
    int degeneracy = 0;
    std::optional<int> two_s_computed;
    std::optional<int> two_s_predicted;
    double spin_residual = 0;
};

inline const char* kVerdictPass = "pass";
inline const char* kVerdictFail = "fail";
inline const char* kVerdictConsequence = "consequence-verified-pass";

struct GroundStateReport {
    std::string command = "verify";
    ModelSpec spec;
    std::vector<SectorReport> sectors;
    GlobalReport global;
    std::vector<Check> checks;
    std::vector<std::string> notes;
    std::string verdict;
    Tolerances tolerances;
    std::vector<std::pair<std::string, double>> timings;  // seconds

    // pass / fail / consequence-verified-pass from the checks
    void settle();
    bool passed() const { return verdict != kVerdictFail; }
};

std::string format_half(int two_x);  // "3/2", "1", "-1/2"

Json to_json(const ModelSpec& spec);
ModelSpec model_spec_from_json(const Json& j);
Json to_json(const Tolerances& t);
Tolerances tolerances_from_json(const Json& j);

// Throws std::invalid_argument on an empty sector list or a verdict outside
// {pass, fail, consequence-verified-pass}.
Json to_json(const GroundStateReport& r);
GroundStateReport report_from_json(const Json& j);

void emit_json(std::ostream& out, const Json& j);
void emit_table(std::ostream& out, const GroundStateReport& r);

}  // namespace spinstab
