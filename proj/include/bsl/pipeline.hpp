#pragma once

#include "bsl/io.hpp"
#include "bsl/orbit_equiv.hpp"
#include "bsl/surface_checks.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace bsl::pipeline {

using json = io::json;

inline constexpr const char* kToolVersion = "1.0.0";

struct RunConfig {
    int canonical = 4;                 // canonical rotation data with N = canonical
    std::string comb_file;             // combinatorics JSON, overrides canonical
    std::string map_file;              // map JSON, skips the solver
    long precision_bits = 256;
    double epsilon = 1e-30;
    long oe_precision_bits = 512;      // orbit equivalence works at this precision
    int levels = 10;
    int radius = 5;                    // action ball radius
    int euler_radius = 1;              // quotient checked at R and R + 2
    int samples = 100;
    std::uint64_t seed = 1;
    int grid = 10000;                  // relation grid
    int bound = 64;                    // brute force iterate bound
    int max_word_length = 6;
    int profile_j = 1;                 // 1-based
    int fault_j = 4;                   // 1-based generator smoothed for the sensitivity probe
    std::vector<int> word;             // 1-based letters
    std::string out;
};

json config_json(const RunConfig& c);

struct StageReport {
    explicit StageReport(std::string name = {}) : stage(std::move(name)) {}
    std::string stage;
    bool pass = true;
    std::string failure;               // first failing item when pass is false
    json result = json::object();
};

// {"tool", "version", "stage", "config", "precision", "pass", "result"}
json envelope(const RunConfig& c, const StageReport& r);

// Shared inputs, built on first use.
class Context {
public:
    explicit Context(RunConfig cfg);

    const RunConfig& config() const { return cfg_; }
    const Combinatorics& comb();
    const SolverResult& solved();
    const CircleMap& map();
    const GeneratorFamily& family();
    const CircleMap& fine_map();
    const GeneratorFamily& fine_family();

private:
    RunConfig cfg_;
    std::optional<Combinatorics> comb_;
    std::optional<SolverResult> solved_;
    std::optional<CircleMap> map_, fine_map_;
    std::optional<GeneratorFamily> fam_, fine_fam_;
};

StageReport combi_check(Context& ctx);
StageReport map_solve(Context& ctx);
StageReport map_validate(const RunConfig& c, const CircleMap& m);
StageReport map_markovize(Context& ctx);
StageReport map_perron(Context& ctx);
StageReport gens_build(Context& ctx);
StageReport gens_verify_cp(Context& ctx);
StageReport gens_profile(Context& ctx);
StageReport graph_structure(Context& ctx);
StageReport graph_growth(Context& ctx);
StageReport graph_delta(Context& ctx);
StageReport action_verify(Context& ctx);
StageReport surface_dilate(Context& ctx);
StageReport surface_entropy(Context& ctx);
StageReport surface_euler(Context& ctx);
// Transcripts go to `transcripts` as one JSON object per line when non-null.
StageReport oe_fuzz(Context& ctx, std::ostream* transcripts = nullptr);

// Shortest round-trip decimal string.
std::string dec(double v);
json word_json(const std::vector<int>& w);
json witness_json(const OEWitness& w);

} // namespace bsl::pipeline
