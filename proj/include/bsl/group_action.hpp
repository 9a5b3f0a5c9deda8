#pragma once

#include "bsl/dyn_graph.hpp"
#include "bsl/generators.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace bsl {

// Letters are generator indices; letters[0] is applied first.
bool is_reduced(const Combinatorics& cb, const std::vector<int>& letters);
std::vector<int> free_reduce(const Combinatorics& cb, std::vector<int> letters);
std::vector<int> inverse_word(const Combinatorics& cb, const std::vector<int>& letters);

enum class ActionCase { Case1, Case2, Case3i, Case3ii, Case4 };
const char* to_string(ActionCase c);

struct ActionResult {
    int target = -1;
    ActionCase which = ActionCase::Case4;
    std::vector<ActionCase> fired;       // every clause that applied
    std::vector<int> fired_targets;
};

// Arc of the circle: [lo, lo + len].
struct Arc {
    Scalar lo, len;
    double lo_d = 0, len_d = 0;   // double shadows for fast filtering
};

class GroupAction {
public:
    GroupAction(const GeneratorFamily& fam, DynGraph& G, double eps = -1.0);

    DynGraph& graph() { return G_; }
    const GeneratorFamily& family() const { return fam_; }
    int n() const { return G_.map().n(); }

    const Arc& arc(int v);
    Arc image(int j, int v);
    const ActionResult& act_generator(int j, int v);
    int act(int j, int v) { return act_generator(j, v).target; }
    int act_word(const std::vector<int>& letters, int v);

    // Overrides one table entry; used to exercise the verifier.
    void inject_fault(int j, int v, int target);

private:
    ActionResult compute(int j, int v);

    const GeneratorFamily& fam_;
    DynGraph& G_;
    double eps_;
    std::map<std::pair<int, int>, ActionResult> cache_;
    std::vector<std::unique_ptr<Arc>> arcs_;
    std::size_t live_arcs_ = 0;
};

// Vertices within distance R of v (bounded BFS on the lazy graph), sorted.
std::vector<int> ball(DynGraph& G, int v, int R);
// Graph distance if at most `bound`, otherwise -1.
int bounded_distance(DynGraph& G, int u, int v, int bound);

struct ActionCheck {
    std::string name;
    bool pass = true;
    std::uint64_t checked = 0;
    std::string witness;
};

struct ActionReport {
    int radius = 0;
    int samples = 0;
    std::uint64_t seed = 0;
    std::uint64_t ball_size = 0;
    std::vector<ActionCheck> checks;    // uniqueness, inverse, isometry, cyclic_order,
                                        // compact_sets, cocompact, free
    std::map<std::string, std::uint64_t> case_counts;
    bool ok() const;
    const ActionCheck& get(const std::string& name) const;
};

ActionReport verify_action(GroupAction& A, int R, int samples, std::uint64_t seed = 1);

// Greedy descent: letters moving v into the compact set at v0.
std::vector<int> descent_word(GroupAction& A, int v);

} // namespace bsl
