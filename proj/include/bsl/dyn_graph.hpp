#pragma once

#include "bsl/circle_map.hpp"

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <map>
#include <unordered_map>
#include <vector>

namespace bsl {

// Cone types of the preimage tree. A level-k cylinder I_w is typed by the
// endpoints of Phi^k(I_w); each endpoint is a one-sided orbit point of a
// cutting point, encoded as (m, age, side) with side 0 = approached from the
// right (left end of the image) and side 1 = approached from the left.
class ConeAutomaton {
public:
    struct Type {
        int eL = -1, eR = -1;          // -1 for the root (whole circle)
        bool expanded = false;
        std::vector<int> labels;       // child branches in circle order
        std::vector<int> children;     // child type ids
        // Offsets of child boundaries from the left end of the image, with
        // cuts[0] = 0 and cuts.back() = image length (empty for the root).
        std::vector<Scalar> cuts;
    };

    explicit ConeAutomaton(const CircleMap& map, double eps = -1.0);

    const CircleMap& map() const { return map_; }
    static constexpr int root_type = 0;
    const Type& type(int t);           // expands on demand
    int num_types() const { return static_cast<int>(types_.size()); }

    int endpoint_id(int m, int age, int side) const { return (age * n_ + m) * 2 + side; }
    int ep_m(int id) const { return (id / 2) % n_; }
    int ep_age(int id) const { return id / (2 * n_); }
    int ep_side(int id) const { return id % 2; }
    // A boundary whose endpoint age reached k(m) is folded in the dynamical graph.
    bool merged(int id) const { return ep_age(id) >= map_.comb().k(ep_m(id)); }
    const Scalar& point(int id);
    int point_branch(int id);

private:
    void ensure_age(int age);
    int intern(int eL, int eR);

    CircleMap map_;
    double eps_;
    int n_;
    int max_age_ = 0;
    // orbit_[side][m][age], age >= 1
    std::vector<std::vector<Scalar>> orbit_[2];
    std::vector<std::vector<int>> where_[2];
    std::deque<Type> types_;
    std::map<std::pair<int, int>, int> index_;
};

// Exact sphere sizes for levels 0..L: gamma0[k] counts level-k cylinders,
// dyn[k] counts vertices of the folded graph.
struct LevelCounts {
    std::vector<std::uint64_t> gamma0, dyn;
};

LevelCounts count_levels(ConeAutomaton& A, int L);

// One pass over every cylinder up to level L in cyclic order.
struct StructureReport {
    int levels = 0;
    std::vector<std::uint64_t> gamma0_sizes, dyn_sizes;
    std::vector<bool> sphere_cycle;         // per level: consecutive cylinders share a boundary
    std::uint64_t interior_vertices = 0;
    std::uint64_t bad_valency = 0;
    int min_valency = 0, max_valency = 0;
    std::uint64_t iiv_count = 0, iie_count = 0;
    std::uint64_t iiv_bad_indegree = 0;
    int max_multiplicity = 1;               // largest number of merged cylinders
    int first_iiv_level = -1;
    std::string witness;
    bool ok(int two_n) const;
};

StructureReport scan_structure(ConeAutomaton& A, int L);

// Lazily expanded preimage tree T_Phi.
class CylinderTree {
public:
    struct Node {
        int parent = -1, label = -1, level = 0, type = 0;
        int first_child = -1, n_children = 0, sibling_index = 0;
    };

    explicit CylinderTree(ConeAutomaton& A);

    ConeAutomaton& automaton() { return *A_; }
    int root() const { return 0; }
    const Node& node(int id) const { return nodes_[id]; }
    int size() const { return static_cast<int>(nodes_.size()); }
    void expand(int id);
    int child(int id, int i);
    int child_by_label(int id, int label);
    int find(const std::vector<int>& word);
    int left_neighbor(int id);
    int right_neighbor(int id);
    bool left_merged(int id);
    bool right_merged(int id);
    std::vector<int> word(int id) const;
    // Closed interval [lo, hi] of the cylinder on the circle (lo <= hi mod 1).
    const std::pair<Scalar, Scalar>& interval(int id);
    std::size_t cached_intervals() const { return iv_.size(); }
    void clear_interval_cache() { iv_.clear(); }

private:
    ConeAutomaton* A_;
    std::vector<Node> nodes_;
    std::vector<Scalar> inv_pow_;   // lambda^-k
    std::unordered_map<int, std::pair<Scalar, Scalar>> iv_;
};

enum class VertexKind { Root, TypeI, TypeIIv, TypeIIe };
const char* to_string(VertexKind k);

struct GEdge {
    int label = 0;     // label read from the source vertex
    int target = 0;
    bool down = true;
};

// Lazily evaluated dynamical graph: vertices are maximal runs of adjacent
// same-level cylinders joined across folded boundaries.
class DynGraph {
public:
    explicit DynGraph(const CircleMap& map, int max_level = 40, double eps = -1.0);

    const CircleMap& map() const { return A_.map(); }
    int max_level() const { return max_level_; }
    int root() const { return 0; }
    int num_vertices() const { return static_cast<int>(verts_.size()); }

    int vertex_of(int cyl);
    int vertex_of_word(const std::vector<int>& word);   // -1 if not a cylinder
    int level(int v) const { return verts_[v].level; }
    VertexKind kind(int v) const { return verts_[v].kind; }
    const std::vector<int>& members(int v) const { return verts_[v].members; }
    std::vector<int> key_word(int v) const;
    std::string id_string(int v) const;
    // Edges in cyclic order: children left to right, then parents right to left.
    const std::vector<GEdge>& edges(int v);
    int follow(int v, int label);
    int parents(int v);
    std::pair<Scalar, Scalar> interval(int v);
    int valency(int v) { return static_cast<int>(edges(v).size()); }

    CylinderTree& tree() { return T_; }
    ConeAutomaton& automaton() { return A_; }

private:
    struct V {
        int level = 0;
        VertexKind kind = VertexKind::Root;
        std::vector<int> members;
        int key = 0;
        bool has_edges = false;
        std::vector<GEdge> edges;
    };

    ConeAutomaton A_;
    CylinderTree T_;
    int max_level_;
    std::vector<V> verts_;
    std::unordered_map<int, int> by_cyl_;
};

struct CompactLoop {
    int j = 0;                   // loop of the consecutive pair (zeta^-1 j, j)
    std::vector<int> path;       // v, delta side ..., meeting vertex, ... gamma side
    bool closes = false;
};

struct CompactSet {
    int center = 0;
    std::vector<CompactLoop> loops;
    std::vector<int> vertices;   // sorted, unique
    bool ok() const;
};

CompactSet compact_set(DynGraph& G, int v);

// Materialized graphs for exports and metric diagnostics.
struct GraphVertex {
    int level = 0;
    VertexKind kind = VertexKind::TypeI;
    std::vector<std::vector<int>> words;   // member words, 0-based letters
    std::string lo, hi;                    // interval endpoints (empty if not computed)
};

struct GraphEdge {
    int u = 0, v = 0;    // u at level l, v at level l+1 for radial edges
    int label = -1;      // label of the radial edge read downward; -1 for sphere edges
    bool sphere = false;
};

struct ExplicitGraph {
    std::string name;
    int max_level = 0;
    std::vector<GraphVertex> vertices;
    std::vector<GraphEdge> edges;
    std::vector<std::vector<int>> adjacency() const;
    std::vector<std::uint64_t> sphere_sizes() const;
};

struct BuildOptions {
    std::uint64_t vertex_budget = 10000000;
    bool with_intervals = false;
    bool fold = true;
    int digits = 30;
    double eps = -1.0;
};

ExplicitGraph build_gamma0(const CircleMap& map, int L, const BuildOptions& opt = {});
ExplicitGraph build_dyngraph(const CircleMap& map, int L, const BuildOptions& opt = {});

// Sphere edges of gamma0 form one cycle per level (checked by BFS on the sphere).
bool spheres_are_cycles(const ExplicitGraph& g, std::string* witness = nullptr);

struct GrowthReport {
    std::vector<std::uint64_t> sizes;
    std::vector<double> ratios;    // sizes[k]/sizes[k-1], k >= 1
    double estimate = 0;           // geometric mean of the last three ratios
};

GrowthReport sphere_growth(const std::vector<std::uint64_t>& sizes);

std::vector<int> bfs_distances(const std::vector<std::vector<int>>& adj, int src);
// Max Gromov four-point defect over quadruples drawn from `points`: exhaustive
// when |points| <= threshold, otherwise over a seeded random subset.
double gromov_delta(const std::vector<std::vector<int>>& adj, const std::vector<int>& points,
                    int threshold, std::uint64_t seed);
double hyperbolicity_delta(const ExplicitGraph& g, int R, int threshold = 48,
                           std::uint64_t seed = 1);

void write_dot(const ExplicitGraph& g, std::ostream& os);
void write_graphml(const ExplicitGraph& g, std::ostream& os);
void write_jsonl(const ExplicitGraph& g, std::ostream& os);

} // namespace bsl
