#pragma once

#include "bsl/group_action.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace bsl {

// ---------------------------------------------------------------- dilatation

struct Dilatation {
    std::vector<int> word;                     // letters[0] applied first
    Scalar lo, hi;                             // J_w = [lo, hi] (hi may exceed 1)
    Scalar slope;                              // lambda^n
    Scalar secant;                             // (w(hi) - w(lo)) / (hi - lo)
    std::vector<Scalar> point_derivatives;     // chain rule at interior points of J
    std::vector<std::vector<int>> expressions; // equal-length expressions, sorted
    int expression_count = 1;
    bool merged = false;                       // J spans the cylinders of two expressions
    bool encloses = false;                     // every derivative sample and the secant meet slope
};

// Words equal to `word` up to cutting point rewrites of contiguous factors.
std::vector<std::vector<int>> cp_expressions(const GeneratorFamily& fam, const std::vector<int>& word);

Dilatation element_dilatation(const GeneratorFamily& fam, DynGraph& G, const std::vector<int>& word);

// Upper bound of the chain-rule derivative of the word over a uniform grid.
double max_word_derivative(const GeneratorFamily& fam, const std::vector<int>& word, int grid);

// ---------------------------------------------------------------- entropy

struct EntropyReport {
    GrowthReport growth;
    double growth_log = 0;     // log of the sphere ratio estimate
    double log_lambda = 0;
    double relative_gap = 0;   // |growth_log - log_lambda| / log_lambda
};

EntropyReport entropy_compare(const std::vector<std::uint64_t>& sphere_sizes, const Scalar& lambda);
EntropyReport entropy_compare(const CircleMap& map, int levels, bool folded = true);

// ---------------------------------------------------------------- 2-complex

struct Face {
    int base = 0;                   // vertex the loop was built from
    int j = 0;                      // corner pair (zeta^-1 j, j) at base
    std::vector<int> cycle;         // boundary vertices, 2 k(j) of them
};

using EdgeKey = std::pair<int, int>;   // (min, max) vertex ids
using FaceKey = std::vector<EdgeKey>;  // sorted boundary edges

FaceKey face_key(const std::vector<int>& cycle);

struct TwoComplex {
    int radius = 0;
    std::vector<int> vertices;          // Ball(v0, radius), sorted
    std::vector<EdgeKey> edges;         // edges with an endpoint in the ball, sorted
    std::vector<Face> faces;            // unique by boundary, built at ball vertices
    std::map<FaceKey, int> face_index;
    std::uint64_t duplicate_loops = 0;  // loops whose boundary repeats an earlier face
    std::uint64_t open_loops = 0;       // loops that fail to close
    // Over interior vertices (distance <= radius - 1): every edge lies on
    // exactly two faces and the faces at v form one cycle through its edges.
    std::uint64_t links_checked = 0, links_bad = 0;
    std::uint64_t edges_checked = 0, edges_bad = 0;
    std::string witness;
    int faces_at_root() const;
};

TwoComplex build_2complex(DynGraph& G, int R);

struct EulerReport {
    int radius = 0;
    std::uint64_t V = 0, E = 0, F = 0;   // orbits meeting the star of v0
    long chi = 0;
    int genus = -1;                      // -1 when chi is odd or positive
    std::uint64_t moves = 0;             // generator images observed
    std::uint64_t unmatched_faces = 0;   // face images that are not loops
    std::string warning;
};

// Orbits are classes of the closure of observed generator moves; an element
// whose class misses the star of v0 raises OrbitClosureIncomplete.
EulerReport quotient_euler(const TwoComplex& K, GroupAction& A);

} // namespace bsl
