#pragma once

#include "bsl/circle_map.hpp"

#include <optional>
#include <vector>

namespace bsl {

// Two-sided neighborhood [z_j - left, z_j + right] on which Phi^{k(j)} is
// affine of slope lambda^{k(j)}.
struct AffineNeighborhood {
    int j = 0;
    Scalar left, right;
    Scalar image_lo, image_hi;   // Phi^{k(j)} of the two endpoints
};

std::vector<AffineNeighborhood> compute_affine_neighborhoods(const CircleMap& map,
                                                             double eps = -1.0);

// Left/right extents of W_j^{p,q} around z_j: e[p][j], f[q][j].
struct WTable {
    int p_max = 0, q_max = 0;
    std::vector<std::vector<Scalar>> e, f;
    Scalar left(int j, int p) const { return e[p][j]; }
    Scalar right(int j, int q) const { return f[q][j]; }
};

WTable compute_W(const CircleMap& map, const std::vector<AffineNeighborhood>& V, int p_max,
                 int q_max, double eps = -1.0);

struct ExtensionData {
    std::vector<AffineNeighborhood> V;
    WTable W;
    std::vector<int> p, q;        // chosen indices per j
    std::vector<int> c_idx, d_idx;
};

// Piecewise-linear generator: slope lambda on [n_minus, n_plus], slope
// 1/lambda on the complement; n_plus - n_minus = 1/(lambda+1).
struct Generator {
    int j = 0;
    Scalar n_minus, n_plus;
    Scalar r0;                    // image of n_minus
    // optional independent C^1 smoothing of the n_plus kink (fault injection)
    std::optional<Scalar> smooth_half_width;
};

struct CPRelation {
    int j = 0;
    std::vector<int> lhs;         // j, delta j, ..., applied first to last
    std::vector<int> rhs;         // zeta^-1 j, gamma zeta^-1 j, ...
};

struct GeneratorOptions {
    int p_max = -1;               // default P(delta) + 1
    int fault_j = -1;             // smooth the n_plus kink of this generator
    double fault_half_width = 5e-3;
};

struct GeneratorFamily {
    CircleMap map;
    Scalar arc;                   // 1/(lambda+1)
    std::vector<Generator> gens;
    ExtensionData ext;
    std::vector<CPRelation> relations;

    Scalar eval(int j, const Scalar& x) const;
    Scalar derivative(int j, const Scalar& x) const;
    Scalar eval_word(const std::vector<int>& word, const Scalar& x) const;
};

GeneratorFamily build_generators(const CircleMap& map, const GeneratorOptions& opt = {},
                                 double eps = -1.0);

Scalar verify_cp_relation(const GeneratorFamily& fam, int j, int grid_size);

struct ProfilePiece {
    Scalar lo, hi;
    int exponent = 0;             // slope lambda^exponent
};

struct ProfileReport {
    int j = 0;
    std::vector<ProfilePiece> pieces;   // cyclic, pieces[0] contains z_j
    std::vector<Scalar> kinks;          // degenerate D intervals
    double max_mismatch = 0;            // |Psi+ - Psi-| at piece midpoints
    bool contains_W = false;            // pieces[0] covers W_j^{p,p}
};

ProfileReport verify_partition_profile(const GeneratorFamily& fam, int j, double eps = -1.0);

} // namespace bsl
