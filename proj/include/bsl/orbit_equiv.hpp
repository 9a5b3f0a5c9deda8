#pragma once

#include "bsl/generators.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace bsl {

struct OEStep {
    int index = 0;        // n of x_n
    int j = 0;            // j_n
    double x = 0;         // x_n
    char alt = 'b';       // 'a' when x_n lies in I_{j_n}
    int K = 0;            // iterate count reaching x_n
};

struct OEWitness {
    Scalar x, y;
    int j = -1;           // y = phi_j(x); -1 for a plain search
    bool found = false;
    int n = 0, m = 0;     // Phi^n(x) = Phi^m(y)
    bool verified = false;
    bool mirrored = false;   // solved as x = phi_{bar j}(y)
    char side = 'a';         // 'a' on I_j, 'L' left of z_j, 'R' right of z_{zeta j}
    std::vector<OEStep> transcript;
};

// First (n, m) in (n + m, n) order with Phi^n(x) = Phi^m(y) to within eps.
OEWitness find_common_iterates(const CircleMap& map, const Scalar& x, const Scalar& y, int bound,
                               double eps = -1.0);

// Follows the cutting point shifts from x towards an iterate landing in I_{j_n}.
OEWitness constructive_witness(const CircleMap& map, const GeneratorFamily& fam, int j, const Scalar& x,
                               int max_steps = 200, double neutral_eps = 1e-12, double eps = -1.0);

// Distance from x to the nearest neutral point of phi_j.
double neutral_distance(const GeneratorFamily& fam, int j, const Scalar& x);

struct OEFuzzReport {
    int samples = 0;
    int bound = 0;
    std::uint64_t seed = 0;
    double neutral_eps = 1e-12;
    std::uint64_t pairs = 0;
    std::uint64_t success = 0;
    std::uint64_t excluded = 0;       // neutral point proximity, flagged by both methods
    std::uint64_t not_found = 0;      // brute force exhausted the bound
    std::uint64_t disagreements = 0;  // witnesses certify different orbit offsets
    std::uint64_t failures = 0;       // constructive witness failed outside the exclusion balls
    int max_nm = 0;
    std::vector<std::string> notes;   // first few failure descriptions
    std::vector<OEWitness> witnesses; // constructive witnesses in sample order
    double success_rate() const;
};

OEFuzzReport fuzz_orbit_equivalence(const CircleMap& map, const GeneratorFamily& fam, int samples, int bound,
                                    std::uint64_t seed = 1, double neutral_eps = 1e-12);

} // namespace bsl
