#pragma once

#include <random>
#include <string>
#include <vector>

namespace bsl {

// Permutation data on 2N symbols. Indices are 0-based in memory; JSON and
// user-facing output use 1-based labels.
struct Combinatorics {
    int N = 0;
    std::vector<int> zeta;
    std::vector<int> zeta_inv;
    std::vector<int> iota;
    std::vector<int> gamma;
    std::vector<int> delta;
    std::vector<int> cycle_len;      // l[j]: length of the delta-cycle through j
    std::vector<int> half_len;       // k(j) = l[j] / 2
    std::vector<int> delta_cycle;    // id of the delta-cycle through j
    int num_delta_cycles = 0;

    int n() const { return 2 * N; }
    int bar(int j) const { return iota[j]; }
    int k(int j) const { return half_len[j]; }
    int k_max() const;
    int k_min() const;
    int gamma_pow(int m, int j) const;
    int delta_pow(int m, int j) const;
    // c_j = gamma^{k(j)-1}(zeta^{-1}(j)), d_j = delta^{k(j)-1}(j).
    int c(int j) const { return gamma_pow(k(j) - 1, zeta_inv[j]); }
    int d(int j) const { return delta_pow(k(j) - 1, j); }
    // Letters of the right (delta) and left (gamma) itineraries of z_j.
    std::vector<int> delta_word(int j, int len) const;
    std::vector<int> gamma_word(int j, int len) const;
    bool zeta_is_rotation() const;
};

Combinatorics build_combinatorics(int N, const std::vector<int>& zeta, const std::vector<int>& iota);
Combinatorics canonical_rotation_combinatorics(int N);
// Relabel so that zeta becomes j -> j+1.
Combinatorics normalize_rotation(const Combinatorics& c);
// Rejection sampler over fixed-point-free involutions with zeta = rotation.
Combinatorics random_combinatorics(int N, std::mt19937_64& rng);

struct IdentityResult {
    std::string name;
    bool pass = true;
    std::string witness;
};

std::vector<IdentityResult> verify_permutation_identities(const Combinatorics& c);
bool all_pass(const std::vector<IdentityResult>& r);

} // namespace bsl
