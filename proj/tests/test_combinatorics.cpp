#include "doctest.h"

#include "bsl/combinatorics.hpp"
#include "bsl/errors.hpp"
#include "test_support.hpp"

#include <random>

using namespace bsl;

TEST_SUITE("combinatorics") {

TEST_CASE("canonical N=4 rotation data")
{
    Combinatorics c = canonical_rotation_combinatorics(4);
    for (int j = 0; j < 8; ++j) {
        CHECK(c.delta[j] == (j + 5) % 8);
        CHECK(c.gamma[j] == (j + 3) % 8);
        CHECK(c.half_len[j] == 4);
    }
    CHECK(c.num_delta_cycles == 1);
    CHECK(all_pass(verify_permutation_identities(c)));
}

TEST_CASE("rejections")
{
    std::vector<int> zeta{1, 2, 3, 4, 5, 6, 7, 0};
    CHECK_THROWS_AS(build_combinatorics(4, zeta, {1, 2, 3, 4, 5, 6, 7, 0}), NotInvolution);
    CHECK_THROWS_AS(build_combinatorics(4, zeta, {1, 0, 3, 2, 5, 4, 7, 6}), AdjacentPairing);
    CHECK_THROWS_AS(build_combinatorics(4, zeta, {0, 2, 1, 4, 3, 6, 5, 7}), HasFixedPoint);
    CHECK_THROWS_AS(canonical_rotation_combinatorics(3), NTooSmall);
    CHECK_THROWS_AS(canonical_rotation_combinatorics(5), OddOrShortCycle);
    Combinatorics c6 = canonical_rotation_combinatorics(6);
    CHECK(c6.num_delta_cycles == 1);
    CHECK(c6.k(0) == 6);
}

TEST_CASE("corrupted gamma is detected with a witness")
{
    Combinatorics c = canonical_rotation_combinatorics(4);
    std::swap(c.gamma[2], c.gamma[5]);
    auto r = verify_permutation_identities(c);
    CHECK_FALSE(r[0].pass);
    CHECK(r[0].witness == "j=3");
}

TEST_CASE("normalization relabels zeta to a rotation")
{
    std::vector<int> order{0, 3, 6, 1, 4, 7, 2, 5};
    std::vector<int> zeta(8), iota(8);
    for (int i = 0; i < 8; ++i) {
        zeta[order[i]] = order[(i + 1) % 8];
        iota[order[i]] = order[(i + 4) % 8];
    }
    Combinatorics c = build_combinatorics(4, zeta, iota);
    Combinatorics r = normalize_rotation(c);
    CHECK(r.zeta_is_rotation());
    CHECK(r.iota == canonical_rotation_combinatorics(4).iota);
}

TEST_CASE("random valid instances satisfy every identity")
{
    std::mt19937_64 rng(20261015);
    int found = 0;
    for (int N = 4; N <= 8; ++N) {
        for (int t = 0; t < 10; ++t) {
            auto c = testing::random_combinatorics(N, rng);
            auto r = verify_permutation_identities(c);
            CHECK(all_pass(r));
            ++found;
        }
    }
    CHECK(found == 50);
}

} // TEST_SUITE
