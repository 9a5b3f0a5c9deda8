#include "doctest.h"

#include "bsl/errors.hpp"
#include "bsl/orbit_equiv.hpp"

#include <random>

using namespace bsl;

namespace {

struct Setup {
    CircleMap map;
    GeneratorFamily fam;
};

const Setup& fine()
{
    static const Setup s = [] {
        CircleMap m = solve_even_model(canonical_rotation_combinatorics(4)).map.at_precision(512);
        GeneratorFamily f = build_generators(m);
        return Setup{m, f};
    }();
    return s;
}

Scalar at(double d) { return Scalar::from_double(d, 512); }

} // namespace

TEST_SUITE("orbit_equiv") {

TEST_CASE("an image under the map is one iterate ahead")
{
    const CircleMap& m = fine().map;
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0, 1);
    for (int s = 0; s < 20; ++s) {
        Scalar x = at(u(rng));
        OEWitness w = find_common_iterates(m, x, m.eval(x), 8);
        CHECK(w.found);
        CHECK(w.n == 1);
        CHECK(w.m == 0);
        OEWitness back = find_common_iterates(m, m.eval(x), x, 8);
        CHECK(back.n == 0);
        CHECK(back.m == 1);
    }
}

TEST_CASE("distinct branch fixed points have disjoint orbits")
{
    const CircleMap& m = fine().map;
    Scalar p = m.fixed_point(0), q = m.fixed_point(3);
    for (int bound : {4, 16, 48}) CHECK_FALSE(find_common_iterates(m, p, q, bound).found);
}

TEST_CASE("on I_j the generator is a branch of the map")
{
    const auto& [m, fam] = fine();
    for (int j = 0; j < m.n(); ++j) {
        Scalar x = m.z(j) + m.length(j) / 3;
        OEWitness c = constructive_witness(m, fam, j, x);
        CHECK(c.side == 'a');
        CHECK_FALSE(c.mirrored);
        CHECK(c.n == 1);
        CHECK(c.m == 0);
        CHECK(c.verified);
        OEWitness b = find_common_iterates(m, x, fam.eval(j, x), 8);
        CHECK(b.n == 1);
        CHECK(b.m == 0);
    }
}

TEST_CASE("exact neutral points are flagged")
{
    const auto& [m, fam] = fine();
    for (int j = 0; j < m.n(); ++j) {
        CHECK_THROWS_AS(constructive_witness(m, fam, j, fam.gens[j].n_minus), NeutralPointDetected);
        CHECK_THROWS_AS(constructive_witness(m, fam, j, fam.gens[j].n_plus), NeutralPointDetected);
        CHECK_THROWS_AS(constructive_witness(m, fam, j, fam.gens[j].n_plus + at(1e-14)), NeutralPointDetected);
    }
}

TEST_CASE("witnesses near the neutral points need more cutting point shifts")
{
    const auto& [m, fam] = fine();
    const auto& cb = m.comb();
    for (int j = 0; j < m.n(); ++j) {
        size_t prev = 0;
        for (double d : {1e-6, 1e-8, 1e-10}) {
            for (bool left : {true, false}) {
                const Generator& g = fam.gens[j];
                Scalar x = left ? g.n_minus + at(d) : g.n_plus - at(d);
                OEWitness c = constructive_witness(m, fam, j, x, 500);
                CHECK(c.side == (left ? 'L' : 'R'));
                CHECK(c.verified);
                REQUIRE(!c.transcript.empty());
                CHECK(c.transcript.back().alt == 'a');
                CHECK(c.n == c.transcript.back().K + 1);
                CHECK(c.m == c.transcript.back().K);
                for (size_t i = 0; i + 1 < c.transcript.size(); ++i) {
                    CHECK(c.transcript[i].alt == 'b');
                    if (!left) continue;
                    int jn = c.transcript[i].j;
                    CHECK(c.transcript[i + 1].j == cb.gamma_pow(cb.k(jn) - 1, cb.zeta_inv[jn]));
                }
                if (left) {
                    CHECK(c.transcript.front().j == cb.gamma_pow(cb.k(j) - 1, cb.zeta_inv[j]));
                    CHECK(c.transcript.size() >= prev);
                    prev = c.transcript.size();
                }
                OEWitness b = find_common_iterates(m, x, c.y, 64);
                REQUIRE(b.found);
                CHECK(b.n - b.m == c.n - c.m);
            }
        }
    }
}

TEST_CASE("one shift for points just inside the first window")
{
    const auto& [m, fam] = fine();
    const auto& cb = m.comb();
    const Generator& g = fam.gens[2];
    OEWitness c = constructive_witness(m, fam, 2, g.n_minus + at(1e-6));
    CHECK(c.transcript.size() == 1);
    CHECK(c.m == cb.k(2) - 1);
}

TEST_CASE("contracting points are solved through the inverse generator")
{
    const auto& [m, fam] = fine();
    const auto& cb = m.comb();
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0, 1);
    int mirrored = 0;
    for (int s = 0; s < 40; ++s) {
        Scalar x = at(u(rng));
        int j = static_cast<int>(rng() % 8);
        OEWitness c = constructive_witness(m, fam, j, x);
        CHECK(c.verified);
        if (!c.mirrored) continue;
        ++mirrored;
        OEWitness r = constructive_witness(m, fam, cb.bar(j), c.y);
        CHECK(r.n == c.m);
        CHECK(r.m == c.n);
    }
    CHECK(mirrored > 20);
}

TEST_CASE("the derivative at the earlier point of a longer transcript is no larger")
{
    const auto& [m, fam] = fine();
    const Generator& g = fam.gens[1];
    const double lam = m.lambda().mid_d();
    Scalar x = g.n_minus + at(1e-6), xt = g.n_minus + at(1e-8);
    OEWitness a = constructive_witness(m, fam, 1, x), b = constructive_witness(m, fam, 1, xt);
    REQUIRE(b.transcript.size() == a.transcript.size() + 1);
    CHECK(circle_diff(xt, g.n_minus).mid_d() < circle_diff(x, g.n_minus).mid_d());
    double dx = fam.derivative(1, x).mid_d(), dxt = fam.derivative(1, xt).mid_d();
    CHECK(1 < dxt);
    CHECK(dxt <= dx);
    CHECK(dx <= lam * (1 + 1e-15));
}

TEST_CASE("group words give common iterates within the word length times the level")
{
    const auto& [m, fam] = fine();
    const auto& cb = m.comb();
    int K = 0;
    for (int j = 0; j < m.n(); ++j) K = std::max(K, cb.k(j));
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0, 1);
    for (int s = 0; s < 40; ++s) {
        std::vector<int> w;
        int len = 1 + static_cast<int>(rng() % 3);
        while (static_cast<int>(w.size()) < len) {
            int j = static_cast<int>(rng() % 8);
            if (!w.empty() && j == cb.bar(w.back())) continue;
            w.push_back(j);
        }
        Scalar x = at(u(rng));
        OEWitness b = find_common_iterates(m, x, fam.eval_word(w, x), len * K);
        CHECK(b.found);
        CHECK(b.n <= len * K);
        CHECK(b.m <= len * K);
    }
}

TEST_CASE("fuzz over random points and every generator")
{
    const auto& [m, fam] = fine();
    OEFuzzReport r = fuzz_orbit_equivalence(m, fam, 100, 64, 1);
    CHECK(r.pairs == 800);
    CHECK(r.success + r.excluded == r.pairs);
    CHECK(r.success_rate() == 1.0);
    CHECK(r.disagreements == 0);
    CHECK(r.failures == 0);
    CHECK(r.max_nm <= 2 * 4 + 1);
    OEFuzzReport small = fuzz_orbit_equivalence(m, fam, 100, 2, 1);
    CHECK(small.not_found > 0);
    CHECK(small.success + small.not_found == small.pairs - small.excluded);
    OEFuzzReport wide = fuzz_orbit_equivalence(m, fam, 100, 8, 1);
    CHECK(wide.not_found == 0);
}

TEST_CASE("points inside the neutral balls are all excluded")
{
    const auto& [m, fam] = fine();
    for (int j = 0; j < m.n(); ++j)
        for (double d : {-5e-13, 0.0, 5e-13}) {
            Scalar x = fam.gens[j].n_minus + at(d);
            CHECK_THROWS_AS(constructive_witness(m, fam, j, x), NeutralPointDetected);
            CHECK(neutral_distance(fam, j, x) < 1e-12);
        }
}

}
