#include "doctest.h"

#include "bsl/errors.hpp"
#include "bsl/generators.hpp"

#include <random>

using namespace bsl;

namespace {

const SolverResult& canonical_map()
{
    static const SolverResult r = solve_even_model(canonical_rotation_combinatorics(4));
    return r;
}

const GeneratorFamily& family()
{
    static const GeneratorFamily f = build_generators(canonical_map().map);
    return f;
}

double dist(const Scalar& a, const Scalar& b)
{
    return circle_distance(CirclePoint(a), CirclePoint(b)).upper_d();
}

Scalar iterate(const CircleMap& m, Scalar x, int n)
{
    for (int i = 0; i < n; ++i) x = m.eval(x);
    return x;
}

} // namespace

TEST_SUITE("generators") {

TEST_CASE("Phi^k is affine of slope lambda^k on V_j")
{
    const auto& m = canonical_map().map;
    auto V = compute_affine_neighborhoods(m);
    REQUIRE(V.size() == 8);
    Scalar l4 = pow(m.lambda(), 4);
    Scalar eta = Scalar::from_string("1e-20");
    for (const auto& v : V) {
        CHECK(v.left.certainly_positive());
        CHECK(v.right.certainly_positive());
        for (const Scalar& off : {-(v.left / 2), v.right / 2, -(v.left / 3), v.right / 5}) {
            Scalar x = frac(m.z(v.j) + off);
            Scalar y0 = iterate(m, x, 4);
            Scalar y1 = iterate(m, x + eta, 4);
            Scalar slope = circle_diff(y1, y0) / eta;
            CHECK(cmp_certified(slope, l4, 1e-30) == Cmp::Equal);
        }
        // endpoint images, read off the affine formula at an interior point
        Scalar x = frac(m.z(v.j) - v.left / 2);
        CHECK(dist(iterate(m, x, 4), v.image_lo + l4 * v.left / 2) < 1e-60);
        Scalar y = frac(m.z(v.j) + v.right / 2);
        CHECK(dist(iterate(m, y, 4), v.image_hi - l4 * v.right / 2) < 1e-60);
    }
}

TEST_CASE("W recursion starts at V, grows strictly and nests")
{
    const auto& m = canonical_map().map;
    auto V = compute_affine_neighborhoods(m);
    WTable W = compute_W(m, V, 4, 4);
    for (int j = 0; j < 8; ++j) {
        CHECK(cmp_certified(W.left(j, 0), V[j].left, 1e-60) == Cmp::Equal);
        CHECK(cmp_certified(W.right(j, 0), V[j].right, 1e-60) == Cmp::Equal);
        CHECK(cmp_certified(W.left(j, 1), V[j].left, 0.0) == Cmp::Greater);
        CHECK(cmp_certified(W.right(j, 1), V[j].right, 0.0) == Cmp::Greater);
        for (int p = 0; p < 4; ++p) {
            CHECK(cmp_certified(W.left(j, p), W.left(j, p + 1), 0.0) == Cmp::Less);
            CHECK(cmp_certified(W.right(j, p), W.right(j, p + 1), 0.0) == Cmp::Less);
        }
    }
}

TEST_CASE("W extents accumulate to the neutral point")
{
    const auto& fam = family();
    const auto& m = fam.map;
    auto W = compute_W(m, fam.ext.V, 12, 0);
    for (int j = 0; j < 8; ++j) {
        Scalar s = circle_diff(m.z(j), fam.gens[j].n_minus);
        CHECK(cmp_certified(W.left(j, 12), s, 0.0) == Cmp::Less);
        CHECK(cmp_certified(W.left(j, 12), s, 1e-30) == Cmp::Equal);
    }
}

TEST_CASE("too few W indices are rejected")
{
    GeneratorOptions opt;
    opt.p_max = 1;
    CHECK_THROWS_AS(build_generators(canonical_map().map, opt), IndexExhausted);
}

TEST_CASE("canonical family records eight relations of length four")
{
    const auto& fam = family();
    const auto& cb = fam.map.comb();
    CHECK(cb.num_delta_cycles == 1);
    CHECK(fam.ext.p[0] == 2);
    REQUIRE(fam.relations.size() == 8);
    for (const auto& r : fam.relations) {
        REQUIRE(r.lhs.size() == 4);
        REQUIRE(r.rhs.size() == 4);
        for (int t = 0; t < 4; ++t) {
            CHECK(r.lhs[t] == cb.delta_pow(t, r.j));
            CHECK(r.rhs[t] == cb.gamma_pow(t, cb.zeta_inv[r.j]));
        }
    }
}

TEST_CASE("generator agrees with its branch on I_j")
{
    const auto& fam = family();
    const auto& m = fam.map;
    for (int j = 0; j < 8; ++j)
        for (int i = 0; i < 1000; ++i) {
            Scalar x = frac(m.z(j) + m.length(j) * Scalar::from_ratio(2 * i + 1, 2000));
            CHECK(dist(fam.eval(j, x), m.eval_branch(j, x)) < 1e-60);
        }
}

TEST_CASE("paired generators are mutually inverse")
{
    const auto& fam = family();
    const auto& cb = fam.map.comb();
    double worst = 0;
    for (int j = 0; j < 8; ++j)
        for (int i = 0; i < 500; ++i) {
            Scalar x = Scalar::from_ratio(2 * i + 1, 1000);
            worst = std::max(worst, dist(fam.eval(cb.bar(j), fam.eval(j, x)), x));
        }
    CHECK(worst < 1e-60);
}

TEST_CASE("neutral points of paired generators are exchanged")
{
    const auto& fam = family();
    const auto& cb = fam.map.comb();
    for (int j = 0; j < 8; ++j) {
        const auto& g = fam.gens[j];
        const auto& h = fam.gens[cb.bar(j)];
        CHECK(dist(fam.eval(j, g.n_plus), h.n_minus) < 1e-60);
        CHECK(dist(fam.eval(j, g.n_minus), h.n_plus) < 1e-60);
        CHECK(cmp_certified(fam.derivative(j, frac(g.n_minus + fam.arc / 2)), fam.map.lambda(),
                            1e-60) == Cmp::Equal);
    }
}

TEST_CASE("each generator is an increasing circle homeomorphism")
{
    const auto& fam = family();
    for (int j = 0; j < 8; ++j) {
        Scalar total(0);
        const int G = 400;
        Scalar prev = fam.eval(j, Scalar(0));
        for (int i = 1; i <= G; ++i) {
            Scalar y = fam.eval(j, Scalar::from_ratio(i, G));
            Scalar step = circle_diff(y, prev);
            CHECK(step.certainly_positive());
            total += step;
            prev = y;
        }
        CHECK(cmp_certified(total, Scalar(1), 1e-50) == Cmp::Equal);
    }
}

TEST_CASE("two fixed points: expanding in I_j, contracting in I_bar j")
{
    const auto& fam = family();
    const auto& m = fam.map;
    const auto& cb = m.comb();
    for (int j = 0; j < 8; ++j) {
        Scalar p = m.fixed_point(j);
        Scalar q = m.fixed_point(cb.bar(j));
        CHECK(dist(fam.eval(j, p), p) < 1e-60);
        CHECK(dist(fam.eval(j, q), q) < 1e-60);
        CHECK(cmp_certified(fam.derivative(j, p), m.lambda(), 1e-60) == Cmp::Equal);
        CHECK(cmp_certified(fam.derivative(j, q), 1 / m.lambda(), 1e-60) == Cmp::Equal);
    }
}

TEST_CASE("cutting point relations hold on a grid")
{
    const auto& fam = family();
    for (int j = 0; j < 8; ++j) CHECK(verify_cp_relation(fam, j, 2000).upper_d() < 1e-12);
}

TEST_CASE("relation is exact on A_0")
{
    const auto& fam = family();
    const auto& m = fam.map;
    for (int j = 0; j < 8; ++j) {
        const auto& rel = fam.relations[j];
        for (int i = -5; i <= 5; ++i) {
            Scalar x = frac(m.z(j) + fam.ext.W.left(j, 2) * Scalar::from_ratio(i, 6));
            CHECK(dist(fam.eval_word(rel.lhs, x), fam.eval_word(rel.rhs, x)) < 1e-60);
        }
    }
}

TEST_CASE("smoothing one kink independently breaks the relations")
{
    GeneratorOptions opt;
    opt.fault_j = 3;
    GeneratorFamily bad = build_generators(canonical_map().map, opt);
    double worst = 0;
    for (int j = 0; j < 8; ++j) worst = std::max(worst, verify_cp_relation(bad, j, 2000).upper_d());
    CHECK(worst > 1e-6);
    CHECK_THROWS_AS(verify_partition_profile(bad, 0), ProfileViolation);
}

TEST_CASE("partition profile has slopes lambda^(k-2m) in cyclic order")
{
    const auto& fam = family();
    for (int j = 0; j < 8; ++j) {
        ProfileReport rep = verify_partition_profile(fam, j);
        REQUIRE(rep.pieces.size() == 8);
        std::vector<int> ex;
        for (const auto& p : rep.pieces) ex.push_back(p.exponent);
        CHECK(ex == std::vector<int>{4, 2, 0, -2, -4, -2, 0, 2});
        CHECK(rep.kinks.size() == 8);
        CHECK(rep.contains_W);
        CHECK(rep.max_mismatch < 1e-60);
    }
}

}
