#include "doctest.h"

#include "bsl/errors.hpp"
#include "bsl/surface_checks.hpp"

#include <cmath>
#include <random>

using namespace bsl;

namespace {

struct Setup {
    CircleMap map;
    GeneratorFamily fam;
};

const Setup& canonical()
{
    static const Setup s = [] {
        CircleMap m = solve_even_model(canonical_rotation_combinatorics(4)).map;
        GeneratorFamily f = build_generators(m);
        return Setup{m, f};
    }();
    return s;
}

std::vector<int> descend(CylinderTree& T, std::vector<int> word, int extra, std::mt19937_64& rng)
{
    int c = T.find(word);
    for (int l = 0; l < extra && c >= 0; ++l) {
        T.expand(c);
        c = T.child(c, static_cast<int>(rng() % static_cast<std::uint64_t>(T.node(c).n_children)));
    }
    return T.word(c);
}

// Independent secant oracle in doubles, away from the ends of J.
double secant_d(const GeneratorFamily& fam, const std::vector<int>& w, double lo, double hi)
{
    const double a = lo + 0.3 * (hi - lo), b = lo + 0.7 * (hi - lo);
    double ya = fam.eval_word(w, Scalar::from_double(a)).mid_d();
    double yb = fam.eval_word(w, Scalar::from_double(b)).mid_d();
    double dy = yb - ya;
    dy -= std::floor(dy);
    return dy / (b - a);
}

} // namespace

TEST_SUITE("surface_checks") {

TEST_CASE("single letters are affine with slope lambda on their interval")
{
    DynGraph G(canonical().map, 16);
    const CircleMap& m = canonical().map;
    for (int j = 0; j < m.n(); ++j) {
        Dilatation d = element_dilatation(canonical().fam, G, {j});
        CHECK(d.encloses);
        CHECK(d.expression_count == 1);
        CHECK_FALSE(d.merged);
        CHECK(std::abs(d.lo.mid_d() - m.z(j).mid_d()) < 1e-30);
        CHECK(std::abs((d.hi - d.lo).mid_d() - m.length(j).mid_d()) < 1e-30);
        CHECK(std::abs(d.slope.mid_d() - m.lambda().mid_d()) < 1e-12);
    }
}

TEST_CASE("cutting point words are affine on the merged interval with two expressions")
{
    DynGraph G(canonical().map, 16);
    const auto& cb = canonical().map.comb();
    for (const auto& r : canonical().fam.relations) {
        Dilatation d = element_dilatation(canonical().fam, G, r.lhs);
        CHECK(d.encloses);
        CHECK(d.merged);
        CHECK(d.expression_count == 2);
        CHECK(d.expressions == std::vector<std::vector<int>>{std::min(r.lhs, r.rhs), std::max(r.lhs, r.rhs)});
        int v = G.vertex_of_word(r.lhs);
        CHECK(G.kind(v) == VertexKind::TypeIIv);
        auto [lo, hi] = G.interval(v);
        CHECK(std::abs((d.lo - lo).mid_d()) < 1e-30);
        CHECK(std::abs((d.hi - hi).mid_d()) < 1e-30);
        const int n = static_cast<int>(r.lhs.size());
        CHECK(n == cb.k(r.j));
        double lam_n = std::pow(canonical().map.lambda().mid_d(), n);
        CHECK(std::abs(secant_d(canonical().fam, r.lhs, d.lo.mid_d(), d.hi.mid_d()) / lam_n - 1) < 1e-6);
        Dilatation e = element_dilatation(canonical().fam, G, r.rhs);
        CHECK(e.merged);
        CHECK(std::abs((e.lo - d.lo).mid_d()) < 1e-30);
    }
}

TEST_CASE("an inner cutting point factor gives two expressions on a single cylinder")
{
    DynGraph G(canonical().map, 16);
    std::mt19937_64 rng(8);
    for (const auto& r : canonical().fam.relations) {
        std::vector<int> w = descend(G.tree(), r.lhs, 2, rng);
        Dilatation d = element_dilatation(canonical().fam, G, w);
        CHECK(d.expression_count == 2);
        CHECK_FALSE(d.merged);
        CHECK(d.encloses);
    }
}

TEST_CASE("random admissible words have slope lambda to the length on J")
{
    DynGraph G(canonical().map, 16);
    std::mt19937_64 rng(21);
    const double lam = canonical().map.lambda().mid_d();
    for (int s = 0; s < 100; ++s) {
        int len = 1 + static_cast<int>(rng() % 6);
        std::vector<int> w = descend(G.tree(), {}, len, rng);
        Dilatation d = element_dilatation(canonical().fam, G, w);
        CHECK(d.encloses);
        CHECK(d.expression_count >= 1);
        double rel = secant_d(canonical().fam, w, d.lo.mid_d(), d.hi.mid_d()) / std::pow(lam, len);
        CHECK(std::abs(rel - 1) < 1e-6);
    }
}

TEST_CASE("no point of the circle beats the affine slope")
{
    DynGraph G(canonical().map, 16);
    std::mt19937_64 rng(6);
    const double lam = canonical().map.lambda().mid_d();
    for (int s = 0; s < 12; ++s) {
        int len = 1 + static_cast<int>(rng() % 4);
        std::vector<int> w = descend(G.tree(), {}, len, rng);
        CHECK(max_word_derivative(canonical().fam, w, 4000) <= std::pow(lam, len) * (1 + 1e-12));
    }
}

TEST_CASE("non-admissible words are refused")
{
    DynGraph G(canonical().map, 16);
    const auto& cb = canonical().map.comb();
    CHECK_THROWS_AS(element_dilatation(canonical().fam, G, {}), NotAdmissible);
    CHECK_THROWS_AS(element_dilatation(canonical().fam, G, {0, cb.bar(0)}), NotAdmissible);
    CHECK_THROWS_AS(element_dilatation(canonical().fam, G, {0, 99}), NotAdmissible);
}

TEST_CASE("sphere growth against log lambda")
{
    EntropyReport folded = entropy_compare(canonical().map, 12, true);
    CHECK(folded.relative_gap < 0.05);
    CHECK(folded.growth.sizes.size() == 13);
    EntropyReport tree = entropy_compare(canonical().map, 12, false);
    CHECK(folded.growth_log <= tree.growth_log);
    // the full shift on 2N - 1 letters has log(2N - 1) growth
    std::vector<std::uint64_t> full{1, 8};
    for (int k = 2; k <= 8; ++k) full.push_back(full.back() * 7);
    EntropyReport shift = entropy_compare(full, canonical().map.lambda());
    CHECK(shift.growth_log == doctest::Approx(std::log(7.0)).epsilon(1e-12));
}

TEST_CASE("the 2-complex has disc links and two faces per edge")
{
    DynGraph G(canonical().map, 16);
    TwoComplex K = build_2complex(G, 2);
    CHECK(K.open_loops == 0);
    CHECK(K.faces_at_root() == 8);
    CHECK(K.links_checked == 9);
    CHECK(K.links_bad == 0);
    CHECK(K.edges_checked == 72);
    CHECK(K.edges_bad == 0);
    CHECK(K.witness.empty());
    for (const auto& f : K.faces) CHECK(static_cast<int>(f.cycle.size()) == 2 * G.map().comb().k(f.j));
}

TEST_CASE("quotient is a genus two surface, stable in the radius")
{
    DynGraph G(canonical().map, 16);
    GroupAction A(canonical().fam, G);
    for (int R : {1, 3}) {
        TwoComplex K = build_2complex(G, R);
        EulerReport e = quotient_euler(K, A);
        CHECK(e.V == 1);
        CHECK(e.E == 4);
        CHECK(e.F == 1);
        CHECK(e.chi == -2);
        CHECK(e.genus == 2);
        CHECK(e.unmatched_faces == 0);
        CHECK(e.warning.empty());
    }
}

TEST_CASE("moves that never leave their element leave classes detached from the root")
{
    DynGraph G(canonical().map, 16);
    GroupAction A(canonical().fam, G);
    TwoComplex K = build_2complex(G, 1);
    for (int v : K.vertices)
        for (int j = 0; j < A.n(); ++j) A.inject_fault(j, v, v);
    CHECK_THROWS_AS(quotient_euler(K, A), OrbitClosureIncomplete);
}

}
