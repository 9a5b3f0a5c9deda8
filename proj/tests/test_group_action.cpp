#include "doctest.h"

#include "bsl/errors.hpp"
#include "bsl/group_action.hpp"

#include <algorithm>
#include <random>
#include <set>

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

std::set<std::vector<int>> words_of(DynGraph& G, const std::vector<int>& vs)
{
    std::set<std::vector<int>> out;
    for (int v : vs) out.insert(G.key_word(v));
    return out;
}

// Random admissible cylinder word of the given length, drawn by tree descent.
std::vector<int> random_word(DynGraph& G, int len, std::mt19937_64& rng)
{
    CylinderTree& T = G.tree();
    int c = T.root();
    for (int l = 0; l < len; ++l) {
        T.expand(c);
        c = T.child(c, static_cast<int>(rng() % static_cast<std::uint64_t>(T.node(c).n_children)));
    }
    return T.word(c);
}

} // namespace

TEST_SUITE("group_action") {

TEST_CASE("word helpers")
{
    const auto& cb = canonical().map.comb();
    for (int j = 0; j < cb.n(); ++j) {
        CHECK_FALSE(is_reduced(cb, {j, cb.bar(j)}));
        CHECK(free_reduce(cb, {j, cb.bar(j)}).empty());
        CHECK(is_reduced(cb, {j, j}));
    }
    std::vector<int> w{0, 2, 5, 5, 1};
    std::vector<int> wi = inverse_word(cb, w);
    REQUIRE(wi.size() == w.size());
    std::vector<int> ww = w;
    ww.insert(ww.end(), wi.begin(), wi.end());
    CHECK(free_reduce(cb, ww).empty());
    std::vector<int> nested{1, 3, cb.bar(3), cb.bar(1), 4};
    CHECK(free_reduce(cb, nested) == std::vector<int>{4});
}

TEST_CASE("root, first-level and second-level cases")
{
    DynGraph G(canonical().map, 12);
    GroupAction A(canonical().fam, G);
    const auto& cb = G.map().comb();
    for (int j = 0; j < cb.n(); ++j) {
        const ActionResult& r0 = A.act_generator(j, G.root());
        CHECK(r0.which == ActionCase::Case4);
        CHECK(r0.target == G.vertex_of_word({cb.bar(j)}));

        const ActionResult& r1 = A.act_generator(j, G.vertex_of_word({j}));
        CHECK(r1.which == ActionCase::Case1);
        CHECK(r1.target == G.root());
        CHECK(r1.fired.size() == 1);

        for (int m = 0; m < cb.n(); ++m) {
            if (m == j) continue;
            const ActionResult& r = A.act_generator(j, G.vertex_of_word({m}));
            CHECK(r.fired.size() == 1);
            if (m == cb.zeta[j] || m == cb.zeta_inv[j]) {
                CHECK(r.which == ActionCase::Case3i);
            } else {
                CHECK(r.which == ActionCase::Case2);
                CHECK(r.target == G.vertex_of_word({cb.bar(j), m}));
            }
        }
    }
}

TEST_CASE("prepending the inverse letter agrees with the action away from the branch")
{
    DynGraph G(canonical().map, 14);
    GroupAction A(canonical().fam, G);
    const auto& cb = G.map().comb();
    std::mt19937_64 rng(11);
    int tested = 0;
    for (int s = 0; s < 400; ++s) {
        int len = 1 + static_cast<int>(rng() % 6);
        std::vector<int> w = random_word(G, len, rng);
        int j = static_cast<int>(rng() % static_cast<std::uint64_t>(cb.n()));
        if (w[0] == j || w[0] == cb.zeta[j] || w[0] == cb.zeta_inv[j]) continue;
        std::vector<int> pw{cb.bar(j)};
        pw.insert(pw.end(), w.begin(), w.end());
        int expect = G.vertex_of_word(pw);
        if (expect < 0) continue;
        ++tested;
        CHECK_MESSAGE(A.act(j, G.vertex_of_word(w)) == expect, G.id_string(G.vertex_of_word(w)));
    }
    CHECK(tested > 200);
}

TEST_CASE("inverse letters cancel and words compose left to right")
{
    DynGraph G(canonical().map, 14);
    GroupAction A(canonical().fam, G);
    const auto& cb = G.map().comb();
    std::mt19937_64 rng(3);
    for (int s = 0; s < 100; ++s) {
        int v = G.vertex_of_word(random_word(G, 1 + static_cast<int>(rng() % 4), rng));
        int j = static_cast<int>(rng() % static_cast<std::uint64_t>(cb.n()));
        CHECK(A.act_word({j, cb.bar(j)}, v) == v);
        int k = static_cast<int>(rng() % static_cast<std::uint64_t>(cb.n()));
        CHECK(A.act_word({j, k}, v) == A.act(k, A.act(j, v)));
    }
}

TEST_CASE("words of length n move the root at most n levels")
{
    DynGraph G(canonical().map, 14);
    GroupAction A(canonical().fam, G);
    const auto& cb = G.map().comb();
    std::mt19937_64 rng(5);
    for (int s = 0; s < 60; ++s) {
        int n = 1 + static_cast<int>(rng() % 6);
        std::vector<int> w;
        while (static_cast<int>(w.size()) < n) {
            int j = static_cast<int>(rng() % static_cast<std::uint64_t>(cb.n()));
            if (!w.empty() && j == cb.bar(w.back())) continue;
            w.push_back(j);
        }
        CHECK(G.level(A.act_word(w, G.root())) <= n);
    }
}

TEST_CASE("cutting point relations hold at the root and nearby")
{
    DynGraph G(canonical().map, 14);
    GroupAction A(canonical().fam, G);
    const auto& rels = canonical().fam.relations;
    REQUIRE(!rels.empty());
    std::vector<int> B = ball(G, G.root(), 2);
    for (const auto& r : rels)
        for (int v : B) CHECK(A.act_word(r.lhs, v) == A.act_word(r.rhs, v));
}

TEST_CASE("the unit ball at the root maps onto the unit ball at its image")
{
    DynGraph G(canonical().map, 12);
    GroupAction A(canonical().fam, G);
    const auto& cb = G.map().comb();
    std::vector<int> B = ball(G, G.root(), 1);
    REQUIRE(B.size() == 9);
    for (int j = 0; j < cb.n(); ++j) {
        std::vector<int> img;
        for (int v : B) img.push_back(A.act(j, v));
        std::sort(img.begin(), img.end());
        CHECK(img == ball(G, G.vertex_of_word({cb.bar(j)}), 1));
    }
}

TEST_CASE("verification passes with first-level and root cases fired once per generator")
{
    DynGraph G(canonical().map, 14);
    GroupAction A(canonical().fam, G);
    ActionReport rep = verify_action(A, 3, 100, 1);
    for (const auto& c : rep.checks) CHECK_MESSAGE(c.pass, c.name << ": " << c.witness);
    CHECK(rep.ok());
    CHECK(rep.checks.size() == 7);
    CHECK(rep.ball_size == 457);
    const int n = G.map().n();
    CHECK(rep.case_counts.at("Case1") == static_cast<std::uint64_t>(n));
    CHECK(rep.case_counts.at("Case4") == static_cast<std::uint64_t>(n));
    std::uint64_t total = 0;
    for (const auto& [k, c] : rep.case_counts) total += c;
    CHECK(total == rep.ball_size * static_cast<std::uint64_t>(n));
}

TEST_CASE("a misrouted table entry is caught with a witness")
{
    DynGraph G(canonical().map, 12);
    GroupAction A(canonical().fam, G);
    const auto& cb = G.map().comb();
    int v = G.vertex_of_word({2});
    int far = G.vertex_of_word({cb.bar(0), 4, 4});
    REQUIRE(far >= 0);
    A.inject_fault(0, v, far);
    ActionReport rep = verify_action(A, 1, 200, 1);
    CHECK_FALSE(rep.ok());
    const ActionCheck& iso = rep.get("isometry");
    CHECK_FALSE(iso.pass);
    CHECK(iso.witness.find("generator 1") != std::string::npos);
    CHECK_FALSE(rep.get("cyclic_order").pass);
    CHECK_FALSE(rep.get("inverse").pass);
}

TEST_CASE("descent words follow the itinerary")
{
    DynGraph G(canonical().map, 14);
    GroupAction A(canonical().fam, G);
    std::mt19937_64 rng(9);
    int typeI = 0;
    for (int s = 0; s < 50; ++s) {
        int v = G.vertex_of_word(random_word(G, 5, rng));
        std::vector<int> w = descent_word(A, v);
        CHECK(static_cast<int>(w.size()) <= G.level(v));
        CompactSet c0 = compact_set(G, G.root());
        CHECK(std::binary_search(c0.vertices.begin(), c0.vertices.end(), A.act_word(w, v)));
        if (G.kind(v) != VertexKind::TypeI) continue;
        ++typeI;
        std::vector<int> it = G.key_word(v);
        CHECK(std::equal(w.begin(), w.end(), it.begin()));
    }
    CHECK(typeI > 20);
}

TEST_CASE("the action does not depend on the level bound")
{
    DynGraph G1(canonical().map, 12), G2(canonical().map, 18);
    GroupAction A1(canonical().fam, G1), A2(canonical().fam, G2);
    std::vector<int> B1 = ball(G1, G1.root(), 3), B2 = ball(G2, G2.root(), 3);
    REQUIRE(words_of(G1, B1) == words_of(G2, B2));
    const int n = G1.map().n();
    for (int v : B1) {
        int v2 = G2.vertex_of_word(G1.key_word(v));
        for (int j = 0; j < n; ++j) {
            const ActionResult& r1 = A1.act_generator(j, v);
            const ActionResult& r2 = A2.act_generator(j, v2);
            CHECK(r1.which == r2.which);
            CHECK(G1.key_word(r1.target) == G2.key_word(r2.target));
        }
    }
}

TEST_CASE("images too deep for the level bound are refused")
{
    DynGraph G(canonical().map, 6);
    GroupAction A(canonical().fam, G);
    std::mt19937_64 rng(2);
    int v = G.vertex_of_word(random_word(G, 5, rng));
    CHECK_THROWS_AS(A.act(0, v), LevelMarginExceeded);
}

TEST_CASE("bounded distance matches plain breadth-first search")
{
    DynGraph G(canonical().map, 14);
    std::mt19937_64 rng(4);
    std::vector<int> B = ball(G, G.root(), 2);
    for (int s = 0; s < 40; ++s) {
        int u = B[rng() % B.size()];
        int w = u;
        for (int k = static_cast<int>(rng() % 5); k > 0; --k) {
            const auto& es = G.edges(w);
            w = es[rng() % es.size()].target;
        }
        int plain = -1;
        for (int r = 0; r <= 4 && plain < 0; ++r) {
            std::vector<int> b = ball(G, u, r);
            if (std::binary_search(b.begin(), b.end(), w)) plain = r;
        }
        CHECK(bounded_distance(G, u, w, 4) == plain);
        CHECK(bounded_distance(G, w, u, 4) == plain);
    }
}

}
