#include "bsl/surface_checks.hpp"

#include "bsl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <unordered_map>

namespace bsl {

namespace {

bool meets_enclosure(const Scalar& a, const Scalar& b)
{
    return mpfr_lessequal_p(a.lo(), b.hi()) && mpfr_lessequal_p(b.lo(), a.hi());
}

// Chain-rule derivative of the word at x.
Scalar word_derivative(const GeneratorFamily& fam, const std::vector<int>& word, Scalar x)
{
    Scalar d(1, x.precision());
    for (int w : word) {
        d *= fam.derivative(w, x);
        x = fam.eval(w, x);
    }
    return d;
}

Scalar lerp(const Scalar& lo, const Scalar& hi, double t)
{
    Scalar s = hi - lo;
    s *= Scalar::from_double(t, lo.precision());
    s += lo;
    return s;
}

struct UnionFind {
    std::vector<int> up;
    int add()
    {
        up.push_back(static_cast<int>(up.size()));
        return up.back();
    }
    int find(int x)
    {
        while (up[x] != x) x = up[x] = up[up[x]];
        return x;
    }
    void join(int a, int b) { up[find(a)] = find(b); }
};

template <class Key>
struct Keyed {
    std::map<Key, int> ids;
    UnionFind uf;
    int id(const Key& k)
    {
        auto [it, fresh] = ids.emplace(k, 0);
        if (fresh) it->second = uf.add();
        return it->second;
    }
};

EdgeKey edge_key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

} // namespace

// ---------------------------------------------------------------- dilatation

std::vector<std::vector<int>> cp_expressions(const GeneratorFamily& fam, const std::vector<int>& word)
{
    const auto& cb = fam.map.comb();
    std::set<std::vector<int>> seen{word};
    std::deque<std::vector<int>> todo{word};
    auto rewrite = [&](const std::vector<int>& w, const std::vector<int>& from, const std::vector<int>& to) {
        if (from.size() != to.size() || from.size() > w.size()) return;
        for (size_t p = 0; p + from.size() <= w.size(); ++p) {
            if (!std::equal(from.begin(), from.end(), w.begin() + static_cast<long>(p))) continue;
            std::vector<int> u = w;
            std::copy(to.begin(), to.end(), u.begin() + static_cast<long>(p));
            if (is_reduced(cb, u) && seen.insert(u).second) todo.push_back(u);
        }
    };
    while (!todo.empty()) {
        std::vector<int> w = todo.front();
        todo.pop_front();
        for (const auto& r : fam.relations) {
            rewrite(w, r.lhs, r.rhs);
            rewrite(w, r.rhs, r.lhs);
        }
    }
    return {seen.begin(), seen.end()};
}

Dilatation element_dilatation(const GeneratorFamily& fam, DynGraph& G, const std::vector<int>& word)
{
    const auto& cb = fam.map.comb();
    if (word.empty()) throw NotAdmissible("empty word");
    for (int a : word)
        if (a < 0 || a >= cb.n()) throw NotAdmissible("letter out of range");
    if (!is_reduced(cb, word)) throw NotAdmissible("word contains a letter followed by its inverse");
    CylinderTree& T = G.tree();
    const int c = T.find(word);
    if (c < 0) throw NotAdmissible("word is not an admissible itinerary");

    Dilatation out;
    out.word = word;
    out.expressions = cp_expressions(fam, word);
    out.expression_count = static_cast<int>(out.expressions.size());

    // J: I_w, or the expression cylinders side by side in a vertex of type IIv
    const int v = G.vertex_of(c);
    const auto& mem = G.members(v);
    std::vector<int> pos;
    for (const auto& e : out.expressions) {
        int ce = T.find(e);
        auto it = std::find(mem.begin(), mem.end(), ce);
        if (ce >= 0 && it != mem.end()) pos.push_back(static_cast<int>(it - mem.begin()));
    }
    std::sort(pos.begin(), pos.end());
    std::vector<int> span{c};
    const bool side_by_side = pos.size() >= 2 && pos.back() - pos.front() + 1 == static_cast<int>(pos.size());
    if (G.kind(v) == VertexKind::TypeIIv && side_by_side) {
        span.assign(mem.begin() + pos.front(), mem.begin() + pos.back() + 1);
        out.merged = true;
    }
    out.lo = T.interval(span.front()).first;
    out.hi = out.lo;
    for (int m : span) {
        const auto& [a, b] = T.interval(m);
        out.hi += b;
        out.hi -= a;
    }

    const int n = static_cast<int>(word.size());
    out.slope = pow(fam.map.lambda(), n);
    bool ok = true;
    for (int m : span) {
        const auto& [a, b] = T.interval(m);
        for (double t : {0.25, 0.5, 0.75}) {
            Scalar d = word_derivative(fam, word, lerp(a, b, t));
            ok = ok && meets_enclosure(d, out.slope);
            out.point_derivatives.push_back(std::move(d));
        }
    }
    Scalar x0 = lerp(out.lo, out.hi, 0.05), x1 = lerp(out.lo, out.hi, 0.95);
    out.secant = circle_diff(fam.eval_word(word, x1), fam.eval_word(word, x0)) / (x1 - x0);
    out.encloses = ok && meets_enclosure(out.secant, out.slope);
    return out;
}

double max_word_derivative(const GeneratorFamily& fam, const std::vector<int>& word, int grid)
{
    double best = 0;
    const mpfr_prec_t prec = fam.map.lambda().precision();
    for (int i = 0; i < grid; ++i) {
        Scalar x = Scalar::from_double((i + 0.5) / grid, prec);
        best = std::max(best, word_derivative(fam, word, x).upper_d());
    }
    return best;
}

// ---------------------------------------------------------------- entropy

EntropyReport entropy_compare(const std::vector<std::uint64_t>& sphere_sizes, const Scalar& lambda)
{
    EntropyReport r;
    r.growth = sphere_growth(sphere_sizes);
    r.growth_log = std::log(r.growth.estimate);
    r.log_lambda = std::log(lambda.mid_d());
    r.relative_gap = std::abs(r.growth_log - r.log_lambda) / r.log_lambda;
    return r;
}

EntropyReport entropy_compare(const CircleMap& map, int levels, bool folded)
{
    ConeAutomaton A(map);
    LevelCounts lc = count_levels(A, levels);
    return entropy_compare(folded ? lc.dyn : lc.gamma0, map.lambda());
}

// ---------------------------------------------------------------- 2-complex

FaceKey face_key(const std::vector<int>& cycle)
{
    FaceKey k;
    for (size_t i = 0; i < cycle.size(); ++i) k.push_back(edge_key(cycle[i], cycle[(i + 1) % cycle.size()]));
    std::sort(k.begin(), k.end());
    return k;
}

int TwoComplex::faces_at_root() const
{
    int c = 0;
    for (const auto& f : faces)
        if (std::find(f.cycle.begin(), f.cycle.end(), 0) != f.cycle.end()) ++c;
    return c;
}

TwoComplex build_2complex(DynGraph& G, int R)
{
    if (R < 1) throw ConfigError("radius must be >= 1");
    TwoComplex K;
    K.radius = R;
    K.vertices = ball(G, G.root(), R);
    std::set<EdgeKey> es;
    for (int v : K.vertices)
        for (const auto& e : G.edges(v)) es.insert(edge_key(v, e.target));
    K.edges.assign(es.begin(), es.end());

    auto note = [&](const std::string& w) {
        if (K.witness.empty()) K.witness = w;
    };
    for (int v : K.vertices) {
        CompactSet cs = compact_set(G, v);
        for (auto& loop : cs.loops) {
            if (!loop.closes) {
                ++K.open_loops;
                note("loop " + std::to_string(loop.j + 1) + " at " + G.id_string(v) + " does not close");
                continue;
            }
            FaceKey key = face_key(loop.path);
            if (K.face_index.count(key)) {
                ++K.duplicate_loops;
                continue;
            }
            K.face_index.emplace(std::move(key), static_cast<int>(K.faces.size()));
            K.faces.push_back(Face{v, loop.j, std::move(loop.path)});
        }
    }

    // faces through each vertex and through each edge
    std::unordered_map<int, std::vector<int>> at;
    std::map<EdgeKey, int> on_edge;
    for (size_t f = 0; f < K.faces.size(); ++f) {
        const auto& cyc = K.faces[f].cycle;
        for (size_t i = 0; i < cyc.size(); ++i) {
            at[cyc[i]].push_back(static_cast<int>(f));
            on_edge[edge_key(cyc[i], cyc[(i + 1) % cyc.size()])]++;
        }
    }
    for (int v : ball(G, G.root(), R - 1)) {
        ++K.links_checked;
        // link of v: neighbours joined through the corner of each face at v
        std::map<int, std::vector<int>> link;
        bool bad = false;
        for (int f : at[v]) {
            const auto& cyc = K.faces[f].cycle;
            const int m = static_cast<int>(cyc.size());
            int hits = 0;
            for (int i = 0; i < m; ++i) {
                if (cyc[i] != v) continue;
                ++hits;
                int a = cyc[(i + m - 1) % m], b = cyc[(i + 1) % m];
                link[a].push_back(b);
                link[b].push_back(a);
            }
            if (hits != 1) bad = true;
        }
        std::set<int> nbrs;
        for (const auto& e : G.edges(v)) nbrs.insert(e.target);
        bad = bad || static_cast<int>(at[v].size()) != G.valency(v) || link.size() != nbrs.size();
        for (const auto& [u, adj] : link) bad = bad || adj.size() != 2 || !nbrs.count(u);
        if (!bad && !link.empty()) {
            // one cycle through all neighbours
            int start = link.begin()->first, prev = -1, cur = start, steps = 0;
            do {
                int nxt = link[cur][0] == prev ? link[cur][1] : link[cur][0];
                prev = cur;
                cur = nxt;
                ++steps;
            } while (cur != start && steps <= static_cast<int>(link.size()));
            bad = steps != static_cast<int>(link.size());
        }
        if (bad) {
            ++K.links_bad;
            note("link at " + G.id_string(v) + " is not a single cycle");
        }
        for (int u : nbrs) {
            ++K.edges_checked;
            auto it = on_edge.find(edge_key(v, u));
            int c = it == on_edge.end() ? 0 : it->second;
            if (c != 2) {
                ++K.edges_bad;
                note("edge " + G.id_string(v) + "-" + G.id_string(u) + " lies on " + std::to_string(c) + " faces");
            }
        }
    }
    return K;
}

EulerReport quotient_euler(const TwoComplex& K, GroupAction& A)
{
    DynGraph& G = A.graph();
    const int n = A.n();
    const int root = G.root();
    EulerReport rep;
    rep.radius = K.radius;
    const std::set<int> inside(K.vertices.begin(), K.vertices.end());

    Keyed<int> V;
    Keyed<EdgeKey> E;
    Keyed<FaceKey> F;
    for (int v : K.vertices)
        for (int j = 0; j < n; ++j) {
            V.uf.join(V.id(v), V.id(A.act(j, v)));
            ++rep.moves;
        }
    for (const auto& [a, b] : K.edges)
        for (int j = 0; j < n; ++j) {
            E.uf.join(E.id({a, b}), E.id(edge_key(A.act(j, a), A.act(j, b))));
            ++rep.moves;
        }
    std::vector<FaceKey> keys;
    for (const auto& f : K.faces) keys.push_back(face_key(f.cycle));
    for (size_t i = 0; i < K.faces.size(); ++i)
        for (int j = 0; j < n; ++j) {
            std::vector<int> img;
            bool all_inside = true;
            for (int x : K.faces[i].cycle) {
                img.push_back(A.act(j, x));
                all_inside = all_inside && inside.count(img.back());
            }
            FaceKey ik = face_key(img);
            if (all_inside && !K.face_index.count(ik)) ++rep.unmatched_faces;
            F.uf.join(F.id(keys[i]), F.id(ik));
            ++rep.moves;
        }

    // classes of complex elements; anchors are the elements at v0
    std::uint64_t unresolved = 0;
    auto count = [&](auto& keyed, const auto& elems, auto is_anchor) {
        std::set<int> anchored, all;
        for (const auto& x : elems) {
            int c = keyed.uf.find(keyed.id(x));
            all.insert(c);
            if (is_anchor(x)) anchored.insert(c);
        }
        for (int c : all)
            if (!anchored.count(c)) ++unresolved;
        return static_cast<std::uint64_t>(anchored.size());
    };
    rep.V = count(V, K.vertices, [&](int v) { return v == root; });
    rep.E = count(E, K.edges, [&](const EdgeKey& e) { return e.first == root || e.second == root; });
    rep.F = count(F, keys, [&](const FaceKey& k) {
        return std::any_of(k.begin(), k.end(), [&](const EdgeKey& e) { return e.first == root || e.second == root; });
    });
    if (unresolved > 0)
        throw OrbitClosureIncomplete(std::to_string(unresolved) + " classes at radius " + std::to_string(K.radius) +
                                     " do not reach the star of the root");
    rep.chi = static_cast<long>(rep.V) - static_cast<long>(rep.E) + static_cast<long>(rep.F);
    if (rep.chi % 2 == 0 && rep.chi <= 0)
        rep.genus = static_cast<int>((2 - rep.chi) / 2);
    else
        rep.warning = "Euler characteristic " + std::to_string(rep.chi) + " is not that of a closed orientable surface";
    return rep;
}

} // namespace bsl
