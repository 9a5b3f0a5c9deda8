#include "bsl/group_action.hpp"

#include "bsl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

namespace bsl {

bool is_reduced(const Combinatorics& cb, const std::vector<int>& letters)
{
    for (size_t i = 1; i < letters.size(); ++i)
        if (letters[i] == cb.bar(letters[i - 1])) return false;
    return true;
}

std::vector<int> free_reduce(const Combinatorics& cb, std::vector<int> letters)
{
    std::vector<int> out;
    for (int a : letters) {
        if (!out.empty() && out.back() == cb.bar(a)) out.pop_back();
        else out.push_back(a);
    }
    return out;
}

std::vector<int> inverse_word(const Combinatorics& cb, const std::vector<int>& letters)
{
    std::vector<int> out(letters.rbegin(), letters.rend());
    for (int& a : out) a = cb.bar(a);
    return out;
}

const char* to_string(ActionCase c)
{
    switch (c) {
    case ActionCase::Case1: return "Case1";
    case ActionCase::Case2: return "Case2";
    case ActionCase::Case3i: return "Case3i";
    case ActionCase::Case3ii: return "Case3ii";
    case ActionCase::Case4: return "Case4";
    }
    return "?";
}

namespace {

bool le(const Scalar& a, const Scalar& b, double eps)
{
    Cmp c = cmp_certified(a, b, eps);
    if (c == Cmp::Ambiguous) throw AmbiguousGeometry("undecided comparison " + a.to_string(20) + " vs " + b.to_string(20));
    return c != Cmp::Greater;
}

bool lt_strict(const Scalar& a, const Scalar& b, double eps)
{
    Cmp c = cmp_certified(a, b, eps);
    if (c == Cmp::Ambiguous) throw AmbiguousGeometry("undecided comparison " + a.to_string(20) + " vs " + b.to_string(20));
    return c == Cmp::Less;
}

// x - base mod 1, with values within eps below base mapped to small negatives.
Scalar offset(const Scalar& x, const Scalar& base, double eps)
{
    Scalar d = circle_diff(x, base);
    if (cmp_certified(d, Scalar(1), eps) == Cmp::Equal) d -= 1;
    return d;
}

// Double-precision filter: decisions farther than this from their threshold
// are taken in doubles; closer ones are certified with MPFR.
constexpr double margin = 1e-12;

double wrap(double d) { return d - std::floor(d); }

constexpr std::size_t kArcCacheLimit = std::size_t(1) << 18;

// Certified comparison of sum(sign_i * x_i) + k against 0 within eps, using
// directed rounding on reusable scratch variables.
struct Term {
    int sign;
    const Scalar* x;
};

Cmp sum_cmp(std::initializer_list<Term> terms, long k, double eps)
{
    struct Scratch {
        mpfr_t lo, hi;
        mpfr_prec_t prec = 0;
        ~Scratch()
        {
            if (prec) {
                mpfr_clear(lo);
                mpfr_clear(hi);
            }
        }
    };
    thread_local Scratch s;
    mpfr_prec_t p = 0;
    for (const auto& t : terms) p = std::max(p, t.x->precision());
    if (s.prec != p) {
        if (s.prec) {
            mpfr_set_prec(s.lo, p);
            mpfr_set_prec(s.hi, p);
        } else {
            mpfr_init2(s.lo, p);
            mpfr_init2(s.hi, p);
        }
        s.prec = p;
    }
    mpfr_set_si(s.lo, k, MPFR_RNDD);
    mpfr_set_si(s.hi, k, MPFR_RNDU);
    for (const auto& t : terms) {
        if (t.sign > 0) {
            mpfr_add(s.lo, s.lo, t.x->lo(), MPFR_RNDD);
            mpfr_add(s.hi, s.hi, t.x->hi(), MPFR_RNDU);
        } else {
            mpfr_sub(s.lo, s.lo, t.x->hi(), MPFR_RNDD);
            mpfr_sub(s.hi, s.hi, t.x->lo(), MPFR_RNDU);
        }
    }
    if (mpfr_cmp_d(s.hi, -eps) < 0) return Cmp::Less;
    if (mpfr_cmp_d(s.lo, eps) > 0) return Cmp::Greater;
    if (mpfr_cmp_d(s.lo, -eps) >= 0 && mpfr_cmp_d(s.hi, eps) <= 0) return Cmp::Equal;
    throw AmbiguousGeometry("undecided comparison near a boundary");
}

// Representative of b - a mod 1 in [-margin, 1 - margin) and the integer shift used.
std::pair<double, long> shifted(const Arc& b, const Arc& a)
{
    double raw = b.lo_d - a.lo_d;
    double d = wrap(raw);
    if (d >= 1 - margin) d -= 1;
    return {d, std::lround(d - raw)};
}

bool small(const Arc& a) { return a.len_d < 1e3 * margin; }

bool contains_slow(const Arc& outer, const Arc& inner, double eps)
{
    Scalar d = offset(inner.lo, outer.lo, eps);
    return le(Scalar(0), d, eps) && le(d + inner.len, outer.len, eps);
}

bool contains(const Arc& outer, const Arc& inner, double eps)
{
    if (small(outer) || small(inner)) return contains_slow(outer, inner, eps);
    auto [d, k] = shifted(inner, outer);
    if (d < -margin) return false;
    if (d < margin && sum_cmp({{+1, &inner.lo}, {-1, &outer.lo}}, k, eps) == Cmp::Less) return false;
    double e = d + inner.len_d - outer.len_d;
    if (e < -margin) return true;
    if (e > margin) return false;
    return sum_cmp({{+1, &inner.lo}, {-1, &outer.lo}, {+1, &inner.len}, {-1, &outer.len}}, k, eps) != Cmp::Greater;
}

// b starts within a (closed when `closed`, else beyond eps before a's end).
bool starts_in(const Arc& a, const Arc& b, double eps, bool closed)
{
    auto [d, k] = shifted(b, a);
    if (d < margin) return true;   // common start; both arcs are long
    double e = d - a.len_d;
    if (e < -margin) return true;
    if (e > margin) return false;
    Cmp c = sum_cmp({{+1, &b.lo}, {-1, &a.lo}, {-1, &a.len}}, k, eps);
    return closed ? c != Cmp::Greater : c == Cmp::Less;
}

// Closed intersection; touching arcs count.
bool meets(const Arc& a, const Arc& b, double eps)
{
    if (small(a) || small(b))
        return le(circle_diff(b.lo, a.lo), a.len, eps) || le(circle_diff(a.lo, b.lo), b.len, eps);
    return starts_in(a, b, eps, true) || starts_in(b, a, eps, true);
}

// Overlap of positive length beyond eps.
bool overlaps(const Arc& a, const Arc& b, double eps)
{
    if (small(a) || small(b))
        return lt_strict(offset(b.lo, a.lo, eps), a.len, eps) || lt_strict(offset(a.lo, b.lo, eps), b.len, eps);
    return starts_in(a, b, eps, false) || starts_in(b, a, eps, false);
}

Arc make_arc(Scalar lo, Scalar len)
{
    Arc a{std::move(lo), std::move(len), 0, 0};
    a.lo_d = CirclePoint(a.lo).to_double();
    a.len_d = a.len.mid_d();
    return a;
}

} // namespace

GroupAction::GroupAction(const GeneratorFamily& fam, DynGraph& G, double eps)
    : fam_(fam), G_(G), eps_(eps < 0 ? default_epsilon() : eps)
{
}

const Arc& GroupAction::arc(int v)
{
    if (v >= static_cast<int>(arcs_.size())) arcs_.resize(static_cast<size_t>(v) + 1024);
    auto& slot = arcs_[v];
    if (!slot) {
        ++live_arcs_;
        const auto iv = G_.interval(v);
        slot = std::make_unique<Arc>(make_arc(frac(iv.first), iv.second - iv.first));
    }
    return *slot;
}

Arc GroupAction::image(int j, int v)
{
    const Arc& a = arc(v);
    Scalar lo = fam_.eval(j, a.lo);
    Scalar hi = fam_.eval(j, a.lo + a.len);
    Scalar len = circle_diff(hi, lo);
    return make_arc(frac(lo), std::move(len));
}

const ActionResult& GroupAction::act_generator(int j, int v)
{
    auto key = std::make_pair(j, v);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    // interval caches are rebuilt on demand; no arc reference is live here
    if (live_arcs_ > kArcCacheLimit || G_.tree().cached_intervals() > kArcCacheLimit) {
        arcs_.clear();
        live_arcs_ = 0;
        G_.tree().clear_interval_cache();
    }
    return cache_.emplace(key, compute(j, v)).first->second;
}

void GroupAction::inject_fault(int j, int v, int target)
{
    ActionResult r = act_generator(j, v);
    r.target = target;
    cache_[{j, v}] = r;
}

int GroupAction::act_word(const std::vector<int>& letters, int v)
{
    for (int a : letters) v = act(a, v);
    return v;
}

ActionResult GroupAction::compute(int j, int v)
{
    const auto& cb = G_.map().comb();
    ActionResult res;
    if (v == G_.root()) {
        res.target = G_.vertex_of_word({cb.iota[j]});
        res.which = ActionCase::Case4;
        res.fired = {ActionCase::Case4};
        res.fired_targets = {res.target};
        return res;
    }
    const int maxl = G_.max_level();
    if (G_.level(v) + 2 > maxl)
        throw LevelMarginExceeded(G_.id_string(v) + " at level " + std::to_string(G_.level(v)) +
                                  " needs level bound " + std::to_string(G_.level(v) + 2));
    const Arc X = image(j, v);
    auto fire = [&](ActionCase c, int t) {
        res.fired.push_back(c);
        res.fired_targets.push_back(t);
    };

    std::vector<int> level1;
    for (const auto& e : G_.edges(G_.root())) level1.push_back(e.target);

    // (1) meets all level-one intervals but one
    int hits = 0;
    for (int u : level1)
        if (meets(X, arc(u), eps_)) ++hits;
    if (hits == cb.n() - 1) fire(ActionCase::Case1, G_.root());

    // level sweep over vertices whose interval overlaps X
    std::vector<int> containers, contained_min;
    int lmin = -1;
    std::vector<int> S;
    for (int u : level1)
        if (overlaps(X, arc(u), eps_)) S.push_back(u);
    for (int n = 1; !S.empty(); ++n) {
        if (n >= maxl)
            throw LevelMarginExceeded("image of " + G_.id_string(v) + " under generator " +
                                      std::to_string(j + 1) + " not resolved below level " + std::to_string(maxl));
        std::vector<int> here, next;
        std::set<int> seen;
        for (int u : S) {
            const Arc& a = arc(u);
            bool outer = contains(a, X, eps_);
            if (outer) containers.push_back(u);
            // clause (3) asks for proper containment
            if (!outer && contains(X, a, eps_)) {
                here.push_back(u);
                continue;
            }
            for (const auto& e : G_.edges(u))
                if (e.down && seen.insert(e.target).second && overlaps(X, arc(e.target), eps_))
                    next.push_back(e.target);
        }
        if (lmin < 0 && !here.empty()) {
            lmin = n;
            contained_min = here;
        }
        if (lmin >= 0 && n >= lmin + 1) break;
        S = std::move(next);
    }

    // (2) deepest container met on all its sub-intervals except possibly one
    int best = -1;
    for (int w : containers) {
        const Arc& aw = arc(w);
        int total = 0, met = 0;
        for (const auto& e : G_.edges(w)) {
            if (!e.down) continue;
            const Arc& at = arc(e.target);
            if (!contains(aw, at, eps_)) continue;
            ++total;
            if (meets(X, at, eps_)) ++met;
        }
        if (met >= total - 1 && (best < 0 || G_.level(w) > G_.level(best))) best = w;
    }
    if (best >= 0) fire(ActionCase::Case2, best);

    // (3) vertices contained in X at the least such level
    if (contained_min.size() == 1 && G_.kind(contained_min[0]) != VertexKind::TypeIIv)
        fire(ActionCase::Case3i, contained_min[0]);
    for (int w : contained_min)
        if (G_.kind(w) == VertexKind::TypeIIv) fire(ActionCase::Case3ii, w);

    if (res.fired.empty()) {
        std::ostringstream os;
        os << "generator " << j + 1 << " on " << G_.id_string(v) << ": image [" << CirclePoint(X.lo).to_string(25)
           << ", +" << X.len.to_string(25) << "], " << containers.size() << " containers, "
           << contained_min.size() << " contained at level " << lmin;
        throw NoCaseApplies(os.str());
    }
    res.which = res.fired[0];
    res.target = res.fired_targets[0];
    return res;
}

std::vector<int> ball(DynGraph& G, int v, int R)
{
    std::map<int, int> d{{v, 0}};
    std::vector<int> q{v};
    for (size_t h = 0; h < q.size(); ++h) {
        int u = q[h];
        if (d[u] == R) continue;
        for (const auto& e : G.edges(u))
            if (d.emplace(e.target, d[u] + 1).second) q.push_back(e.target);
    }
    std::sort(q.begin(), q.end());
    return q;
}

int bounded_distance(DynGraph& G, int u, int v, int bound)
{
    if (u == v) return 0;
    // bidirectional layered BFS; full layers keep the first meeting minimal
    std::unordered_map<int, int> d[2] = {{{u, 0}}, {{v, 0}}};
    std::vector<int> front[2] = {{u}, {v}};
    int r[2] = {0, 0};
    while (r[0] + r[1] < bound) {
        const int s = front[0].size() <= front[1].size() ? 0 : 1;
        std::vector<int> next;
        int best = -1;
        for (int x : front[s])
            for (const auto& e : G.edges(x)) {
                if (!d[s].emplace(e.target, r[s] + 1).second) continue;
                next.push_back(e.target);
                auto it = d[1 - s].find(e.target);
                if (it != d[1 - s].end() && (best < 0 || r[s] + 1 + it->second < best)) best = r[s] + 1 + it->second;
            }
        if (best >= 0) return best;
        if (next.empty()) return -1;
        front[s] = std::move(next);
        ++r[s];
    }
    return -1;
}

bool ActionReport::ok() const
{
    for (const auto& c : checks)
        if (!c.pass) return false;
    return !checks.empty();
}

const ActionCheck& ActionReport::get(const std::string& name) const
{
    for (const auto& c : checks)
        if (c.name == name) return c;
    throw Error("Internal", "no check named " + name);
}

std::vector<int> descent_word(GroupAction& A, int v)
{
    DynGraph& G = A.graph();
    CompactSet c0 = compact_set(G, G.root());
    std::set<int> core(c0.vertices.begin(), c0.vertices.end());
    std::vector<int> word;
    const int limit = G.level(v) + 1;
    while (!core.count(v)) {
        if (static_cast<int>(word.size()) > limit)
            throw Error("Internal", "descent from " + G.id_string(v) + " does not terminate");
        int j = G.key_word(v).front();
        word.push_back(j);
        v = A.act(j, v);
    }
    return word;
}

namespace {

std::vector<int> label_sequence(DynGraph& G, int v)
{
    std::vector<int> s;
    for (const auto& e : G.edges(v)) s.push_back(e.label);
    return s;
}

bool is_rotation(const std::vector<int>& a, const std::vector<int>& b)
{
    if (a.size() != b.size()) return false;
    if (a.empty()) return true;
    for (size_t r = 0; r < a.size(); ++r) {
        bool ok = true;
        for (size_t i = 0; i < a.size() && ok; ++i) ok = a[i] == b[(i + r) % b.size()];
        if (ok) return true;
    }
    return false;
}

} // namespace

ActionReport verify_action(GroupAction& A, int R, int samples, std::uint64_t seed)
{
    DynGraph& G = A.graph();
    const auto& cb = G.map().comb();
    const int n = cb.n();
    ActionReport rep;
    rep.radius = R;
    rep.samples = samples;
    rep.seed = seed;
    if (R < 1) throw ConfigError("radius must be >= 1");
    std::vector<int> B = ball(G, G.root(), R);
    rep.ball_size = B.size();
    std::mt19937_64 rng(seed);
    auto pick = [&](const std::vector<int>& v) {
        return v[std::uniform_int_distribution<size_t>(0, v.size() - 1)(rng)];
    };
    auto fail = [&](ActionCheck& c, const std::string& w) {
        if (c.pass) c.witness = w;
        c.pass = false;
    };
    auto gen = [](int j) { return "generator " + std::to_string(j + 1); };

    // (i) one clause per (generator, vertex)
    ActionCheck uniq{"uniqueness", true, 0, ""};
    for (int v : B)
        for (int j = 0; j < n; ++j) {
            const ActionResult& r = A.act_generator(j, v);
            ++uniq.checked;
            rep.case_counts[to_string(r.which)]++;
            if (r.fired.size() != 1) {
                std::string f;
                for (size_t i = 0; i < r.fired.size(); ++i)
                    f += std::string(i ? "," : "") + to_string(r.fired[i]) + "->" + G.id_string(r.fired_targets[i]);
                fail(uniq, gen(j) + " on " + G.id_string(v) + ": " + f);
            }
        }
    rep.checks.push_back(uniq);

    // (ii) inverse law
    ActionCheck inv{"inverse", true, 0, ""};
    for (int v : B)
        for (int j = 0; j < n; ++j) {
            ++inv.checked;
            int u = A.act(cb.bar(j), A.act(j, v));
            if (u != v) fail(inv, gen(cb.bar(j)) + " after " + gen(j) + " sends " + G.id_string(v) + " to " + G.id_string(u));
        }
    rep.checks.push_back(inv);

    // (iii) isometry on pairs joined by random walks of length <= 4
    ActionCheck iso{"isometry", true, 0, ""};
    for (int s = 0; s < samples; ++s) {
        int v = pick(B);
        int w = v;
        for (int steps = static_cast<int>(rng() % 5); steps > 0; --steps) {
            const auto& es = G.edges(w);
            w = es[rng() % es.size()].target;
        }
        int d = bounded_distance(G, v, w, 4);
        for (int j = 0; j < n; ++j) {
            ++iso.checked;
            int av = A.act(j, v), aw = A.act(j, w);
            int e = bounded_distance(G, av, aw, d);
            if (e != d)
                fail(iso, gen(j) + ": d(" + G.id_string(v) + "," + G.id_string(w) + ")=" + std::to_string(d) +
                              " but images at distance " + (e < 0 ? std::string(">") + std::to_string(d) : std::to_string(e)));
        }
    }
    rep.checks.push_back(iso);

    // (iv) labels and cyclic order of edges
    ActionCheck ord{"cyclic_order", true, 0, ""};
    for (int v : B)
        for (int j = 0; j < n; ++j) {
            ++ord.checked;
            int u = A.act(j, v);
            if (!is_rotation(label_sequence(G, v), label_sequence(G, u)))
                fail(ord, gen(j) + ": edge order at " + G.id_string(v) + " not preserved");
            for (const auto& e : G.edges(v))
                if (A.act(j, e.target) != G.follow(u, e.label))
                    fail(ord, gen(j) + ": edge " + std::to_string(e.label + 1) + " at " + G.id_string(v) + " misrouted");
        }
    rep.checks.push_back(ord);

    // (v) compact sets map onto compact sets
    ActionCheck cpt{"compact_sets", true, 0, ""};
    for (int s = 0; s < samples; ++s) {
        int v = pick(B);
        int j = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
        ++cpt.checked;
        CompactSet cv = compact_set(G, v);
        CompactSet cu = compact_set(G, A.act(j, v));
        std::set<int> img;
        for (int x : cv.vertices) img.insert(A.act(j, x));
        if (!cv.ok() || !cu.ok() || img != std::set<int>(cu.vertices.begin(), cu.vertices.end()))
            fail(cpt, gen(j) + ": compact set at " + G.id_string(v) + " not mapped onto its image");
    }
    rep.checks.push_back(cpt);

    // (vi) cocompactness by greedy descent
    ActionCheck coc{"cocompact", true, 0, ""};
    for (int v : B) {
        ++coc.checked;
        try {
            std::vector<int> w = descent_word(A, v);
            if (static_cast<int>(w.size()) > G.level(v))
                fail(coc, G.id_string(v) + " needs a word of length " + std::to_string(w.size()));
        } catch (const Error& e) {
            fail(coc, e.what());
        }
    }
    rep.checks.push_back(coc);

    // (vii) no short nontrivial reduced word fixes a vertex
    ActionCheck fre{"free", true, 0, ""};
    const int wmax = 6;
    std::vector<int> low = ball(G, G.root(), std::max(0, std::min(R, G.max_level() - wmax - 2)));
    for (int s = 0; s < samples; ++s) {
        int v = pick(low);
        int len = 1 + static_cast<int>(rng() % wmax);
        std::vector<int> w;
        while (static_cast<int>(w.size()) < len) {
            int a = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
            if (!w.empty() && a == cb.bar(w.back())) continue;
            w.push_back(a);
        }
        ++fre.checked;
        if (A.act_word(w, v) == v) {
            std::string ws;
            for (int a : w) ws += std::to_string(a + 1) + " ";
            fail(fre, "word " + ws + "fixes " + G.id_string(v));
        }
    }
    rep.checks.push_back(fre);
    return rep;
}

} // namespace bsl
