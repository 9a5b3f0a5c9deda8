#include "bsl/generators.hpp"

#include "bsl/errors.hpp"

#include <algorithm>
#include <string>

namespace bsl {

namespace {

double eps_or_default(double eps) { return eps < 0 ? default_epsilon() : eps; }

std::string label(int j) { return std::to_string(j + 1); }

bool circle_equal(const Scalar& a, const Scalar& b, double eps)
{
    return circle_distance(CirclePoint(a), CirclePoint(b)).upper_d() <= eps;
}

// Does the arc [a, a + len] meet the interior of every I_i with i not in `skip`?
std::optional<int> arc_misses(const CircleMap& map, const Scalar& a, const Scalar& len,
                              const std::vector<int>& skip)
{
    if (!(len - 1).certainly_negative()) return std::nullopt;
    Scalar b = frac(a + len);
    for (int i = 0; i < map.n(); ++i) {
        if (std::find(skip.begin(), skip.end(), i) != skip.end()) continue;
        Where w1 = in_interval(map.z(i), a, b, 0.0);
        Where w2 = map.classify(a, i);
        if (w1 == Where::Ambiguous || w2 == Where::Ambiguous)
            throw AmbiguousGeometry("arc endpoint not separated from I_" + label(i));
        bool meets = w1 == Where::Inside || w1 == Where::Boundary || w2 == Where::Inside ||
                     w2 == Where::Boundary;
        if (!meets) return i;
    }
    return std::nullopt;
}

} // namespace

std::vector<AffineNeighborhood> compute_affine_neighborhoods(const CircleMap& map, double eps)
{
    eps = eps_or_default(eps);
    const auto& cb = map.comb();
    const Scalar& lam = map.lambda();
    std::vector<AffineNeighborhood> out;
    for (int j = 0; j < map.n(); ++j) {
        const int k = cb.k(j);
        const int cj = cb.c(j), dj = cb.d(j);
        OrbitDatum o = orbit_datum(map, j, eps);
        Scalar u = circle_diff(o.right_orbit[k - 2], map.z(dj));
        Scalar w = circle_diff(map.z(cb.zeta[cj]), o.left_orbit[k - 2]);
        Scalar lk1 = pow(lam, k - 1);
        AffineNeighborhood v;
        v.j = j;
        v.left = (map.length(cj) - w) / lk1;
        v.right = (map.length(dj) - u) / lk1;
        if (!v.left.certainly_positive() || !v.right.certainly_positive())
            throw AmbiguousGeometry("V_" + label(j) + " is not a two-sided neighborhood");
        // one-sided images stay in single intervals before step k-1 and reach a
        // cutting point exactly at step k-1
        Scalar lt = lam;
        for (int t = 1; t <= k - 1; ++t, lt *= lam) {
            int il = cb.gamma_pow(t, cb.zeta_inv[j]);
            int ir = cb.delta_pow(t, j);
            Scalar room_l = circle_diff(o.left_orbit[t - 1], map.z(il)) - lt * v.left;
            Scalar room_r =
                map.length(ir) - circle_diff(o.right_orbit[t - 1], map.z(ir)) - lt * v.right;
            if (t < k - 1) {
                if (!room_l.certainly_positive() || !room_r.certainly_positive())
                    throw ContainmentViolation("V_" + label(j) + " image leaves its interval at step " +
                                               std::to_string(t));
            } else if (abs(room_l).upper_d() > eps || abs(room_r).upper_d() > eps) {
                throw ContainmentViolation("V_" + label(j) + " is not maximal");
            }
        }
        v.image_lo = map.c(cj);
        v.image_hi = map.eval_left_limit(cb.zeta[dj]);
        Scalar len = pow(lam, k) * (v.left + v.right);
        if (auto miss = arc_misses(map, v.image_lo, len, {cb.bar(cj), cb.bar(dj)}))
            throw ContainmentViolation("Phi^k(V_" + label(j) + ") misses I_" + label(*miss));
        out.push_back(std::move(v));
    }
    return out;
}

WTable compute_W(const CircleMap& map, const std::vector<AffineNeighborhood>& V, int p_max,
                 int q_max, double eps)
{
    (void)eps;
    const auto& cb = map.comb();
    const int n = map.n();
    const Scalar& lam = map.lambda();
    if (p_max < 0 || q_max < 0) throw ConfigError("W indices must be non-negative");
    WTable W;
    W.p_max = p_max;
    W.q_max = q_max;
    const int top = std::max(p_max, q_max);
    W.e.assign(top + 1, std::vector<Scalar>(n));
    W.f.assign(top + 1, std::vector<Scalar>(n));
    for (int j = 0; j < n; ++j) {
        W.e[0][j] = V[j].left;
        W.f[0][j] = V[j].right;
    }
    for (int p = 1; p <= top; ++p)
        for (int j = 0; j < n; ++j) {
            Scalar lk1 = pow(lam, cb.k(j) - 1);
            W.e[p][j] = V[j].left + W.e[p - 1][cb.c(j)] / lk1;
            W.f[p][j] = V[j].right + W.f[p - 1][cb.zeta[cb.d(j)]] / lk1;
        }

    auto witness = [](int j, int p, int q, int i) {
        return "(j=" + label(j) + ",p=" + std::to_string(p) + ",q=" + std::to_string(q) +
               ",k=" + label(i) + ")";
    };
    for (int p = 0; p <= p_max; ++p)
        for (int q = 0; q <= q_max; ++q)
            for (int j = 0; j < n; ++j) {
                const int dj = cb.delta[j], gj = cb.gamma[j], zj = cb.zeta[j], ij = cb.bar(j);
                // r_j(W_j) inside I_{delta j} and clear of W_{delta j}
                Scalar a = circle_diff(map.c(j), map.z(dj));
                Scalar lo1 = a - lam * W.e[p][j] - W.f[q][dj];
                Scalar hi1 = map.length(dj) - a - lam * W.f[q][j];
                if (!lo1.certainly_positive() || !hi1.certainly_positive())
                    throw ContainmentViolation("image of W " + witness(j, p, q, dj));
                // r_j(W_{zeta j}) inside I_{gamma j} and clear of W_{iota j}
                Scalar b = circle_diff(map.eval_left_limit(zj), map.z(gj));
                Scalar lo2 = b - lam * W.e[p][zj];
                Scalar hi2 = map.length(gj) - b - lam * W.f[q][zj] - W.e[p][ij];
                if (!lo2.certainly_positive() || !hi2.certainly_positive())
                    throw ContainmentViolation("image of W " + witness(j, p, q, gj));
                // Phi^k(W_j^{p,q}) meets every interval but those of bar c_j, bar d_j
                const int k = cb.k(j), cj = cb.c(j);
                Scalar el = p > 0 ? W.e[p - 1][cj] : Scalar(0, map.precision());
                Scalar start = map.c(cj) - lam * el;
                Scalar len = pow(lam, k) * (W.e[p][j] + W.f[q][j]);
                if (auto miss = arc_misses(map, start, len, {cb.bar(cj), cb.bar(cb.d(j))}))
                    throw ContainmentViolation("Phi^k(W) misses I " + witness(j, p, q, *miss));
            }
    return W;
}

// ---------------------------------------------------------------- generators

Scalar GeneratorFamily::eval(int j, const Scalar& x) const
{
    const Generator& g = gens[j];
    const Scalar& lam = map.lambda();
    if (g.smooth_half_width) {
        const Scalar& a = *g.smooth_half_width;
        Scalar t = circle_diff(x, g.n_plus - a);
        if (t.mid_d() < 2 * a.mid_d()) {
            Scalar base = g.r0 + lam * (arc - a);
            return frac(base + lam * t - (lam - 1 / lam) * t * t / (a * 4));
        }
    }
    Scalar d = circle_diff(x, g.n_minus);
    if (d.mid_d() > (1.0 + arc.mid_d()) / 2) d -= 1;
    Scalar v1 = g.r0 + lam * d;
    if (cmp_certified(d, arc, 0.0) == Cmp::Greater)
        return frac(g.r0 + lam * arc + (d - arc) / lam);
    if (d.certainly_negative()) return frac(g.r0 + d / lam);
    if (!d.contains_zero() && cmp_certified(d, arc, 0.0) == Cmp::Less) return frac(v1);
    Scalar v2 = d.contains_zero() ? g.r0 + d / lam : g.r0 + lam * arc + (d - arc) / lam;
    return frac(Scalar::hull(v1, v2));
}

Scalar GeneratorFamily::derivative(int j, const Scalar& x) const
{
    const Generator& g = gens[j];
    const Scalar& lam = map.lambda();
    Scalar inv = 1 / lam;
    if (g.smooth_half_width) {
        const Scalar& a = *g.smooth_half_width;
        Scalar t = circle_diff(x, g.n_plus - a);
        if (t.mid_d() < 2 * a.mid_d()) return lam - (lam - inv) * t / (a * 2);
    }
    Scalar d = circle_diff(x, g.n_minus);
    if (d.mid_d() > (1.0 + arc.mid_d()) / 2) d -= 1;
    if (d.certainly_positive() && cmp_certified(d, arc, 0.0) == Cmp::Less) return lam;
    if (d.certainly_negative() || cmp_certified(d, arc, 0.0) == Cmp::Greater) return inv;
    return Scalar::hull(inv, lam);
}

Scalar GeneratorFamily::eval_word(const std::vector<int>& word, const Scalar& x) const
{
    Scalar y = x;
    for (int w : word) y = eval(w, y);
    return y;
}

GeneratorFamily build_generators(const CircleMap& map, const GeneratorOptions& opt, double eps)
{
    eps = eps_or_default(eps);
    const auto& cb = map.comb();
    const int n = map.n();
    const Scalar& lam = map.lambda();
    const int P = cb.num_delta_cycles;
    const int p_max = opt.p_max < 0 ? P + 1 : opt.p_max;
    if (p_max <= P)
        throw IndexExhausted("p_max=" + std::to_string(p_max) + " does not exceed the " +
                             std::to_string(P) + " delta-cycles");

    GeneratorFamily fam;
    fam.map = map;
    fam.arc = 1 / (lam + 1);
    fam.ext.V = compute_affine_neighborhoods(map, eps);
    fam.ext.W = compute_W(map, fam.ext.V, p_max, p_max, eps);
    fam.ext.p.assign(n, p_max);
    fam.ext.q.assign(n, p_max);
    for (int j = 0; j < n; ++j) {
        fam.ext.c_idx.push_back(cb.c(j));
        fam.ext.d_idx.push_back(cb.d(j));
    }

    // n_minus = z_j - s where the slope-lambda line of branch j meets the
    // inverse of branch bar j
    const Scalar inv = 1 / lam;
    const Scalar period = 1 / (lam - inv);
    for (int j = 0; j < n; ++j) {
        const int b = cb.bar(j);
        Scalar F = circle_diff(map.z(j), map.c(b));
        Scalar base = map.c(j) - map.z(b) - F / lam;
        std::optional<Scalar> s;
        for (long m = -2L * n - 4; m <= 2L * n + 4 && !s; ++m) {
            Scalar cand = (base - m) * period;
            if (cand.certainly_negative() || !(cand - period).certainly_negative()) continue;
            if (cand.contains_zero()) continue;
            s = cand;
        }
        if (!s) throw IntegralInfeasible("no neutral point for generator " + label(j));
        Scalar inner = *s - fam.ext.W.left(j, fam.ext.p[j]);
        Scalar outer = fam.arc - *s - map.length(j) - fam.ext.W.right(cb.zeta[j], fam.ext.q[cb.zeta[j]]);
        if (!inner.certainly_positive() || !outer.certainly_positive())
            throw IntegralInfeasible("slope-lambda arc of generator " + label(j) +
                                     " cannot hold its extended interval");
        Generator g;
        g.j = j;
        g.n_minus = frac(map.z(j) - *s);
        g.n_plus = frac(g.n_minus + fam.arc);
        g.r0 = frac(map.c(j) - lam * *s);
        fam.gens.push_back(std::move(g));
    }
    for (int j = 0; j < n; ++j) {
        const int b = cb.bar(j);
        if (!circle_equal(fam.eval(j, fam.gens[j].n_plus), fam.gens[b].n_minus, eps) ||
            !circle_equal(fam.eval(j, fam.gens[j].n_minus), fam.gens[b].n_plus, eps))
            throw ValidationFailed("generators " + label(j) + " and " + label(b) +
                                   " are not mutually inverse");
    }
    if (opt.fault_j >= 0) {
        if (opt.fault_j >= n) throw ConfigError("fault generator out of range");
        fam.gens[opt.fault_j].smooth_half_width =
            Scalar::from_double(opt.fault_half_width, map.precision());
    }
    for (int j = 0; j < n; ++j) {
        const int k = cb.k(j);
        fam.relations.push_back({j, cb.delta_word(j, k), cb.gamma_word(j, k)});
    }
    return fam;
}

Scalar verify_cp_relation(const GeneratorFamily& fam, int j, int grid_size)
{
    const auto& rel = fam.relations.at(j);
    Scalar worst(0, fam.map.precision());
    for (int i = 0; i < grid_size; ++i) {
        Scalar x = Scalar::from_ratio(2L * i + 1, 2L * grid_size, fam.map.precision());
        Scalar d = circle_distance(CirclePoint(fam.eval_word(rel.lhs, x)),
                                   CirclePoint(fam.eval_word(rel.rhs, x)));
        worst = Scalar::max(worst, d);
    }
    return worst;
}

// ---------------------------------------------------------------- profile

namespace {

// Preimages of both kinks of every factor under the preceding prefix.
std::vector<Scalar> word_kinks(const GeneratorFamily& fam, const std::vector<int>& word)
{
    const auto& cb = fam.map.comb();
    std::vector<Scalar> out;
    for (size_t i = 0; i < word.size(); ++i) {
        for (const Scalar* kink : {&fam.gens[word[i]].n_minus, &fam.gens[word[i]].n_plus}) {
            Scalar x = *kink;
            for (size_t t = i; t-- > 0;) x = fam.eval(cb.bar(word[t]), x);
            out.push_back(x);
        }
    }
    return out;
}

int word_exponent(const GeneratorFamily& fam, const std::vector<int>& word, Scalar x)
{
    int e = 0;
    const double a = fam.arc.mid_d();
    for (int w : word) {
        double d = circle_diff(x, fam.gens[w].n_minus).mid_d();
        e += d < a ? 1 : -1;
        x = fam.eval(w, x);
    }
    return e;
}

double pos(const Scalar& x)
{
    double d = x.mid_d();
    return d < 0 ? d + 1 : d;
}

} // namespace

ProfileReport verify_partition_profile(const GeneratorFamily& fam, int j, double eps)
{
    eps = eps_or_default(eps);
    const auto& rel = fam.relations.at(j);
    const auto& map = fam.map;
    const int k = map.comb().k(j);
    for (const auto& g : fam.gens)
        if (g.smooth_half_width)
            throw ProfileViolation("generator " + label(g.j) + " is smoothed; profile undefined");

    std::vector<Scalar> cuts;
    for (const auto* w : {&rel.lhs, &rel.rhs})
        for (auto& x : word_kinks(fam, *w)) {
            bool dup = false;
            for (const auto& c : cuts) dup = dup || circle_equal(c, x, eps);
            if (!dup) cuts.push_back(frac(x));
        }
    std::sort(cuts.begin(), cuts.end(),
              [](const Scalar& a, const Scalar& b) { return pos(a) < pos(b); });

    ProfileReport rep;
    rep.j = j;
    const int C = static_cast<int>(cuts.size());
    std::vector<ProfilePiece> raw;
    for (int i = 0; i < C; ++i) {
        const Scalar& lo = cuts[i];
        const Scalar& hi = cuts[(i + 1) % C];
        Scalar mid = frac(lo + circle_diff(hi, lo) / 2);
        int ep = word_exponent(fam, rel.lhs, mid);
        int em = word_exponent(fam, rel.rhs, mid);
        if (ep != em)
            throw ProfileViolation("piece [" + lo.to_string(20) + ", " + hi.to_string(20) +
                                   "] slopes lambda^" + std::to_string(ep) + " vs lambda^" +
                                   std::to_string(em));
        double mm = circle_distance(CirclePoint(fam.eval_word(rel.lhs, mid)),
                                    CirclePoint(fam.eval_word(rel.rhs, mid)))
                        .upper_d();
        rep.max_mismatch = std::max(rep.max_mismatch, mm);
        raw.push_back({lo, hi, ep});
    }
    // merge neighbours of equal slope; cut points between them are not kinks
    int start = 0;
    while (start < C && raw[start].exponent == raw[(start + C - 1) % C].exponent) ++start;
    if (start == C) throw ProfileViolation("composition has constant slope");
    for (int t = 0; t < C; ++t) {
        const auto& piece = raw[(start + t) % C];
        if (!rep.pieces.empty() && rep.pieces.back().exponent == piece.exponent) {
            rep.pieces.back().hi = piece.hi;
        } else {
            rep.pieces.push_back(piece);
            rep.kinks.push_back(piece.lo);
        }
    }
    // rotate so the piece holding z_j comes first
    auto holds = [&](const ProfilePiece& p, const Scalar& x) {
        Where w = in_interval(x, p.lo, p.hi, 0.0);
        return w == Where::Inside || w == Where::Boundary;
    };
    auto it = std::find_if(rep.pieces.begin(), rep.pieces.end(),
                           [&](const ProfilePiece& p) { return holds(p, map.z(j)); });
    if (it == rep.pieces.end()) throw ProfileViolation("z_j lies on a kink");
    std::rotate(rep.pieces.begin(), it, rep.pieces.end());

    std::vector<int> expect;
    for (int m = 0; m <= k; ++m) expect.push_back(k - 2 * m);
    for (int m = k - 1; m >= 1; --m) expect.push_back(k - 2 * m);
    if (rep.pieces.size() != expect.size())
        throw ProfileViolation("relation " + label(j) + " has " +
                               std::to_string(rep.pieces.size()) + " affine pieces, expected " +
                               std::to_string(expect.size()));
    for (size_t i = 0; i < expect.size(); ++i)
        if (rep.pieces[i].exponent != expect[i])
            throw ProfileViolation("piece [" + rep.pieces[i].lo.to_string(20) + ", " +
                                   rep.pieces[i].hi.to_string(20) + "] slope lambda^" +
                                   std::to_string(rep.pieces[i].exponent) + ", expected lambda^" +
                                   std::to_string(expect[i]));
    if (rep.max_mismatch > eps)
        throw ProfileViolation("compositions differ by " + std::to_string(rep.max_mismatch));

    const int p = fam.ext.p[j];
    const auto& A0 = rep.pieces[0];
    Scalar wl = frac(map.z(j) - fam.ext.W.left(j, p));
    Scalar wr = frac(map.z(j) + fam.ext.W.right(j, p));
    rep.contains_W = holds(A0, wl) && holds(A0, wr);
    return rep;
}

} // namespace bsl
