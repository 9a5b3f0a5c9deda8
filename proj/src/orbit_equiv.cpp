#include "bsl/orbit_equiv.hpp"

#include "bsl/errors.hpp"

#include <algorithm>
#include <random>

namespace bsl {

namespace {

Cmp same_point(const Scalar& a, const Scalar& b, double eps)
{
    Scalar d = circle_distance(CirclePoint(a), CirclePoint(b));
    return cmp_certified(d, Scalar(0, d.precision()), eps);
}

Scalar iterate(const CircleMap& map, Scalar x, int k)
{
    try {
        for (int i = 0; i < k; ++i) x = map.eval(x);
    } catch (const AmbiguousBranch& e) {
        throw AmbiguousGeometry(e.what());
    }
    return x;
}

bool in_branch(const CircleMap& map, const Scalar& x, int j)
{
    Where w = map.classify(x, j);
    if (w == Where::Ambiguous)
        throw AmbiguousGeometry("point " + x.to_string(20) + " not separated from the ends of I_" + std::to_string(j + 1));
    return w == Where::Inside || w == Where::Boundary;
}

const CPRelation& relation_at(const GeneratorFamily& fam, int j)
{
    for (const auto& r : fam.relations)
        if (r.j == j) return r;
    throw Error("Internal", "no cutting point relation at z_" + std::to_string(j + 1));
}

void verify(const CircleMap& map, OEWitness& w, double eps)
{
    w.verified = same_point(iterate(map, w.x, w.n), iterate(map, w.y, w.m), eps) == Cmp::Equal;
}

} // namespace

double neutral_distance(const GeneratorFamily& fam, int j, const Scalar& x)
{
    const Generator& g = fam.gens[j];
    CirclePoint p(x);
    return std::min(circle_distance(p, CirclePoint(g.n_minus)).lower_d(),
                    circle_distance(p, CirclePoint(g.n_plus)).lower_d());
}

OEWitness find_common_iterates(const CircleMap& map, const Scalar& x, const Scalar& y, int bound, double eps)
{
    if (bound < 1) throw ConfigError("bound must be >= 1");
    OEWitness w;
    w.x = x;
    w.y = y;
    std::vector<Scalar> ox{frac(x)}, oy{frac(y)};
    try {
        for (int i = 0; i < bound; ++i) {
            ox.push_back(map.eval(ox.back()));
            oy.push_back(map.eval(oy.back()));
        }
    } catch (const AmbiguousBranch& e) {
        throw AmbiguousGeometry(e.what());
    }
    for (int s = 0; s <= 2 * bound; ++s)
        for (int n = std::max(0, s - bound); n <= std::min(s, bound); ++n) {
            Cmp c = same_point(ox[n], oy[s - n], eps);
            if (c == Cmp::Ambiguous)
                throw AmbiguousGeometry("iterates " + std::to_string(n) + " and " + std::to_string(s - n) +
                                        " neither equal nor separated");
            if (c == Cmp::Equal) {
                w.found = true;
                w.verified = true;
                w.n = n;
                w.m = s - n;
                return w;
            }
        }
    return w;
}

OEWitness constructive_witness(const CircleMap& map, const GeneratorFamily& fam, int j, const Scalar& x,
                               int max_steps, double neutral_eps, double eps)
{
    const auto& cb = map.comb();
    const Generator& g = fam.gens[j];
    const double dn = neutral_distance(fam, j, x);
    if (dn < neutral_eps)
        throw NeutralPointDetected("x = " + x.to_string(20) + " is within " + std::to_string(dn) +
                                   " of a neutral point of generator " + std::to_string(j + 1));
    OEWitness w;
    w.j = j;
    w.x = frac(x);
    w.y = fam.eval(j, x);

    // where phi_j contracts, x = phi_{bar j}(y) expands
    const double t = circle_diff(w.x, g.n_minus).mid_d();
    if (t >= fam.arc.mid_d()) {
        OEWitness u = constructive_witness(map, fam, cb.bar(j), w.y, max_steps, neutral_eps, eps);
        w.found = u.found;
        w.n = u.m;
        w.m = u.n;
        w.side = u.side;
        w.transcript = std::move(u.transcript);
        w.mirrored = true;
        verify(map, w, eps);
        return w;
    }
    if (in_branch(map, w.x, j)) {
        w.found = true;
        w.n = 1;
        w.m = 0;
        w.side = 'a';
        verify(map, w, eps);
        return w;
    }
    const bool left = t < circle_diff(map.z(j), g.n_minus).mid_d();
    w.side = left ? 'L' : 'R';
    int cur = j, K = 0;
    Scalar xn = w.x;
    for (int step = 1; step <= max_steps; ++step) {
        // left of z_j the relation at z_j applies; right of z_{zeta j} the one at z_{zeta j}
        const CPRelation& r = relation_at(fam, left ? cur : cb.zeta[cur]);
        const int kk = static_cast<int>(r.lhs.size());
        xn = iterate(map, xn, kk - 1);
        K += kk - 1;
        cur = left ? r.rhs.back() : r.lhs.back();
        OEStep s{step, cur, CirclePoint(xn).to_double(), 'b', K};
        if (in_branch(map, xn, cur)) {
            s.alt = 'a';
            w.transcript.push_back(s);
            w.found = true;
            w.n = K + 1;
            w.m = K;
            verify(map, w, eps);
            return w;
        }
        w.transcript.push_back(s);
    }
    throw StepBudgetExceeded("no iterate of x = " + x.to_string(20) + " reached the branch of generator " +
                             std::to_string(j + 1) + " in " + std::to_string(max_steps) +
                             " steps; neutral distance " + std::to_string(dn));
}

double OEFuzzReport::success_rate() const
{
    const std::uint64_t eligible = pairs - excluded;
    return eligible == 0 ? 1.0 : static_cast<double>(success) / static_cast<double>(eligible);
}

OEFuzzReport fuzz_orbit_equivalence(const CircleMap& map, const GeneratorFamily& fam, int samples, int bound,
                                    std::uint64_t seed, double neutral_eps)
{
    OEFuzzReport rep;
    rep.samples = samples;
    rep.bound = bound;
    rep.seed = seed;
    rep.neutral_eps = neutral_eps;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto note = [&](const std::string& s) {
        if (rep.notes.size() < 8) rep.notes.push_back(s);
    };
    for (int s = 0; s < samples; ++s) {
        Scalar x = Scalar::from_double(unit(rng), map.precision());
        for (int j = 0; j < map.n(); ++j) {
            ++rep.pairs;
            const std::string tag = "sample " + std::to_string(s) + " generator " + std::to_string(j + 1);
            OEWitness cw;
            try {
                cw = constructive_witness(map, fam, j, x, 200, neutral_eps);
            } catch (const NeutralPointDetected&) {
                ++rep.excluded;
                continue;
            } catch (const Error& e) {
                ++rep.failures;
                note(tag + ": " + e.what());
                continue;
            }
            rep.max_nm = std::max(rep.max_nm, cw.n + cw.m);
            OEWitness bw;
            try {
                bw = find_common_iterates(map, x, cw.y, bound);
            } catch (const Error& e) {
                ++rep.failures;
                note(tag + ": " + e.what());
                rep.witnesses.push_back(std::move(cw));
                continue;
            }
            if (!bw.found) {
                ++rep.not_found;
                note(tag + ": no common iterate within " + std::to_string(bound));
            } else if (cw.verified && cw.n - cw.m == bw.n - bw.m) {
                ++rep.success;
            } else {
                ++rep.disagreements;
                note(tag + ": constructive (" + std::to_string(cw.n) + "," + std::to_string(cw.m) +
                     ") against search (" + std::to_string(bw.n) + "," + std::to_string(bw.m) + ")");
            }
            rep.witnesses.push_back(std::move(cw));
        }
    }
    return rep;
}

} // namespace bsl
