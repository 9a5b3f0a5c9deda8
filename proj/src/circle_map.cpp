#include "bsl/circle_map.hpp"

#include "bsl/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

namespace bsl {

namespace {

double eps_or_default(double eps) { return eps < 0 ? default_epsilon() : eps; }

int decimal_digits(mpfr_prec_t bits) { return static_cast<int>(bits * 0.30103) + 20; }

bool circle_equal(const Scalar& a, const Scalar& b, double eps)
{
    return circle_distance(CirclePoint(a), CirclePoint(b)).upper_d() <= eps;
}

std::string label(int j) { return std::to_string(j + 1); }

Scalar point(const Scalar& x) { return x.mid(); }

// 0.3 means 3/10, not the nearest double.
Scalar shortest_decimal(double v, mpfr_prec_t prec)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return Scalar::from_string(std::string(buf, res.ptr), prec);
}

} // namespace

CircleMap::CircleMap(Combinatorics comb, std::string lambda, std::vector<std::string> z,
                     std::vector<std::string> c, mpfr_prec_t precision_bits)
    : comb_(std::move(comb)), lambda_str_(std::move(lambda)), z_str_(std::move(z)),
      c_str_(std::move(c)), prec_(precision_bits)
{
    const int n = comb_.n();
    if (static_cast<int>(z_str_.size()) != n || static_cast<int>(c_str_.size()) != n)
        throw ConfigError("map needs " + std::to_string(n) + " cutting points and offsets");
    lambda_ = Scalar::from_string(lambda_str_, prec_);
    for (int j = 0; j < n; ++j) {
        z_.push_back(frac(Scalar::from_string(z_str_[j], prec_)));
        c_.push_back(frac(Scalar::from_string(c_str_[j], prec_)));
    }
    Scalar total(0, prec_);
    for (int j = 0; j < n; ++j) {
        Scalar len = circle_diff(z_[comb_.zeta[j]], z_[j]);
        if (!len.certainly_positive())
            throw DegenerateInterval("I_" + label(j) + " has no certified positive length");
        total += len;
        len_.push_back(std::move(len));
    }
    if (cmp_certified(total, Scalar(1, prec_)) != Cmp::Equal)
        throw ConfigError("cutting points are not in zeta cyclic order");
}

CircleMap CircleMap::at_precision(mpfr_prec_t bits) const
{
    return CircleMap(comb_, lambda_str_, z_str_, c_str_, bits);
}

Where CircleMap::classify(const Scalar& x, int j) const
{
    return in_interval(x, z_[j], z_[comb_.zeta[j]], 0.0);
}

int CircleMap::locate(const Scalar& x) const
{
    for (int j = 0; j < n(); ++j) {
        Where w = classify(x, j);
        if (w == Where::Inside || w == Where::Boundary) return j;
        if (w == Where::Ambiguous)
            throw AmbiguousBranch("point " + x.to_string(20) + " not separated from I_" + label(j) +
                                  " endpoints");
    }
    throw AmbiguousBranch("point " + x.to_string(20) + " lies in no interval");
}

Scalar CircleMap::eval_branch(int j, const Scalar& x) const
{
    Scalar d = circle_diff(x, z_[j]);
    // points just left of z_j extend the branch affinely
    if (d.mid_d() > (len_[j].mid_d() + 1.0) / 2) d -= 1;
    return frac(lambda_ * d + c_[j]);
}

Scalar CircleMap::eval(const Scalar& x) const { return eval_branch(locate(x), x); }

Scalar CircleMap::eval_left_limit(int j) const
{
    int i = comb_.zeta_inv[j];
    return frac(lambda_ * len_[i] + c_[i]);
}

std::optional<Scalar> CircleMap::inverse_branch(int j, const Scalar& y) const
{
    Scalar e = circle_diff(y, c_[j]);
    if (e.mid_d() > 0.5 + (lambda_ * len_[j]).mid_d() / 2) e -= 1;
    Scalar span = lambda_ * len_[j];
    if (cmp_certified(e, span, 0.0) == Cmp::Greater) return std::nullopt;
    if (e.certainly_negative()) return std::nullopt;
    return frac(z_[j] + e / lambda_);
}

Scalar CircleMap::fixed_point(int j) const
{
    Scalar base = circle_diff(z_[j], c_[j]);
    Scalar lm1 = lambda_ - 1;
    if (!lm1.certainly_positive()) throw ValidationFailed("slope does not exceed 1");
    for (long m = 0; m < 4L * n() + 4; ++m) {
        Scalar d = (base + m) / lm1;
        if (cmp_certified(d, len_[j], 0.0) != Cmp::Less) break;
        if (d.certainly_negative()) continue;
        return frac(z_[j] + d);
    }
    throw ValidationFailed("branch " + label(j) + " has no fixed point in its interval");
}

OrbitDatum orbit_datum(const CircleMap& map, int j, double eps)
{
    eps = eps_or_default(eps);
    const auto& cb = map.comb();
    OrbitDatum o;
    o.j = j;
    const int k = cb.k(j);
    Scalar r = map.c(j);
    Scalar l = map.eval_left_limit(j);
    for (int m = 0; m < k; ++m) {
        o.right_orbit.push_back(r);
        o.left_orbit.push_back(l);
        if (o.merge_step < 0 && circle_equal(r, l, eps)) o.merge_step = m;
        if (m + 1 < k) {
            r = map.eval(r);
            l = map.eval(l);
        }
    }
    o.merge_point = o.right_orbit.back();
    o.host = map.locate(o.merge_point);
    return o;
}

bool ValidationReport::ok() const
{
    return std::all_of(conditions.begin(), conditions.end(),
                       [](const ConditionResult& c) { return c.pass; });
}

const ConditionResult& ValidationReport::get(const std::string& name) const
{
    for (const auto& c : conditions)
        if (c.name == name) return c;
    throw ConfigError("no condition named " + name);
}

namespace {

void fail(ConditionResult& r, const std::string& w)
{
    if (r.pass) {
        r.pass = false;
        r.witness = w;
    }
}

ValidationReport validate_once(const CircleMap& map, double eps)
{
    const auto& cb = map.comb();
    const int n = map.n();
    ValidationReport rep;
    ConditionResult se, ep, em, ec, fx;
    se.name = "SE";
    ep.name = "E+";
    em.name = "E-";
    ec.name = "EC";
    fx.name = "expanding_fixed_points";

    if (!(map.lambda() - 1).certainly_positive()) fail(se, "lambda=" + map.lambda().to_string(20));
    for (int j = 0; j < n && se.pass; ++j) {
        Scalar span = map.lambda() * map.length(j);
        if (cmp_certified(span, Scalar(1, map.precision()), 0.0) != Cmp::Less) {
            fail(se, "j=" + label(j) + " image covers the circle");
            break;
        }
        Scalar a = map.c(j);
        Scalar b = frac(a + span);
        for (int i = 0; i < n; ++i) {
            Where w1 = in_interval(map.z(i), a, b, 0.0);
            Where w2 = map.classify(a, i);
            if (w1 == Where::Ambiguous || w2 == Where::Ambiguous) {
                fail(se, "j=" + label(j) + " i=" + label(i) + " ambiguous");
                break;
            }
            bool meets = w1 == Where::Inside || w1 == Where::Boundary || w2 == Where::Inside ||
                         w2 == Where::Boundary;
            if (i == cb.bar(j) && meets)
                fail(se, "j=" + label(j) + " image meets I_" + label(i));
            if (i != cb.bar(j) && !meets)
                fail(se, "j=" + label(j) + " image misses I_" + label(i));
        }
    }

    for (int j = 0; j < n; ++j) {
        OrbitDatum o;
        try {
            o = orbit_datum(map, j, eps);
        } catch (const AmbiguousBranch& e) {
            fail(ep, "j=" + label(j) + " orbit hits a cutting point");
            fail(ec, "j=" + label(j) + " orbit hits a cutting point");
            continue;
        }
        const int k = cb.k(j);
        for (int m = 0; m + 1 < k; ++m) {
            int want_r = cb.delta_pow(m + 1, j);
            int want_l = cb.gamma_pow(m + 1, cb.zeta_inv[j]);
            Where wr = map.classify(o.right_orbit[m], want_r);
            Where wl = map.classify(o.left_orbit[m], want_l);
            if (wr != Where::Inside) {
                fail(ep, "j=" + label(j) + " m=" + std::to_string(m) + " point=" +
                             o.right_orbit[m].to_string(20) + " " + to_string(wr));
                if (wr == Where::Boundary) ep.warnings.push_back("boundary hit j=" + label(j));
            }
            if (wl != Where::Inside) {
                fail(em, "j=" + label(j) + " m=" + std::to_string(m) + " point=" +
                             o.left_orbit[m].to_string(20) + " " + to_string(wl));
                if (wl == Where::Boundary) em.warnings.push_back("boundary hit j=" + label(j));
            }
        }
        Scalar dist = circle_distance(CirclePoint(o.right_orbit[k - 1]),
                                      CirclePoint(o.left_orbit[k - 1]));
        if (dist.upper_d() > eps)
            fail(ec, "j=" + label(j) + " m=" + std::to_string(k - 1) +
                         " distance=" + dist.to_string(6));
        else if (o.merge_step != k - 1)
            fail(ec, "j=" + label(j) + " merges early at m=" + std::to_string(o.merge_step));
        rep.orbits.push_back(std::move(o));
    }

    for (int j = 0; j < n; ++j) {
        try {
            Scalar p = map.fixed_point(j);
            if (map.classify(p, j) != Where::Inside)
                fail(fx, "j=" + label(j) + " fixed point on the boundary");
        } catch (const ValidationFailed&) {
            fail(fx, "j=" + label(j) + " no fixed point");
        }
    }
    rep.conditions = {se, ep, em, ec, fx};
    return rep;
}

} // namespace

ValidationReport validate_conditions(const CircleMap& map, double eps)
{
    eps = eps_or_default(eps);
    PrecisionSchedule sched;
    mpfr_prec_t p = std::max(map.precision(), sched.start);
    for (;;) {
        try {
            return validate_once(p == map.precision() ? map : map.at_precision(p), eps);
        } catch (const AmbiguousGeometry&) {
            if (p >= sched.max) throw;
        }
        p *= 2;
    }
}

std::vector<int> itinerary(const CircleMap& map, const Scalar& x, int n)
{
    if (n < 1) throw ConfigError("itinerary length must be positive");
    std::vector<int> w;
    Scalar y = x;
    for (int m = 0; m < n; ++m) {
        int j = map.locate(y);
        w.push_back(j);
        if (m + 1 < n) y = map.eval_branch(j, y);
    }
    return w;
}

// ---------------------------------------------------------------- solver

namespace {

using Mat = std::vector<std::vector<Scalar>>;

struct Model {
    const Combinatorics& cb;
    std::vector<Scalar> H;   // interval lengths
    std::vector<Scalar> D;   // forward distance from z_{delta j} to z_{gamma j}
    mpfr_prec_t prec;
};

// Augmented system [M' | r] with the gauge a_0 = 0 removed.
Mat ec_system(const Model& md, const Scalar& lam)
{
    const auto& cb = md.cb;
    const int n = cb.n();
    Mat A(n, std::vector<Scalar>(n, Scalar(0, md.prec)));
    for (int m = 0; m < n; ++m) {
        const int k = cb.k(m);
        Scalar rhs(1, md.prec);
        std::vector<Scalar> row(n, Scalar(0, md.prec));
        for (int t = 0; t < k; ++t) {
            Scalar coef = point(pow(lam, k - 1 - t));
            int p = cb.delta_pow(t, m);
            int q = cb.gamma_pow(t, cb.zeta_inv[m]);
            row[p] = point(row[p] + coef);
            row[q] = point(row[q] - coef);
            Scalar kappa = md.H[cb.gamma[q]] + md.D[q] - lam * md.H[q];
            rhs = point(rhs - coef * kappa);
        }
        for (int i = 1; i < n; ++i) A[m][i - 1] = row[i];
        A[m][n - 1] = rhs;
    }
    return A;
}

// Row-reduces in place with partial pivoting over `cols` columns; returns
// the pivot rows and the determinant sign/magnitude when square.
Scalar eliminate(Mat& A, int cols, std::vector<int>& piv_rows)
{
    const int rows = static_cast<int>(A.size());
    Scalar det(1, A[0][0].precision());
    std::vector<bool> used(rows, false);
    piv_rows.clear();
    for (int c = 0; c < cols; ++c) {
        int best = -1;
        double bv = -1;
        for (int r = 0; r < rows; ++r) {
            if (used[r]) continue;
            double v = std::fabs(A[r][c].mid_d());
            if (v > bv) {
                bv = v;
                best = r;
            }
        }
        if (best < 0 || bv == 0.0) return Scalar(0, det.precision());
        used[best] = true;
        piv_rows.push_back(best);
        det = point(det * A[best][c]);
        for (int r = 0; r < rows; ++r) {
            if (used[r]) continue;
            Scalar f = point(A[r][c] / A[best][c]);
            for (int cc = c; cc < static_cast<int>(A[r].size()); ++cc)
                A[r][cc] = point(A[r][cc] - f * A[best][cc]);
        }
    }
    return det;
}

Scalar residual(const Model& md, const Scalar& lam)
{
    Mat A = ec_system(md, lam);
    std::vector<int> piv;
    const int n = md.cb.n();
    Scalar det = eliminate(A, n - 1, piv);
    std::vector<bool> used(n, false);
    for (int r : piv) used[r] = true;
    for (int r = 0; r < n; ++r)
        if (!used[r]) return point(det * A[r][n - 1]);
    return Scalar(0, md.prec);
}

// Offsets a_j at lambda with a_0 = 0.
std::vector<Scalar> particular_offsets(const Model& md, const Scalar& lam)
{
    const int n = md.cb.n();
    Mat A = ec_system(md, lam);
    std::vector<int> piv;
    eliminate(A, n - 1, piv);
    if (static_cast<int>(piv.size()) != n - 1) throw NoSolutionFound("EC system is rank deficient");
    std::vector<Scalar> x(n - 1, Scalar(0, md.prec));
    for (int c = n - 2; c >= 0; --c) {
        const auto& row = A[piv[c]];
        Scalar s = row[n - 1];
        for (int cc = c + 1; cc < n - 1; ++cc) s = point(s - row[cc] * x[cc]);
        x[c] = point(s / row[c]);
    }
    std::vector<Scalar> a{Scalar(0, md.prec)};
    a.insert(a.end(), x.begin(), x.end());
    return a;
}

struct TBounds {
    Scalar lo, hi;
};

// Feasible range of the common shift t from the E+/E- memberships.
TBounds shift_bounds(const Model& md, const Scalar& lam, const std::vector<Scalar>& a0)
{
    const auto& cb = md.cb;
    const int n = cb.n();
    const mpfr_prec_t p = md.prec;
    TBounds tb{Scalar(-1000000, p), Scalar(1000000, p)};
    // lo <= v0 + s t <= hi
    auto impose = [&](const Scalar& v0, const Scalar& s, const Scalar& lo, const Scalar& hi) {
        Scalar t1 = point((lo - v0) / s), t2 = point((hi - v0) / s);
        if (s.certainly_negative()) std::swap(t1, t2);
        if (mpfr_greater_p(t1.lo(), tb.lo.lo())) tb.lo = t1;
        if (mpfr_less_p(t2.lo(), tb.hi.lo())) tb.hi = t2;
    };
    std::vector<Scalar> kappa(n, Scalar(0, p));
    for (int i = 0; i < n; ++i) kappa[i] = point(md.H[cb.gamma[i]] + md.D[i] - lam * md.H[i]);
    Scalar one(1, p);
    for (int m = 0; m < n; ++m) {
        const int k = cb.k(m);
        Scalar u = a0[m], su = one;
        Scalar w = point(kappa[cb.zeta_inv[m]] - a0[cb.zeta_inv[m]]), sw = -one;
        for (int t = 0; t + 1 < k; ++t) {
            impose(u, su, Scalar(0, p), md.H[cb.delta_pow(t + 1, m)]);
            impose(w, sw, Scalar(0, p), md.H[cb.gamma_pow(t + 1, cb.zeta_inv[m])]);
            int nr = cb.delta_pow(t + 1, m);
            int nl = cb.gamma_pow(t + 1, cb.zeta_inv[m]);
            u = point(a0[nr] + lam * u);
            su = point(one + lam * su);
            w = point(kappa[nl] - a0[nl] + lam * w);
            sw = point(-one + lam * sw);
        }
    }
    return tb;
}

} // namespace

SolverResult solve_even_model(const Combinatorics& cb, const SolverOptions& opt)
{
    const int n = cb.n();
    const mpfr_prec_t prec = 2 * opt.precision_bits + 64;
    const int digits = decimal_digits(opt.precision_bits);

    std::vector<std::string> zs(n);
    if (opt.cutting_points.empty()) {
        for (int i = 0, j = 0; i < n; ++i, j = cb.zeta[j])
            zs[j] = Scalar::from_ratio(i, n, prec).to_string(digits + 10);
    } else {
        if (static_cast<int>(opt.cutting_points.size()) != n)
            throw ConfigError("expected " + std::to_string(n) + " cutting points");
        zs = opt.cutting_points;
    }
    std::vector<Scalar> z(n, Scalar(0, prec));
    for (int j = 0; j < n; ++j) z[j] = frac(Scalar::from_string(zs[j], prec));

    Model md{cb, {}, {}, prec};
    for (int j = 0; j < n; ++j) md.H.push_back(point(circle_diff(z[cb.zeta[j]], z[j])));
    for (int j = 0; j < n; ++j) {
        Scalar d(0, prec);
        for (int i = cb.delta[j]; i != cb.gamma[j]; i = cb.zeta[i]) d = point(d + md.H[i]);
        md.D.push_back(d);
    }

    // sign-change scan on (1, 2N-1]
    const double lo = 1.0, hi = n - 1.0;
    std::vector<std::pair<Scalar, Scalar>> brackets;
    Scalar prev_l = Scalar::from_double(lo + (hi - lo) / opt.scan_points, prec);
    Scalar prev_f = residual(md, prev_l);
    for (int i = 2; i <= opt.scan_points; ++i) {
        Scalar l = Scalar::from_double(lo + (hi - lo) * i / opt.scan_points, prec);
        Scalar f = residual(md, l);
        if (f.mid_d() == 0.0 || (f.mid_d() > 0) != (prev_f.mid_d() > 0))
            brackets.emplace_back(prev_l, l);
        prev_l = l;
        prev_f = f;
    }
    std::reverse(brackets.begin(), brackets.end());

    std::string why = "no sign change of the consistency residual on (1, 2N-1]";
    for (auto [a, b] : brackets) {
        Scalar fa = residual(md, a);
        for (int it = 0; it < prec; ++it) {
            Scalar m = point((a + b) / 2);
            Scalar fm = residual(md, m);
            if (fm.mid_d() == 0.0 && mpfr_zero_p(fm.lo())) {
                a = b = m;
                break;
            }
            if ((fm.mid_d() > 0) == (fa.mid_d() > 0)) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        Scalar lam = point((a + b) / 2);
        std::vector<Scalar> a0;
        try {
            a0 = particular_offsets(md, lam);
        } catch (const NoSolutionFound& e) {
            why = e.what();
            continue;
        }
        TBounds tb = shift_bounds(md, lam, a0);
        Scalar gap = tb.hi - tb.lo;
        if (gap.mid_d() <= 1e-20) {
            why = "lambda=" + lam.to_string(20) + " has an empty offset interval";
            continue;
        }
        Scalar t = point(tb.lo + gap * shortest_decimal(opt.offset_fraction, prec));
        std::vector<std::string> cs(n);
        for (int j = 0; j < n; ++j) cs[j] = frac(z[cb.delta[j]] + a0[j] + t).to_string(digits);
        SolverResult res;
        res.map = CircleMap(cb, lam.to_string(digits), zs, cs, opt.precision_bits);
        res.lambda = lam.with_precision(opt.precision_bits);
        res.t_lo = tb.lo.with_precision(opt.precision_bits);
        res.t_hi = tb.hi.with_precision(opt.precision_bits);
        double worst = 0;
        for (int j = 0; j < n; ++j) {
            try {
                OrbitDatum o = orbit_datum(res.map, j, 0.0);
                const int k = cb.k(j);
                double d = circle_distance(CirclePoint(o.right_orbit[k - 1]),
                                           CirclePoint(o.left_orbit[k - 1]))
                               .upper_d();
                worst = std::max(worst, d);
            } catch (const AmbiguousBranch&) {
                worst = 1.0;
            }
        }
        res.residual = worst;
        if (worst > 1e-20) {
            why = "EC residual " + std::to_string(worst) + " above 1e-20";
            continue;
        }
        return res;
    }
    throw NoSolutionFound(why);
}

// ---------------------------------------------------------------- Markov

CircleMap markovize(const CircleMap& map, double eps)
{
    eps = eps_or_default(eps);
    const auto& cb = map.comb();
    const int n = map.n();
    const mpfr_prec_t prec = 2 * map.precision() + 64;
    const int digits = decimal_digits(map.precision());
    CircleMap hi = map.at_precision(prec);
    ValidationReport rep = validate_conditions(map, eps);
    if (!rep.ok()) throw ValidationFailed("input map fails validation");

    std::vector<std::string> zs(n), cs(n);
    for (int j = 0; j < n; ++j) {
        OrbitDatum o = orbit_datum(hi, j, eps);
        Scalar p = hi.fixed_point(o.host);
        Scalar shift = circle_diff(p, o.merge_point);
        if (shift.mid_d() > 0.5) shift -= 1;
        if (circle_equal(p, o.merge_point, eps)) {
            zs[j] = map.z_str()[j];
            cs[j] = map.c_str()[j];
            continue;
        }
        Scalar dz = shift / pow(hi.lambda(), cb.k(j));
        zs[j] = frac(hi.z(j) + dz).to_string(digits);
        cs[j] = frac(hi.c(j) + hi.lambda() * dz).to_string(digits);
    }
    CircleMap out(cb, map.lambda_str(), zs, cs, map.precision());
    ValidationReport r2 = validate_conditions(out, eps);
    for (const auto& c : r2.conditions)
        if (!c.pass) throw ValidationFailed("markovized map fails " + c.name + ": " + c.witness);
    for (const auto& o : r2.orbits) {
        Scalar p = out.fixed_point(o.host);
        if (!circle_equal(p, o.merge_point, eps))
            throw ValidationFailed("j=" + label(o.j) + " merge point is not the fixed point p^" +
                                   label(o.host));
    }
    return out;
}

MarkovPartition markov_partition(const CircleMap& mm, double eps)
{
    eps = eps_or_default(eps);
    const int n = mm.n();
    struct Pt {
        Scalar x;
        int branch;   // -1 when located on demand
    };
    std::vector<Pt> pts;
    auto add = [&](const Scalar& x, int branch) {
        for (const auto& q : pts)
            if (circle_equal(q.x, x, eps)) return;
        pts.push_back({frac(x), branch});
    };
    for (int j = 0; j < n; ++j) add(mm.z(j), j);
    for (int j = 0; j < n; ++j) {
        OrbitDatum o = orbit_datum(mm, j, eps);
        for (const auto& x : o.right_orbit) add(x, -1);
        for (const auto& x : o.left_orbit) add(x, -1);
        Scalar img = mm.eval(o.merge_point);
        if (!circle_equal(img, o.merge_point, eps))
            throw NotMarkov("merge point of j=" + label(j) + " is not fixed");
    }
    auto key = [](const Scalar& x) {
        double d = x.mid_d();
        return d < 0 ? d + 1 : d;
    };
    std::sort(pts.begin(), pts.end(), [&](const Pt& a, const Pt& b) { return key(a.x) < key(b.x); });
    const int P = static_cast<int>(pts.size());
    auto index_of = [&](const Scalar& x) {
        for (int i = 0; i < P; ++i)
            if (circle_equal(pts[i].x, x, eps)) return i;
        throw NotMarkov("image endpoint " + x.to_string(20) + " is not a partition point");
    };
    MarkovPartition mp;
    for (const auto& p : pts) mp.points.push_back(p.x);
    mp.matrix.assign(P, std::vector<int>(P, 0));
    for (int i = 0; i < P; ++i) {
        const Pt& a = pts[i];
        const Pt& b = pts[(i + 1) % P];
        int br = a.branch >= 0 ? a.branch : mm.locate(a.x);
        int s = index_of(mm.eval_branch(br, a.x));
        int e = index_of(mm.eval_branch(br, b.x));
        if (s == e) throw NotMarkov("interval image degenerates at partition index " + label(i));
        for (int t = s; t != e; t = (t + 1) % P) mp.matrix[i][t] = 1;
    }
    return mp;
}

PerronData perron_root(const std::vector<std::vector<int>>& M, mpfr_prec_t prec, double rel_width)
{
    const int n = static_cast<int>(M.size());
    if (n == 0) throw NotMarkov("empty transition matrix");
    for (const auto& row : M)
        if (static_cast<int>(row.size()) != n) throw NotMarkov("transition matrix is not square");

    // irreducibility: every state reaches every other
    auto reach = [&](int s, bool transpose) {
        std::vector<bool> seen(n, false);
        std::vector<int> st{s};
        seen[s] = true;
        while (!st.empty()) {
            int u = st.back();
            st.pop_back();
            for (int v = 0; v < n; ++v) {
                int e = transpose ? M[v][u] : M[u][v];
                if (e && !seen[v]) {
                    seen[v] = true;
                    st.push_back(v);
                }
            }
        }
        return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
    };
    if (!reach(0, false) || !reach(0, true)) throw NotMarkov("transition matrix is reducible");

    PerronData pd;
    pd.transition_matrix = M;
    // power iteration on (I + M), which shares the Perron vector and is primitive
    std::vector<long double> v(n, 1.0L), w(n);
    auto bounds = [&](const std::vector<long double>& x) {
        Scalar lo(0, prec), hi(0, prec);
        bool first = true;
        for (int i = 0; i < n; ++i) {
            Scalar num(0, prec);
            for (int j = 0; j < n; ++j)
                if (M[i][j]) num += Scalar::from_double(static_cast<double>(x[j]), prec) * M[i][j];
            Scalar r = num / Scalar::from_double(static_cast<double>(x[i]), prec);
            if (first || mpfr_less_p(r.lo(), lo.lo())) lo = r;
            if (first || mpfr_greater_p(r.hi(), hi.hi())) hi = r;
            first = false;
        }
        return Scalar::hull(lo, hi);
    };
    const int max_iter = 200000;
    int it = 0;
    Scalar enc = bounds(v);
    for (; it < max_iter; ++it) {
        long double norm = 0;
        for (int i = 0; i < n; ++i) {
            long double s = v[i];
            for (int j = 0; j < n; ++j)
                if (M[i][j]) s += M[i][j] * v[j];
            w[i] = s;
            norm += s;
        }
        for (int i = 0; i < n; ++i) v[i] = w[i] / norm;
        if (it % 16 == 15) {
            std::vector<long double> vd(v);
            enc = bounds(vd);
            if (enc.width_d() <= rel_width * enc.mid_d()) break;
        }
    }
    pd.spectral_radius = enc;
    pd.iterations = it + 1;
    return pd;
}

PerronData perron_data(const CircleMap& mm, double eps)
{
    MarkovPartition mp = markov_partition(mm, eps);
    return perron_root(mp.matrix, mm.precision());
}

} // namespace bsl
