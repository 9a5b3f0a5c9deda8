#include "bsl/scalar.hpp"

#include "bsl/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>
#include <vector>

namespace bsl {

namespace {

std::atomic<long> g_precision{256};
std::atomic<double> g_epsilon{1e-30};

mpfr_prec_t pick(mpfr_prec_t p) { return p > 0 ? p : default_precision(); }

double eps_or_default(double eps) { return eps < 0 ? default_epsilon() : eps; }

} // namespace

mpfr_prec_t default_precision() { return static_cast<mpfr_prec_t>(g_precision.load()); }
void set_default_precision(mpfr_prec_t bits) { g_precision.store(static_cast<long>(bits)); }
double default_epsilon() { return g_epsilon.load(); }
void set_default_epsilon(double eps) { g_epsilon.store(eps); }

Scalar::Scalar(mpfr_prec_t prec, int)
{
    mpfr_init2(lo_, prec);
    mpfr_init2(hi_, prec);
}

Scalar::Scalar() : Scalar(default_precision(), 0)
{
    mpfr_set_zero(lo_, 1);
    mpfr_set_zero(hi_, 1);
}

Scalar::Scalar(long v, mpfr_prec_t prec) : Scalar(pick(prec), 0)
{
    mpfr_set_si(lo_, v, MPFR_RNDD);
    mpfr_set_si(hi_, v, MPFR_RNDU);
}

Scalar::Scalar(const Scalar& o) : Scalar(o.precision(), 0)
{
    mpfr_set(lo_, o.lo_, MPFR_RNDD);
    mpfr_set(hi_, o.hi_, MPFR_RNDU);
}

Scalar::Scalar(Scalar&& o) noexcept : Scalar(o.precision(), 0)
{
    mpfr_swap(lo_, o.lo_);
    mpfr_swap(hi_, o.hi_);
}

Scalar& Scalar::operator=(const Scalar& o)
{
    if (this != &o) {
        mpfr_set_prec(lo_, o.precision());
        mpfr_set_prec(hi_, o.precision());
        mpfr_set(lo_, o.lo_, MPFR_RNDD);
        mpfr_set(hi_, o.hi_, MPFR_RNDU);
    }
    return *this;
}

Scalar& Scalar::operator=(Scalar&& o) noexcept
{
    mpfr_swap(lo_, o.lo_);
    mpfr_swap(hi_, o.hi_);
    return *this;
}

Scalar::~Scalar()
{
    mpfr_clear(lo_);
    mpfr_clear(hi_);
}

Scalar Scalar::from_string(std::string_view decimal, mpfr_prec_t prec)
{
    Scalar r(pick(prec), 0);
    std::string s(decimal);
    if (mpfr_set_str(r.lo_, s.c_str(), 10, MPFR_RNDD) != 0 &&
        mpfr_nan_p(r.lo_))
        throw ConfigError("bad decimal '" + s + "'");
    mpfr_set_str(r.hi_, s.c_str(), 10, MPFR_RNDU);
    if (mpfr_nan_p(r.lo_) || mpfr_nan_p(r.hi_))
        throw ConfigError("bad decimal '" + s + "'");
    return r;
}

Scalar Scalar::from_bounds(std::string_view lo, std::string_view hi, mpfr_prec_t prec)
{
    Scalar a = from_string(lo, prec);
    Scalar b = from_string(hi, prec);
    if (mpfr_cmp(a.lo_, b.hi_) > 0) throw ConfigError("lower bound exceeds upper bound");
    mpfr_set(a.hi_, b.hi_, MPFR_RNDU);
    return a;
}

Scalar Scalar::from_ratio(long num, long den, mpfr_prec_t prec)
{
    return Scalar(num, prec) / Scalar(den, prec);
}

Scalar Scalar::from_double(double v, mpfr_prec_t prec)
{
    Scalar r(pick(prec), 0);
    mpfr_set_d(r.lo_, v, MPFR_RNDD);
    mpfr_set_d(r.hi_, v, MPFR_RNDU);
    return r;
}

Scalar Scalar::min(const Scalar& a, const Scalar& b)
{
    Scalar r(std::max(a.precision(), b.precision()), 0);
    mpfr_min(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_min(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
}

Scalar Scalar::max(const Scalar& a, const Scalar& b)
{
    Scalar r(std::max(a.precision(), b.precision()), 0);
    mpfr_max(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_max(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
}

Scalar Scalar::hull(const Scalar& a, const Scalar& b)
{
    Scalar r(std::max(a.precision(), b.precision()), 0);
    mpfr_min(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_max(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
}

double Scalar::lower_d() const { return mpfr_get_d(lo_, MPFR_RNDD); }
double Scalar::upper_d() const { return mpfr_get_d(hi_, MPFR_RNDU); }

double Scalar::mid_d() const
{
    mpfr_t m;
    mpfr_init2(m, precision() + 1);
    mpfr_add(m, lo_, hi_, MPFR_RNDN);
    mpfr_div_2ui(m, m, 1, MPFR_RNDN);
    double d = mpfr_get_d(m, MPFR_RNDN);
    mpfr_clear(m);
    return d;
}

double Scalar::width_d() const
{
    mpfr_t w;
    mpfr_init2(w, precision());
    mpfr_sub(w, hi_, lo_, MPFR_RNDU);
    double d = mpfr_get_d(w, MPFR_RNDU);
    mpfr_clear(w);
    return d;
}

Scalar Scalar::mid() const
{
    Scalar r(precision(), 0);
    mpfr_add(r.lo_, lo_, hi_, MPFR_RNDN);
    mpfr_div_2ui(r.lo_, r.lo_, 1, MPFR_RNDN);
    mpfr_set(r.hi_, r.lo_, MPFR_RNDN);
    return r;
}

Scalar Scalar::width() const
{
    Scalar r(precision(), 0);
    mpfr_sub(r.hi_, hi_, lo_, MPFR_RNDU);
    mpfr_sub(r.lo_, hi_, lo_, MPFR_RNDD);
    return r;
}

Scalar Scalar::with_precision(mpfr_prec_t prec) const
{
    Scalar r(prec, 0);
    mpfr_set(r.lo_, lo_, MPFR_RNDD);
    mpfr_set(r.hi_, hi_, MPFR_RNDU);
    return r;
}

bool Scalar::is_point() const { return mpfr_equal_p(lo_, hi_) != 0; }

bool Scalar::contains(const Scalar& o) const
{
    return mpfr_lessequal_p(lo_, o.lo_) && mpfr_lessequal_p(o.hi_, hi_);
}

bool Scalar::contains_zero() const { return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0; }
bool Scalar::certainly_positive() const { return mpfr_sgn(lo_) > 0; }
bool Scalar::certainly_negative() const { return mpfr_sgn(hi_) < 0; }

std::string Scalar::to_string(int digits) const
{
    mpfr_t m;
    mpfr_init2(m, precision() + 1);
    mpfr_add(m, lo_, hi_, MPFR_RNDN);
    mpfr_div_2ui(m, m, 1, MPFR_RNDN);
    std::vector<char> buf(static_cast<size_t>(digits) + 64);
    if (mpfr_zero_p(m)) {
        mpfr_clear(m);
        return "0";
    }
    mpfr_snprintf(buf.data(), buf.size(), "%.*RNe", digits - 1, m);
    mpfr_clear(m);
    return std::string(buf.data());
}

Scalar Scalar::operator-() const
{
    Scalar r(precision(), 0);
    mpfr_neg(r.lo_, hi_, MPFR_RNDD);
    mpfr_neg(r.hi_, lo_, MPFR_RNDU);
    return r;
}

namespace {

void widen_to(mpfr_t x, mpfr_prec_t p)
{
    if (mpfr_get_prec(x) < p) mpfr_prec_round(x, p, MPFR_RNDN);
}

} // namespace

Scalar& Scalar::operator+=(const Scalar& o)
{
    widen_to(lo_, o.precision());
    widen_to(hi_, o.precision());
    mpfr_add(lo_, lo_, o.lo_, MPFR_RNDD);
    mpfr_add(hi_, hi_, o.hi_, MPFR_RNDU);
    return *this;
}

Scalar& Scalar::operator-=(const Scalar& o)
{
    widen_to(lo_, o.precision());
    widen_to(hi_, o.precision());
    if (this == &o) {
        Scalar c(o);
        return *this -= c;
    }
    mpfr_sub(lo_, lo_, o.hi_, MPFR_RNDD);
    mpfr_sub(hi_, hi_, o.lo_, MPFR_RNDU);
    return *this;
}

Scalar& Scalar::operator*=(const Scalar& o)
{
    mpfr_prec_t p = std::max(precision(), o.precision());
    if (mpfr_sgn(lo_) >= 0 && mpfr_sgn(o.lo_) >= 0) {
        widen_to(lo_, p);
        widen_to(hi_, p);
        mpfr_mul(lo_, lo_, o.lo_, MPFR_RNDD);
        mpfr_mul(hi_, hi_, o.hi_, MPFR_RNDU);
        return *this;
    }
    mpfr_t c[4];
    for (auto& x : c) mpfr_init2(x, p);
    mpfr_srcptr a[2] = {lo_, hi_};
    mpfr_srcptr b[2] = {o.lo_, o.hi_};
    Scalar r(p, 0);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) mpfr_mul(c[2 * i + j], a[i], b[j], MPFR_RNDD);
    mpfr_set(r.lo_, c[0], MPFR_RNDD);
    for (int k = 1; k < 4; ++k) mpfr_min(r.lo_, r.lo_, c[k], MPFR_RNDD);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) mpfr_mul(c[2 * i + j], a[i], b[j], MPFR_RNDU);
    mpfr_set(r.hi_, c[0], MPFR_RNDU);
    for (int k = 1; k < 4; ++k) mpfr_max(r.hi_, r.hi_, c[k], MPFR_RNDU);
    for (auto& x : c) mpfr_clear(x);
    *this = std::move(r);
    return *this;
}

Scalar& Scalar::operator/=(const Scalar& o)
{
    if (o.contains_zero()) throw AmbiguousGeometry("interval division by an enclosure of zero");
    mpfr_prec_t p = std::max(precision(), o.precision());
    mpfr_t c[4];
    for (auto& x : c) mpfr_init2(x, p);
    mpfr_srcptr a[2] = {lo_, hi_};
    mpfr_srcptr b[2] = {o.lo_, o.hi_};
    Scalar r(p, 0);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) mpfr_div(c[2 * i + j], a[i], b[j], MPFR_RNDD);
    mpfr_set(r.lo_, c[0], MPFR_RNDD);
    for (int k = 1; k < 4; ++k) mpfr_min(r.lo_, r.lo_, c[k], MPFR_RNDD);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) mpfr_div(c[2 * i + j], a[i], b[j], MPFR_RNDU);
    mpfr_set(r.hi_, c[0], MPFR_RNDU);
    for (int k = 1; k < 4; ++k) mpfr_max(r.hi_, r.hi_, c[k], MPFR_RNDU);
    for (auto& x : c) mpfr_clear(x);
    *this = std::move(r);
    return *this;
}

Scalar& Scalar::operator+=(long v)
{
    mpfr_add_si(lo_, lo_, v, MPFR_RNDD);
    mpfr_add_si(hi_, hi_, v, MPFR_RNDU);
    return *this;
}

Scalar& Scalar::operator-=(long v)
{
    mpfr_sub_si(lo_, lo_, v, MPFR_RNDD);
    mpfr_sub_si(hi_, hi_, v, MPFR_RNDU);
    return *this;
}

Scalar& Scalar::operator*=(long v)
{
    if (v >= 0) {
        mpfr_mul_si(lo_, lo_, v, MPFR_RNDD);
        mpfr_mul_si(hi_, hi_, v, MPFR_RNDU);
        return *this;
    }
    mpfr_swap(lo_, hi_);
    mpfr_mul_si(lo_, lo_, v, MPFR_RNDD);
    mpfr_mul_si(hi_, hi_, v, MPFR_RNDU);
    return *this;
}

Scalar& Scalar::operator/=(long v)
{
    if (v == 0) throw AmbiguousGeometry("division by zero");
    return *this /= Scalar(v, precision());
}

Scalar abs(const Scalar& a)
{
    if (mpfr_sgn(a.lo_) >= 0) return a;
    if (mpfr_sgn(a.hi_) <= 0) return -a;
    Scalar r(a.precision(), 0);
    mpfr_set_zero(r.lo_, 1);
    mpfr_neg(r.hi_, a.lo_, MPFR_RNDU);
    mpfr_max(r.hi_, r.hi_, a.hi_, MPFR_RNDU);
    return r;
}

Scalar pow(const Scalar& a, int n)
{
    if (n < 0) return Scalar(1, a.precision()) / pow(a, -n);
    Scalar r(1, a.precision());
    Scalar b(a);
    while (n > 0) {
        if (n & 1) r *= b;
        n >>= 1;
        if (n) b *= Scalar(b);
    }
    return r;
}

Scalar log(const Scalar& a)
{
    if (!a.certainly_positive()) throw AmbiguousGeometry("log of a non-positive enclosure");
    Scalar r(a.precision(), 0);
    mpfr_log(r.lo_, a.lo_, MPFR_RNDD);
    mpfr_log(r.hi_, a.hi_, MPFR_RNDU);
    return r;
}

long Scalar::floor_mid() const
{
    mpfr_t m;
    mpfr_init2(m, precision() + 1);
    mpfr_add(m, lo_, hi_, MPFR_RNDN);
    mpfr_div_2ui(m, m, 1, MPFR_RNDN);
    mpfr_floor(m, m);
    long k = mpfr_get_si(m, MPFR_RNDN);
    mpfr_clear(m);
    return k;
}

const char* to_string(Cmp c)
{
    switch (c) {
    case Cmp::Less: return "Less";
    case Cmp::Equal: return "Equal";
    case Cmp::Greater: return "Greater";
    case Cmp::Ambiguous: return "Ambiguous";
    }
    return "?";
}

Cmp cmp_certified(const Scalar& a, const Scalar& b, double eps)
{
    eps = eps_or_default(eps);
    if (mpfr_less_p(a.hi(), b.lo())) {
        Scalar d = b - a;
        if (eps > 0 && d.upper_d() <= eps) return Cmp::Equal;
        return Cmp::Less;
    }
    if (mpfr_greater_p(a.lo(), b.hi())) {
        Scalar d = a - b;
        if (eps > 0 && d.upper_d() <= eps) return Cmp::Equal;
        return Cmp::Greater;
    }
    if (a.is_point() && b.is_point()) return Cmp::Equal;
    Scalar d = abs(a - b);
    if (d.upper_d() <= eps) return Cmp::Equal;
    return Cmp::Ambiguous;
}

Scalar frac(const Scalar& x)
{
    Scalar r = x - x.floor_mid();
    if (mpfr_cmp_si(r.hi(), 1) >= 0) r -= 1;
    return r;
}

Scalar circle_diff(const Scalar& x, const Scalar& y) { return frac(x - y); }

CirclePoint::CirclePoint(const Scalar& v) : v_(frac(v)) {}

CirclePoint CirclePoint::from_string(std::string_view decimal, mpfr_prec_t prec)
{
    return CirclePoint(Scalar::from_string(decimal, prec));
}

bool CirclePoint::straddles_zero() const { return mpfr_sgn(v_.lo()) < 0; }

double CirclePoint::to_double() const
{
    double d = v_.mid_d();
    if (d < 0) d += 1.0;
    if (d >= 1.0) d -= 1.0;
    return d;
}

std::string CirclePoint::to_string(int digits) const
{
    if (straddles_zero()) return (v_ + 1).to_string(digits);
    return v_.to_string(digits);
}

Scalar circle_distance(const CirclePoint& a, const CirclePoint& b)
{
    Scalar d = circle_diff(a.value(), b.value());
    if (mpfr_sgn(d.lo()) < 0) return abs(d);
    return Scalar::min(d, 1 - d);
}

const char* to_string(Where w)
{
    switch (w) {
    case Where::Inside: return "Inside";
    case Where::Outside: return "Outside";
    case Where::Boundary: return "Boundary";
    case Where::Ambiguous: return "Ambiguous";
    }
    return "?";
}

Where in_interval(const Scalar& x, const Scalar& a, const Scalar& b, double eps)
{
    eps = eps_or_default(eps);
    Scalar len = circle_diff(b, a);
    if (abs(len).upper_d() <= eps)
        throw DegenerateInterval("interval endpoints coincide");
    if (len.contains_zero()) throw AmbiguousGeometry("interval length not separated from 0");
    Scalar d = circle_diff(x, a);
    if (abs(d).upper_d() <= eps) return Where::Boundary;
    if (mpfr_sgn(d.lo()) < 0) return Where::Ambiguous;
    Scalar gap = len - d;
    if (abs(gap).upper_d() <= eps) return Where::Outside;
    if (gap.certainly_positive()) return Where::Inside;
    if (gap.certainly_negative()) return Where::Outside;
    return Where::Ambiguous;
}

Where in_interval(const CirclePoint& x, const CirclePoint& a, const CirclePoint& b, double eps)
{
    return in_interval(x.value(), a.value(), b.value(), eps);
}

} // namespace bsl
