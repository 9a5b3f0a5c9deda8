#pragma once

#include <mpfr.h>

#include <string>
#include <string_view>

namespace bsl {

// Working precision used when a constructor is given precision 0.
mpfr_prec_t default_precision();
void set_default_precision(mpfr_prec_t bits);

// Tolerance used by certified Equal decisions when none is supplied.
double default_epsilon();
void set_default_epsilon(double eps);

struct PrecisionSchedule {
    mpfr_prec_t start = 128;
    mpfr_prec_t max = 2048;
    double epsilon = 1e-30;
};

// Closed interval [lower, upper] with outward-rounded arithmetic.
class Scalar {
public:
    Scalar();
    explicit Scalar(long v, mpfr_prec_t prec = 0);
    Scalar(const Scalar& o);
    Scalar(Scalar&& o) noexcept;
    Scalar& operator=(const Scalar& o);
    Scalar& operator=(Scalar&& o) noexcept;
    ~Scalar();

    static Scalar from_string(std::string_view decimal, mpfr_prec_t prec = 0);
    static Scalar from_ratio(long num, long den, mpfr_prec_t prec = 0);
    static Scalar from_double(double v, mpfr_prec_t prec = 0);
    static Scalar from_bounds(std::string_view lo, std::string_view hi, mpfr_prec_t prec = 0);
    static Scalar hull(const Scalar& a, const Scalar& b);
    static Scalar min(const Scalar& a, const Scalar& b);
    static Scalar max(const Scalar& a, const Scalar& b);

    mpfr_prec_t precision() const { return mpfr_get_prec(lo_); }
    mpfr_srcptr lo() const { return lo_; }
    mpfr_srcptr hi() const { return hi_; }
    double lower_d() const;
    double upper_d() const;
    double mid_d() const;
    double width_d() const;
    Scalar mid() const;
    Scalar width() const;
    Scalar with_precision(mpfr_prec_t prec) const;

    bool is_point() const;
    bool contains(const Scalar& o) const;
    bool contains_zero() const;
    bool certainly_positive() const;
    bool certainly_negative() const;

    // Decimal midpoint with `digits` significant digits, fixed notation.
    std::string to_string(int digits = 40) const;

    Scalar operator-() const;
    Scalar& operator+=(const Scalar& o);
    Scalar& operator-=(const Scalar& o);
    Scalar& operator*=(const Scalar& o);
    Scalar& operator/=(const Scalar& o);
    Scalar& operator+=(long v);
    Scalar& operator-=(long v);
    Scalar& operator*=(long v);
    Scalar& operator/=(long v);

    friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
    friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
    friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
    friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }
    friend Scalar operator+(Scalar a, long b) { return a += b; }
    friend Scalar operator-(Scalar a, long b) { return a -= b; }
    friend Scalar operator*(Scalar a, long b) { return a *= b; }
    friend Scalar operator/(Scalar a, long b) { return a /= b; }
    friend Scalar operator+(long a, Scalar b) { return b += a; }
    friend Scalar operator-(long a, const Scalar& b) { return Scalar(a, b.precision()) -= b; }
    friend Scalar operator*(long a, Scalar b) { return b *= a; }
    friend Scalar operator/(long a, const Scalar& b) { return Scalar(a, b.precision()) /= b; }

    friend Scalar abs(const Scalar& a);
    friend Scalar pow(const Scalar& a, int n);
    friend Scalar log(const Scalar& a);

    // Floor of the midpoint; used for mod-1 reduction.
    long floor_mid() const;

private:
    explicit Scalar(mpfr_prec_t prec, int);
    mpfr_t lo_;
    mpfr_t hi_;
};

enum class Cmp { Less, Equal, Greater, Ambiguous };
const char* to_string(Cmp c);

Cmp cmp_certified(const Scalar& a, const Scalar& b, double eps = -1.0);

// Point of S^1 = [0,1). The stored value lies in [0,1) unless the enclosure
// straddles 0, in which case lower < 0 <= upper.
class CirclePoint {
public:
    CirclePoint() = default;
    explicit CirclePoint(const Scalar& v);
    static CirclePoint from_string(std::string_view decimal, mpfr_prec_t prec = 0);

    const Scalar& value() const { return v_; }
    bool straddles_zero() const;
    double to_double() const;
    std::string to_string(int digits = 40) const;

private:
    Scalar v_;
};

// Representative of x - y mod 1 in [0,1), or an enclosure straddling 0.
Scalar circle_diff(const Scalar& x, const Scalar& y);
Scalar frac(const Scalar& x);

Scalar circle_distance(const CirclePoint& a, const CirclePoint& b);

enum class Where { Inside, Outside, Boundary, Ambiguous };
const char* to_string(Where w);

// Classification of x against the half-open circular interval [a, b).
Where in_interval(const CirclePoint& x, const CirclePoint& a, const CirclePoint& b,
                  double eps = -1.0);
Where in_interval(const Scalar& x, const Scalar& a, const Scalar& b, double eps = -1.0);

} // namespace bsl
