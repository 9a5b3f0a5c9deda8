#include "doctest.h"

#include "bsl/errors.hpp"
#include "bsl/scalar.hpp"

#include <random>

using namespace bsl;

TEST_SUITE("certified_arith") {

TEST_CASE("cmp of identical rationals is Equal")
{
    Scalar a = Scalar::from_ratio(1, 3);
    Scalar b = Scalar::from_ratio(1, 3);
    CHECK(cmp_certified(a, b) == Cmp::Equal);
    CHECK(cmp_certified(Scalar(3), Scalar(3), 0.0) == Cmp::Equal);
}

TEST_CASE("separated enclosures compare strictly")
{
    Scalar a = Scalar::from_bounds("0.249999999999999999999999999999", "0.250000000000000000000000000001");
    Scalar b = Scalar::from_bounds("0.749999999999999999999999999999", "0.750000000000000000000000000001");
    CHECK(cmp_certified(a, b) == Cmp::Less);
    CHECK(cmp_certified(b, a) == Cmp::Greater);
}

TEST_CASE("overlapping wide enclosures are Ambiguous")
{
    Scalar x = Scalar::from_bounds("0.4995", "0.5005");
    Scalar y = Scalar::from_bounds("0.4996", "0.5006");
    CHECK(cmp_certified(x, y) == Cmp::Ambiguous);
}

TEST_CASE("tolerance certifies coincidence")
{
    Scalar x = Scalar::from_string("0.5");
    Scalar y = x + Scalar::from_string("1e-40");
    CHECK(cmp_certified(x, y, 1e-30) == Cmp::Equal);
    CHECK(cmp_certified(x, y, 0.0) == Cmp::Less);
}

TEST_CASE("circle distance")
{
    auto p = [](const char* s) { return CirclePoint::from_string(s); };
    CHECK(circle_distance(p("0.1"), p("0.9")).mid_d() == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(circle_distance(p("0.9"), p("0.1")).mid_d() == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(circle_distance(p("0.3"), p("0.3")).upper_d() <= 1e-70);
    CHECK(circle_distance(p("0.0"), p("0.5")).mid_d() == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("half-open interval classification")
{
    auto p = [](const char* s) { return CirclePoint::from_string(s); };
    CHECK(in_interval(p("0.2"), p("0.1"), p("0.3")) == Where::Inside);
    CHECK(in_interval(p("0.1"), p("0.1"), p("0.3")) == Where::Boundary);
    CHECK(in_interval(p("0.3"), p("0.1"), p("0.3")) == Where::Outside);
    CHECK(in_interval(p("0.95"), p("0.9"), p("0.1")) == Where::Inside);
    CHECK(in_interval(p("0.05"), p("0.9"), p("0.1")) == Where::Inside);
    CHECK(in_interval(p("0.5"), p("0.9"), p("0.1")) == Where::Outside);
    CHECK_THROWS_AS(in_interval(p("0.5"), p("0.2"), p("0.2")), DegenerateInterval);
}

TEST_CASE("enclosure property on random expressions")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int t = 0; t < 200; ++t) {
        double a = u(rng), b = u(rng), c = u(rng);
        if (std::abs(c) < 1e-3) continue;
        Scalar A = Scalar::from_double(a, 64), B = Scalar::from_double(b, 64),
               C = Scalar::from_double(c, 64);
        Scalar r = (A * B - C) / C + A * 3 - 2;
        long double exact = ((long double)a * b - c) / c + (long double)a * 3 - 2;
        CHECK(r.lower_d() <= (double)exact + 1e-12);
        CHECK(r.upper_d() >= (double)exact - 1e-12);
        Scalar n = A * (-5);
        CHECK(n.lower_d() <= -5 * a);
        CHECK(n.upper_d() >= -5 * a);
    }
}

TEST_CASE("raising precision never widens")
{
    for (mpfr_prec_t p : {64, 128, 256, 512}) {
        Scalar third = Scalar::from_ratio(1, 3, p);
        Scalar third2 = Scalar::from_ratio(1, 3, 2 * p);
        Scalar e1 = pow(third * 7 + 1, 5);
        Scalar e2 = pow(third2 * 7 + 1, 5);
        CHECK(e1.contains(e2));
        CHECK(e2.width_d() <= e1.width_d());
    }
}

TEST_CASE("reproducible at fixed precision")
{
    Scalar a = pow(Scalar::from_ratio(22, 7, 200), 9) / 13;
    Scalar b = pow(Scalar::from_ratio(22, 7, 200), 9) / 13;
    CHECK(a.to_string(50) == b.to_string(50));
    CHECK(mpfr_equal_p(a.lo(), b.lo()));
}

} // TEST_SUITE
