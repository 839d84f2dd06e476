#include <doctest.h>

#include <cmath>

#include "bdk/qspecial.hpp"

using namespace bdk;
using namespace bdk::qspecial;
using P = SeriesParam<double>;

TEST_CASE("pochhammer basics") {
    CHECK(pochhammer(3.0, 0) == 1.0);
    CHECK(pochhammer(3.0, 2) == 12.0);
    CHECK(pochhammer(-2.0, 4) == 0.0);
}

TEST_CASE("q_pochhammer basics") {
    CHECK(q_pochhammer(0.5, 0.5, 0) == 1.0);
    CHECK(q_pochhammer(0.5, 0.5, 1) == doctest::Approx(0.5));
    CHECK(q_pochhammer(1.0, 0.9, 3) == 0.0);
    CHECK_THROWS_AS(q_pochhammer(0.5, 1.0, 2), Error);
    CHECK_THROWS_AS(q_pochhammer(0.5, -0.1, 2), Error);
    CHECK_THROWS_AS(q_pochhammer_infinite(0.5, 1.5), Error);
}

TEST_CASE("pochhammer step identities up to n=50") {
    for (double a : {-3.5, -0.25, 0.3, 1.0, 2.75}) {
        for (unsigned n = 0; n < 50; ++n) {
            const double lhs = pochhammer(a, n + 1);
            const double rhs = pochhammer(a, n) * (a + n);
            CHECK(std::fabs(lhs - rhs) <= 1e-14 * std::fabs(lhs));
        }
    }
    for (double a : {-2.0, 0.1, 0.7, 3.0}) {
        for (double q : {0.1, 0.5, 0.9}) {
            for (unsigned n = 0; n < 50; ++n) {
                const double lhs = q_pochhammer(a, q, n + 1);
                const double rhs = q_pochhammer(a, q, n) * (1 - a * std::pow(q, n));
                CHECK(std::fabs(lhs - rhs) <= 1e-14 * std::fabs(lhs));
            }
        }
    }
}

TEST_CASE("q_pochhammer at infinity") {
    // Euler: (q;q)_inf for q = 0.5
    CHECK(q_pochhammer_infinite(0.5, 0.5) == doctest::Approx(0.2887880950866024).epsilon(1e-15));
    // (a;q)_inf = (a;q)_n (aq^n;q)_inf
    const double a = 0.3, q = 0.7;
    const double lhs = q_pochhammer_infinite(a, q);
    const double rhs = q_pochhammer(a, q, 7) * q_pochhammer_infinite(a * std::pow(q, 7), q);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));
}

TEST_CASE("q to 1 limit of the q-Pochhammer") {
    const double q = 1 - 1e-4;
    for (double a : {0.5, 1.5, 3.0}) {
        for (unsigned n : {1u, 2u, 4u}) {
            const double lhs = q_pochhammer(std::pow(q, a), q, n) / std::pow(1 - q, n);
            CHECK(lhs == doctest::Approx(pochhammer(a, n)).epsilon(1e-3));
        }
    }
}

TEST_CASE("log-space products agree with direct products") {
    for (double a : {-4.5, 0.2, 1.7, 9.0}) {
        for (unsigned n : {0u, 3u, 17u, 40u}) {
            SignedLog<double> s;
            s.mul_poch(a, n);
            CHECK(s.value() == doctest::Approx(pochhammer(a, n)).epsilon(1e-12));
            SignedLog<double> t;
            t.mul_qpoch(a, 0.6, n);
            CHECK(t.value() == doctest::Approx(q_pochhammer(a, 0.6, n)).epsilon(1e-12));
        }
    }
    SignedLog<double> z;
    z.mul_poch(-2.0, 4);
    CHECK(z.value() == 0.0);
    // 300! overflows binary64 but its log does not
    SignedLog<double> big;
    big.mul_poch(1.0, 300);
    CHECK(big.log_abs == doctest::Approx(std::lgamma(301.0)).epsilon(1e-13));
}

TEST_CASE("hypergeometric series") {
    SeriesParams<double> k;  // Krawtchouk P_1 at x=1, N=4, p=0.5
    k.numerator = {P::negative_integer(1), P::negative_integer(1)};
    k.denominator = {P::negative_integer(4)};
    k.z = 2.0;
    const auto r = hypergeometric(k);
    CHECK(r.terminating);
    CHECK(r.terms == 2);
    CHECK(r.value == doctest::Approx(0.5));

    SeriesParams<double> z0{{P::plain(0.3), P::plain(1.2)}, {P::plain(2.5)}, 0.0, std::nullopt};
    CHECK(hypergeometric(z0).value == 1.0);

    SeriesParams<double> c0{{P::negative_integer(0), P::negative_integer(3)}, {}, -0.5, std::nullopt};
    CHECK(hypergeometric(c0).value == 1.0);
    CHECK(hypergeometric(c0).terms == 1);
}

TEST_CASE("non-terminating series and the convergence flag") {
    SeriesParams<double> e{{}, {}, 1.0, std::nullopt};  // 0F0(;;1) = e
    const auto r = hypergeometric(e);
    CHECK_FALSE(r.terminating);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(std::exp(1.0)).epsilon(1e-15));

    SeriesParams<double> slow{{P::plain(1.0), P::plain(1.0)}, {P::plain(2.0)}, 1.0, std::nullopt};  // divergent
    SeriesOptions opt;
    opt.max_terms = 200;
    CHECK_FALSE(hypergeometric(slow, opt).converged);
}

TEST_CASE("terminating sum ignores the term cap") {
    SeriesParams<double> s{{P::negative_integer(30), P::plain(0.7)}, {P::plain(1.3)}, 0.4, std::nullopt};
    SeriesOptions small;
    small.max_terms = 3;
    CHECK(hypergeometric(s, small).value == hypergeometric(s).value);
    CHECK(hypergeometric(s, small).terms == 31);
}

TEST_CASE("pole before termination") {
    SeriesParams<double> s{{P::negative_integer(3)}, {P::negative_integer(2)}, 1.0, std::nullopt};
    CHECK_THROWS_AS(hypergeometric(s), Error);
    SeriesParams<double> ok{{P::negative_integer(2)}, {P::negative_integer(2)}, 1.0, std::nullopt};
    CHECK_NOTHROW(hypergeometric(ok));
    SeriesParams<double> zero_lower{{P::plain(1.0)}, {P::plain(0.0)}, 0.5, std::nullopt};
    CHECK_THROWS_AS(hypergeometric(zero_lower), Error);
    try {
        hypergeometric(s);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::series_pole);
    }
}

TEST_CASE("basic hypergeometric series") {
    const double q = 0.5;
    SeriesParams<double> s;
    s.numerator = {P::q_negative_power(q, 1), P::q_negative_power(q, 1)};
    s.denominator = {P::q_negative_power(q, 2)};
    s.z = q;
    s.q = q;
    const auto r = basic_hypergeometric(s);
    CHECK(r.terminating);
    CHECK(r.value == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

    SeriesParams<double> z0{{P::plain(0.2)}, {}, 0.0, q};
    CHECK(basic_hypergeometric(z0).value == 1.0);

    SeriesParams<double> noq{{P::plain(0.2)}, {}, 0.1, std::nullopt};
    CHECK_THROWS_AS(basic_hypergeometric(noq), Error);
    SeriesParams<double> badq{{P::plain(0.2)}, {}, 0.1, 1.0};
    CHECK_THROWS_AS(basic_hypergeometric(badq), Error);
}

TEST_CASE("basic series closed forms") {
    const double q = 0.3, a = 0.4, z = 0.2;
    // q-binomial theorem: 1phi0(a;-;q,z) = (az;q)_inf / (z;q)_inf
    SeriesParams<double> b{{P::plain(a)}, {}, z, q};
    CHECK(basic_hypergeometric(b).value ==
          doctest::Approx(q_pochhammer_infinite(a * z, q) / q_pochhammer_infinite(z, q)).epsilon(1e-14));
    // Euler: 0phi0(-;-;q,z) = (z;q)_inf, which exercises the balancing factor
    SeriesParams<double> e{{}, {}, z, q};
    CHECK(basic_hypergeometric(e).value == doctest::Approx(q_pochhammer_infinite(z, q)).epsilon(1e-14));
    // q-Chu-Vandermonde: 2phi1(q^-n, b; c; q, q) = (c/b;q)_n b^n / (c;q)_n
    const unsigned n = 5;
    const double bb = 0.35, c = 0.8;
    SeriesParams<double> v{{P::q_negative_power(q, n), P::plain(bb)}, {P::plain(c)}, q, q};
    const auto r = basic_hypergeometric(v);
    const double expected = q_pochhammer(c / bb, q, n) * std::pow(bb, n) / q_pochhammer(c, q, n);
    CHECK(std::fabs(r.value - expected) <= 8 * r.terms * 2.3e-16 * r.abs_sum);
}

TEST_CASE("templated series at higher precision") {
    using T = precision::Tier80;
    const T q = T(1) / 2;
    SeriesParams<T> s;
    s.numerator = {SeriesParam<T>::q_negative_power(q, 1), SeriesParam<T>::q_negative_power(q, 1)};
    s.denominator = {SeriesParam<T>::q_negative_power(q, 2)};
    s.z = q;
    s.q = q;
    const T v = basic_hypergeometric(s).value;
    CHECK(abs(v - T(2) / 3) < T(1e-75));
}

TEST_CASE("accurate_series escalates past cancellation") {
    // 1F0(-m;;x) = (1-x)^m with heavy cancellation for x near 1 and large m
    const unsigned m = 60;
    const double x = 1.25;
    auto build = [&]<class R>() {
        SeriesParams<R> s{{SeriesParam<R>::negative_integer(m)}, {}, R(x), std::nullopt};
        return hypergeometric(s);
    };
    const auto lowprec = hypergeometric(SeriesParams<double>{{P::negative_integer(m)}, {}, x, std::nullopt});
    CHECK(lowprec.condition() > 1e15);
    const AccurateValue v = accurate_series(build);
    CHECK(v.certified);
    CHECK(v.digits10 > 40);
    CHECK(static_cast<double>(v.value) == doctest::Approx(std::pow(-0.25, m)).epsilon(1e-15));
}
