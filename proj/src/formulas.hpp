#pragma once

// Closed forms of every family, generic in the scalar type so that rates,
// series and recurrences can be re-run in a higher precision tier.

#include <cmath>

#include "bdk/models.hpp"
#include "bdk/qspecial.hpp"

namespace bdk::detail {

using qspecial::SeriesParam;
using qspecial::SeriesParams;
using qspecial::SeriesResult;
using qspecial::SignedLog;

template <class R>
struct Formulas {
    Family f;
    int N;
    R q, a, b, c, d, dt, p, beta;

    explicit Formulas(const ParamPack& k)
        : f(k.family), N(k.N), q(k.q), a(k.a), b(k.b), c(k.c), d(k.d), dt(0), p(k.p), beta(k.beta) {
        if (f == Family::racah) {
            c = R(-N);
            dt = a + b + c - d - R(1);
        } else if (f == Family::q_racah) {
            c = qn(-N);
            dt = a * b * c / (d * q);
        }
    }

    R qn(long e) const { return precision::ipow(q, e); }
    static R one() { return R(1); }

    R birth(long x) const {
        const R X(x);
        switch (f) {
            case Family::racah:
                return -(X + a) * (X + b) * (X + c) * (X + d) / ((R(2) * X + d) * (R(2) * X + R(1) + d));
            case Family::hahn: return (X + a) * (R(N) - X);
            case Family::dual_hahn:
                return (X + a) * (X + a + b - R(1)) * (R(N) - X) /
                       ((R(2) * X - R(1) + a + b) * (R(2) * X + a + b));
            case Family::krawtchouk: return p * (R(N) - X);
            case Family::q_racah: {
                const R qx = qn(x);
                return -(one() - a * qx) * (one() - b * qx) * (one() - c * qx) * (one() - d * qx) /
                       ((one() - d * qn(2 * x)) * (one() - d * qn(2 * x + 1)));
            }
            case Family::q_hahn: return (one() - a * qn(x)) * (qn(x - N) - one());
            case Family::dual_q_hahn:
                return (qn(x - N) - one()) * (one() - a * qn(x)) * (one() - a * b * qn(x - 1)) /
                       ((one() - a * b * qn(2 * x - 1)) * (one() - a * b * qn(2 * x)));
            case Family::quantum_q_krawtchouk: return qn(x) / p * (qn(x - N) - one());
            case Family::q_krawtchouk: return qn(x - N) - one();
            case Family::affine_q_krawtchouk: return (qn(x - N) - one()) * (one() - p * qn(x + 1));
            case Family::meixner: return c * (X + beta) / (one() - c);
            case Family::charlier: return a;
            case Family::little_q_jacobi: return a * (qn(-x) - b * q);
            case Family::q_meixner: return c * qn(x) * (one() - b * qn(x + 1));
            case Family::little_q_laguerre: return a * qn(-x);
            case Family::al_salam_carlitz_ii: return a * qn(2 * x + 1);
            case Family::alternative_q_charlier: return a;
            case Family::q_charlier: return a * qn(x);
        }
        return R(0);
    }

    R death(long x) const {
        const R X(x);
        switch (f) {
            case Family::racah:
                return -(X + d - a) * (X + d - b) * (X + d - c) * X / ((R(2) * X - R(1) + d) * (R(2) * X + d));
            case Family::hahn: return X * (b + R(N) - X);
            case Family::dual_hahn:
                return X * (X + b - R(1)) * (X + a + b + R(N) - R(1)) /
                       ((R(2) * X - R(2) + a + b) * (R(2) * X - R(1) + a + b));
            case Family::krawtchouk: return (one() - p) * X;
            case Family::q_racah: {
                const R qx = qn(x);
                return -dt * (one() - d / a * qx) * (one() - d / b * qx) * (one() - d / c * qx) * (one() - qx) /
                       ((one() - d * qn(2 * x - 1)) * (one() - d * qn(2 * x)));
            }
            case Family::q_hahn: return a / q * (one() - qn(x)) * (qn(x - N) - b);
            case Family::dual_q_hahn:
                return a * qn(x - N - 1) * (one() - qn(x)) * (one() - a * b * qn(x + N - 1)) *
                       (one() - b * qn(x - 1)) / ((one() - a * b * qn(2 * x - 2)) * (one() - a * b * qn(2 * x - 1)));
            case Family::quantum_q_krawtchouk: return (one() - qn(x)) * (one() - qn(x - N - 1) / p);
            case Family::q_krawtchouk: return p * (one() - qn(x));
            case Family::affine_q_krawtchouk: return p * qn(x - N) * (one() - qn(x));
            case Family::meixner: return X / (one() - c);
            case Family::charlier: return X;
            case Family::little_q_jacobi: return qn(-x) - one();
            case Family::q_meixner: return (one() - qn(x)) * (one() + b * c * qn(x));
            case Family::little_q_laguerre: return qn(-x) - one();
            case Family::al_salam_carlitz_ii: return (one() - qn(x)) * (one() - a * qn(x));
            case Family::alternative_q_charlier: return qn(-x) - one();
            case Family::q_charlier: return one() - qn(x);
        }
        return R(0);
    }

    R energy(long n) const {
        const R Nn(n);
        switch (f) {
            case Family::racah: return Nn * (Nn + dt);
            case Family::hahn: return Nn * (Nn + a + b - R(1));
            case Family::dual_hahn:
            case Family::krawtchouk:
            case Family::meixner:
            case Family::charlier: return Nn;
            case Family::q_racah: return (qn(-n) - one()) * (one() - dt * qn(n));
            case Family::q_hahn: return (qn(-n) - one()) * (one() - a * b * qn(n - 1));
            case Family::dual_q_hahn:
            case Family::affine_q_krawtchouk:
            case Family::little_q_laguerre: return qn(-n) - one();
            case Family::q_krawtchouk: return (qn(-n) - one()) * (one() + p * qn(n));
            case Family::little_q_jacobi: return (qn(-n) - one()) * (one() - a * b * qn(n + 1));
            case Family::alternative_q_charlier: return (qn(-n) - one()) * (one() + a * qn(n));
            case Family::quantum_q_krawtchouk:
            case Family::q_meixner:
            case Family::al_salam_carlitz_ii:
            case Family::q_charlier: return one() - qn(n);
        }
        return R(0);
    }

    R eta(long x) const {
        const R X(x);
        switch (f) {
            case Family::racah: return X * (X + d);
            case Family::hahn:
            case Family::krawtchouk:
            case Family::meixner:
            case Family::charlier: return X;
            case Family::dual_hahn: return X * (X + a + b - R(1));
            case Family::q_racah: return (qn(-x) - one()) * (one() - d * qn(x));
            case Family::dual_q_hahn: return (qn(-x) - one()) * (one() - a * b * qn(x - 1));
            case Family::q_hahn:
            case Family::quantum_q_krawtchouk:
            case Family::q_krawtchouk:
            case Family::affine_q_krawtchouk:
            case Family::q_meixner:
            case Family::al_salam_carlitz_ii:
            case Family::q_charlier: return qn(-x) - one();
            case Family::little_q_jacobi:
            case Family::little_q_laguerre:
            case Family::alternative_q_charlier: return one() - qn(x);
        }
        return R(0);
    }

    // -- log-space products ------------------------------------------------

    static void binom(SignedLog<R>& s, long n, long k) {
        s.mul_poch(R(1), n).div_poch(R(1), k).div_poch(R(1), n - k);
    }
    void qbinom(SignedLog<R>& s, long n, long k) const {
        s.mul_qpoch(q, q, n).div_qpoch(q, q, k).div_qpoch(q, q, n - k);
    }
    // (u)_m (2m+u)/u, finite at u = 0 because (u)_m/u = (u+1)_{m-1}
    static void balanced(SignedLog<R>& s, const R& u, long m) {
        if (m == 0) return;
        s.mul_poch(u + R(1), m - 1).mul(R(2 * m) + u);
    }
    // (u;q)_m (1-u q^{2m})/(1-u)
    void q_balanced(SignedLog<R>& s, const R& u, long m) const {
        if (m == 0) return;
        s.mul_qpoch(u * q, q, m - 1).mul(one() - u * qn(2 * m));
    }
    // (2m+u-1)/(m+u-1)_{N+1}, finite at m = 0, u = 1
    void hahn_ratio(SignedLog<R>& s, const R& u, long m) const {
        if (m == 0) {
            s.div_poch(u, N);
            return;
        }
        s.mul(R(2 * m) + u - R(1)).div_poch(R(m) + u - R(1), N + 1);
    }
    static void mul_inf(SignedLog<R>& s, const R& v, const R& q) { s.mul(qspecial::q_pochhammer_infinite(v, q)); }
    static void div_inf(SignedLog<R>& s, const R& v, const R& q) { s.div(qspecial::q_pochhammer_infinite(v, q)); }

    SignedLog<R> ground_state_sq(long x) const {
        SignedLog<R> s;
        switch (f) {
            case Family::racah:
                s.mul_poch(a, x).mul_poch(b, x).mul_poch(c, x);
                balanced(s, d, x);
                s.div_poch(R(1) + d - a, x).div_poch(R(1) + d - b, x).div_poch(R(1) + d - c, x).div_poch(R(1), x);
                break;
            case Family::hahn:
                binom(s, N, x);
                s.mul_poch(a, x).mul_poch(b, N - x).div_poch(b, N);
                break;
            case Family::dual_hahn:
                binom(s, N, x);
                s.mul_poch(a, x).mul_poch(a + b, N).div_poch(b, x);
                hahn_ratio(s, a + b, x);
                break;
            case Family::krawtchouk:
                binom(s, N, x);
                s.mul_pow(p / (one() - p), x);
                break;
            case Family::q_racah:
                s.mul_qpoch(a, q, x).mul_qpoch(b, q, x).mul_qpoch(c, q, x);
                q_balanced(s, d, x);
                s.div_qpoch(d * q / a, q, x).div_qpoch(d * q / b, q, x).div_qpoch(d * q / c, q, x);
                s.div_qpoch(q, q, x).mul_pow(dt, -x);
                break;
            case Family::q_hahn:
                qbinom(s, N, x);
                s.mul_qpoch(a, q, x).mul_qpoch(b, q, N - x).div_qpoch(b, q, N).mul_pow(a, -x);
                break;
            case Family::dual_q_hahn:
                qbinom(s, N, x);
                s.mul_qpoch(a, q, x);
                q_balanced(s, a * b / q, x);
                s.div_qpoch(a * b * qn(N), q, x).div_qpoch(b, q, x).mul_pow(a, -x);
                break;
            case Family::quantum_q_krawtchouk:
                qbinom(s, N, x);
                s.mul_pow(p, -x).mul_pow(q, x * (x - 1 - N)).div_qpoch(qn(-N) / p, q, x);
                break;
            case Family::q_krawtchouk:
                qbinom(s, N, x);
                s.mul_pow(p, -x).mul_pow(q, x * (x - 1) / 2 - x * N);
                break;
            case Family::affine_q_krawtchouk:
                qbinom(s, N, x);
                s.mul_qpoch(p * q, q, x).mul_pow(p * q, -x);
                break;
            case Family::meixner: s.mul_poch(beta, x).mul_pow(c, x).div_poch(R(1), x); break;
            case Family::charlier: s.mul_pow(a, x).div_poch(R(1), x); break;
            case Family::little_q_jacobi: s.mul_qpoch(b * q, q, x).div_qpoch(q, q, x).mul_pow(a * q, x); break;
            case Family::q_meixner:
                s.mul_qpoch(b * q, q, x).div_qpoch(q, q, x).div_qpoch(-b * c * q, q, x);
                s.mul_pow(c, x).mul_pow(q, x * (x - 1) / 2);
                break;
            case Family::little_q_laguerre: s.mul_pow(a * q, x).div_qpoch(q, q, x); break;
            case Family::al_salam_carlitz_ii:
                s.mul_pow(a, x).mul_pow(q, x * x).div_qpoch(q, q, x).div_qpoch(a * q, q, x);
                break;
            case Family::alternative_q_charlier: s.mul_pow(a, x).mul_pow(q, x * (x + 1) / 2).div_qpoch(q, q, x); break;
            case Family::q_charlier: s.mul_pow(a, x).mul_pow(q, x * (x - 1) / 2).div_qpoch(q, q, x); break;
        }
        return s;
    }

    SignedLog<R> norm_const_sq(long n) const {
        using std::log;
        SignedLog<R> s;
        switch (f) {
            case Family::racah:
                s.mul_poch(a, n).mul_poch(b, n).mul_poch(c, n);
                balanced(s, dt, n);
                s.div_poch(R(1) + dt - a, n).div_poch(R(1) + dt - b, n).div_poch(R(1) + dt - c, n);
                s.div_poch(R(1), n);
                s.mul_pow(R(-1), N).mul_poch(R(1) + d - a, N).mul_poch(R(1) + d - b, N).mul_poch(R(1) + d - c, N);
                s.div_poch(dt + R(1), N).div_poch(d + R(1), 2 * N);
                break;
            case Family::hahn:
                binom(s, N, n);
                s.mul_poch(a, n).mul_poch(a + b, N).div_poch(b, n);
                hahn_ratio(s, a + b, n);
                s.mul_poch(b, N).div_poch(a + b, N);
                break;
            case Family::dual_hahn:
                binom(s, N, n);
                s.mul_poch(a, n).mul_poch(b, N - n).div_poch(b, N);
                s.mul_poch(b, N).div_poch(a + b, N);
                break;
            case Family::krawtchouk:
                binom(s, N, n);
                s.mul_pow(p / (one() - p), n).mul_pow(one() - p, N);
                break;
            case Family::q_racah:
                s.mul_qpoch(a, q, n).mul_qpoch(b, q, n).mul_qpoch(c, q, n);
                q_balanced(s, dt, n);
                s.div_qpoch(dt * q / a, q, n).div_qpoch(dt * q / b, q, n).div_qpoch(dt * q / c, q, n);
                s.div_qpoch(q, q, n).mul_pow(d, -n);
                s.mul_pow(R(-1), N).mul_qpoch(d * q / a, q, N).mul_qpoch(d * q / b, q, N).mul_qpoch(d * q / c, q, N);
                s.mul_pow(dt, N).mul_pow(q, static_cast<long>(N) * (N + 1) / 2);
                s.div_qpoch(dt * q, q, N).div_qpoch(d * q, q, 2 * N);
                break;
            case Family::q_hahn:
                qbinom(s, N, n);
                s.mul_qpoch(a, q, n);
                q_balanced(s, a * b / q, n);
                s.div_qpoch(a * b * qn(N), q, n).div_qpoch(b, q, n).mul_pow(a, -n);
                s.mul_qpoch(b, q, N).mul_pow(a, N).div_qpoch(a * b, q, N);
                break;
            case Family::dual_q_hahn:
                qbinom(s, N, n);
                s.mul_qpoch(a, q, n).mul_qpoch(b, q, N - n).div_qpoch(b, q, N).mul_pow(a, -n);
                s.mul_qpoch(b, q, N).mul_pow(a, N).div_qpoch(a * b, q, N);
                break;
            case Family::quantum_q_krawtchouk:
                qbinom(s, N, n);
                s.mul_pow(p, -n).mul_pow(q, -static_cast<long>(N) * n).div_qpoch(qn(-n) / p, q, n);
                s.mul_qpoch(qn(-N) / p, q, N);
                break;
            case Family::q_krawtchouk:
                qbinom(s, N, n);
                s.mul_qpoch(-p, q, n).div_qpoch(-p * qn(N + 1), q, n).mul_pow(p, -n).mul_pow(q, -n * (n + 1) / 2);
                s.mul(one() + p * qn(2 * n)).div(one() + p);
                s.mul_pow(p, N).mul_pow(q, static_cast<long>(N) * (N + 1) / 2).div_qpoch(-p * q, q, N);
                break;
            case Family::affine_q_krawtchouk:
                qbinom(s, N, n);
                s.mul_qpoch(p * q, q, n).mul_pow(p * q, N - n);
                break;
            case Family::meixner:
                s.mul_poch(beta, n).mul_pow(c, n).div_poch(R(1), n);
                s.log_abs += beta * log(one() - c);
                break;
            case Family::charlier:
                s.mul_pow(a, n).div_poch(R(1), n);
                s.log_abs -= a;
                break;
            case Family::little_q_jacobi:
                s.mul_qpoch(b * q, q, n);
                q_balanced(s, a * b * q, n);
                s.mul_pow(a, n).mul_pow(q, n * n).div_qpoch(q, q, n).div_qpoch(a * q, q, n);
                mul_inf(s, a * q, q);
                div_inf(s, a * b * q * q, q);
                break;
            case Family::q_meixner:
                // carries q^n beyond the printed normalisation; without it
                // orthogonality fails by exactly q^-n
                s.mul_qpoch(b * q, q, n).mul_pow(q, n).div_qpoch(q, q, n).div_qpoch(-q / c, q, n);
                mul_inf(s, -b * c * q, q);
                div_inf(s, -c, q);
                break;
            case Family::little_q_laguerre:
                s.mul_pow(a, n).mul_pow(q, n * n).div_qpoch(q, q, n).div_qpoch(a * q, q, n);
                mul_inf(s, a * q, q);
                break;
            case Family::al_salam_carlitz_ii:
                s.mul_pow(a * q, n).div_qpoch(q, q, n);
                mul_inf(s, a * q, q);
                break;
            case Family::alternative_q_charlier:
                s.mul_pow(a, n).mul_pow(q, n * (3 * n - 1) / 2).div_qpoch(q, q, n);
                s.mul_qpoch(-a, q, n);  // (-a;q)_inf / (-aq^n;q)_inf
                s.mul(one() + a * qn(2 * n)).div(one() + a);
                div_inf(s, -a * q, q);
                break;
            case Family::q_charlier:
                s.mul_pow(q, n).div_qpoch(-q / a, q, n).div_qpoch(q, q, n);
                div_inf(s, -a, q);
                break;
        }
        return s;
    }

    // -- eigenpolynomials ----------------------------------------------------

    using SP = SeriesParam<R>;

    SP qneg(long m) const { return SP::q_negative_power(q, static_cast<unsigned>(m)); }
    static SP neg(long m) { return SP::negative_integer(static_cast<unsigned>(m)); }
    static SP plain(const R& v) { return SP::plain(v); }

    SeriesResult<R> polynomial(long n, long x) const {
        SeriesParams<R> s;
        bool basic = info_q();
        switch (f) {
            case Family::racah:
                s.numerator = {neg(n), plain(R(n) + dt), neg(x), plain(R(x) + d)};
                s.denominator = {plain(a), plain(b), neg(N)};
                s.z = R(1);
                break;
            case Family::hahn:
                s.numerator = {neg(n), plain(R(n) + a + b - R(1)), neg(x)};
                s.denominator = {plain(a), neg(N)};
                s.z = R(1);
                break;
            case Family::dual_hahn:
                s.numerator = {neg(n), plain(R(x) + a + b - R(1)), neg(x)};
                s.denominator = {plain(a), neg(N)};
                s.z = R(1);
                break;
            case Family::krawtchouk:
                s.numerator = {neg(n), neg(x)};
                s.denominator = {neg(N)};
                s.z = one() / p;
                break;
            case Family::q_racah:
                s.numerator = {qneg(n), plain(dt * qn(n)), qneg(x), plain(d * qn(x))};
                s.denominator = {plain(a), plain(b), qneg(N)};
                s.z = q;
                break;
            case Family::q_hahn:
                s.numerator = {qneg(n), plain(a * b * qn(n - 1)), qneg(x)};
                s.denominator = {plain(a), qneg(N)};
                s.z = q;
                break;
            case Family::dual_q_hahn:
                s.numerator = {qneg(n), plain(a * b * qn(x - 1)), qneg(x)};
                s.denominator = {plain(a), qneg(N)};
                s.z = q;
                break;
            case Family::quantum_q_krawtchouk:
                s.numerator = {qneg(n), qneg(x)};
                s.denominator = {qneg(N)};
                s.z = p * qn(n + 1);
                break;
            case Family::q_krawtchouk:
                s.numerator = {qneg(n), qneg(x), plain(-p * qn(n))};
                s.denominator = {qneg(N), plain(R(0))};
                s.z = q;
                break;
            case Family::affine_q_krawtchouk:
                s.numerator = {qneg(n), qneg(x), plain(R(0))};
                s.denominator = {plain(p * q), qneg(N)};
                s.z = q;
                break;
            case Family::meixner:
                s.numerator = {neg(n), neg(x)};
                s.denominator = {plain(beta)};
                s.z = one() - one() / c;
                break;
            case Family::charlier:
                s.numerator = {neg(n), neg(x)};
                s.z = -one() / a;
                break;
            case Family::little_q_jacobi:
                // 3phi1 form; equal to the normalised 2phi1 but free of its cancellation
                s.numerator = {qneg(n), plain(a * b * qn(n + 1)), qneg(x)};
                s.denominator = {plain(b * q)};
                s.z = qn(x) / a;
                break;
            case Family::q_meixner:
                s.numerator = {qneg(n), qneg(x)};
                s.denominator = {plain(b * q)};
                s.z = -qn(n + 1) / c;
                break;
            case Family::little_q_laguerre:
                s.numerator = {qneg(n), qneg(x)};
                s.z = qn(x) / a;
                break;
            case Family::al_salam_carlitz_ii:
                s.numerator = {qneg(n), qneg(x)};
                s.z = qn(n) / a;
                break;
            case Family::alternative_q_charlier:
                s.numerator = {qneg(n), qneg(x)};
                s.denominator = {plain(R(0))};
                s.z = -qn(1 - n) / a;
                break;
            case Family::q_charlier:
                s.numerator = {qneg(n), qneg(x)};
                s.denominator = {plain(R(0))};
                s.z = -qn(n + 1) / a;
                break;
        }
        SeriesResult<R> r;
        if (basic) {
            s.q = q;
            r = qspecial::basic_hypergeometric(s);
        } else {
            r = qspecial::hypergeometric(s);
        }
        if (f == Family::alternative_q_charlier) {
            const R pre = qn(n * x);
            r.value *= pre;
            r.abs_sum *= pre;
        }
        return r;
    }

    SeriesResult<R> little_q_jacobi_printed(long n, long x) const {
        SeriesParams<R> s;
        s.numerator = {qneg(n), plain(a * b * qn(n + 1))};
        s.denominator = {plain(a * q)};
        s.z = qn(x + 1);
        s.q = q;
        SeriesResult<R> r = qspecial::basic_hypergeometric(s);
        SignedLog<R> pre;
        pre.mul_pow(-a, -n).mul_pow(q, -n * (n + 1) / 2).mul_qpoch(a * q, q, n).div_qpoch(b * q, q, n);
        const R v = pre.value();
        using std::abs;
        r.value *= v;
        r.abs_sum *= abs(v);
        return r;
    }

    bool info_q() const { return family_info(f).q_family; }
};

}  // namespace bdk::detail
