#pragma once

// Pochhammer symbols and (basic) hypergeometric series.
//
//   (a)_n    = a (a+1) ... (a+n-1)
//   (a;q)_n  = (1-a)(1-aq) ... (1-aq^{n-1})
//   rFs      = sum_k (a_1..a_r)_k / (b_1..b_s)_k  z^k / k!
//   rphis    = sum_k (a_1..a_r;q)_k / (b_1..b_s;q)_k
//                     ((-1)^k q^{k(k-1)/2})^{1+s-r} z^k / (q;q)_k
//
// Everything is templated on the scalar so the same code runs in binary64,
// long double and the MPFR tiers of precision.hpp.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "bdk/error.hpp"
#include "bdk/precision.hpp"

namespace bdk::qspecial {

using precision::Wide;

/// Throws constraint_violation unless 0 < q < 1.
void require_unit_interval_q(double q);

template <class R>
R pochhammer(const R& a, unsigned n) {
    R result(1);
    for (unsigned k = 0; k < n; ++k) result *= a + R(k);
    return result;
}

template <class R>
R q_pochhammer(const R& a, const R& q, unsigned n) {
    require_unit_interval_q(precision::to_double(q));
    R result(1);
    R aqk = a;
    for (unsigned k = 0; k < n; ++k) {
        result *= R(1) - aqk;
        aqk *= q;
    }
    return result;
}

/// (a;q)_inf: partial products until the relative change drops below `rel_tol`
/// (defaults to the unit roundoff of R).
template <class R>
R q_pochhammer_infinite(const R& a, const R& q, std::optional<double> rel_tol = std::nullopt) {
    using std::abs;
    require_unit_interval_q(precision::to_double(q));
    const R tol = rel_tol ? R(*rel_tol) : precision::unit_roundoff<R>();
    R result(1);
    R aqk = a;
    for (int k = 0; k < 100000; ++k) {
        const R factor = R(1) - aqk;
        result *= factor;
        if (result == R(0) || abs(aqk) <= tol) return result;
        aqk *= q;
    }
    fail(ErrorCode::non_convergence, "q_pochhammer_infinite: product did not converge");
}

/// Product kept as sign and log-magnitude; a zero factor pins the value to 0.
template <class R>
struct SignedLog {
    int sign = 1;
    R log_abs = R(0);

    SignedLog& mul(const R& v) {
        using std::abs;
        using std::log;
        if (v == R(0)) {
            sign = 0;
            return *this;
        }
        if (v < R(0)) sign = -sign;
        log_abs += log(abs(v));
        return *this;
    }
    SignedLog& div(const R& v) {
        using std::abs;
        using std::log;
        if (v == R(0)) fail(ErrorCode::series_pole, "SignedLog: division by zero factor");
        if (v < R(0)) sign = -sign;
        log_abs -= log(abs(v));
        return *this;
    }
    SignedLog& mul(const SignedLog& o) {
        sign *= o.sign;
        log_abs += o.log_abs;
        return *this;
    }
    SignedLog& div(const SignedLog& o) {
        if (o.sign == 0) fail(ErrorCode::series_pole, "SignedLog: division by zero product");
        sign *= o.sign;
        log_abs -= o.log_abs;
        return *this;
    }
    SignedLog& mul_pow(const R& base, long e) {
        using std::abs;
        using std::log;
        if (e == 0) return *this;
        if (base == R(0)) fail(ErrorCode::series_pole, "SignedLog: power of zero");
        if (base < R(0) && (e % 2 != 0)) sign = -sign;
        log_abs += R(e) * log(abs(base));
        return *this;
    }
    SignedLog& mul_poch(const R& a, unsigned n) {
        for (unsigned k = 0; k < n; ++k) mul(a + R(k));
        return *this;
    }
    SignedLog& div_poch(const R& a, unsigned n) {
        for (unsigned k = 0; k < n; ++k) div(a + R(k));
        return *this;
    }
    SignedLog& mul_qpoch(const R& a, const R& q, unsigned n) {
        R aqk = a;
        for (unsigned k = 0; k < n; ++k, aqk *= q) mul(R(1) - aqk);
        return *this;
    }
    SignedLog& div_qpoch(const R& a, const R& q, unsigned n) {
        R aqk = a;
        for (unsigned k = 0; k < n; ++k, aqk *= q) div(R(1) - aqk);
        return *this;
    }

    R value() const {
        using std::exp;
        if (sign == 0) return R(0);
        return R(sign) * exp(log_abs);
    }
};

/// One upper or lower series parameter. `terminates_at = m` marks a parameter
/// supplied symbolically as -m (ordinary) or q^{-m} (basic); termination is
/// decided from these tags only, never from the floating-point value.
template <class R>
struct SeriesParam {
    R value;
    std::optional<unsigned> terminates_at;

    static SeriesParam plain(const R& v) { return {v, std::nullopt}; }
    static SeriesParam negative_integer(unsigned m) { return {-R(m), m}; }
    static SeriesParam q_negative_power(const R& q, unsigned m) {
        return {precision::ipow(q, -static_cast<long>(m)), m};
    }
};

template <class R>
struct SeriesParams {
    std::vector<SeriesParam<R>> numerator;
    std::vector<SeriesParam<R>> denominator;
    R z = R(0);
    std::optional<R> q;  // absent for ordinary hypergeometric series
};

struct SeriesOptions {
    std::size_t max_terms = 10000;
    double rel_tol = 1e-16;
};

template <class R>
struct SeriesResult {
    R value = R(0);
    R abs_sum = R(0);  // sum of |term|, for the cancellation estimate
    std::size_t terms = 0;
    bool terminating = false;
    bool converged = true;

    /// sum |t_k| / |sum t_k|; +inf for an exact zero with nonzero terms.
    double condition() const {
        using std::abs;
        const double num = precision::to_double(abs_sum);
        const double den = precision::to_double(abs(value));
        if (den == 0.0) return num == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
        return num / den;
    }
};

namespace detail {

/// Neumaier compensated accumulator.
template <class R>
struct Compensated {
    R sum = R(0);
    R carry = R(0);

    void add(const R& v) {
        using std::abs;
        const R t = sum + v;
        if (abs(sum) >= abs(v)) {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    R total() const { return sum + carry; }
};

template <class R>
std::optional<unsigned> termination_index(const std::vector<SeriesParam<R>>& upper) {
    std::optional<unsigned> m;
    for (const auto& p : upper) {
        if (p.terminates_at && (!m || *p.terminates_at < *m)) m = p.terminates_at;
    }
    return m;
}

template <class R>
void check_lower_poles(const std::vector<SeriesParam<R>>& lower, std::optional<unsigned> m) {
    for (const auto& b : lower) {
        if (!b.terminates_at) continue;
        if (!m || *m > *b.terminates_at) {
            fail(ErrorCode::series_pole,
                 "series: lower parameter -" + std::to_string(*b.terminates_at) +
                     " is reached before the series terminates");
        }
    }
}

template <class R, class RatioFn>
SeriesResult<R> sum_series(std::optional<unsigned> m, const SeriesOptions& opt, RatioFn&& ratio) {
    using std::abs;
    SeriesResult<R> res;
    res.terminating = m.has_value();
    Compensated<R> acc;
    R term(1);
    R abs_sum(0);
    acc.add(term);
    abs_sum += abs(term);
    std::size_t k = 0;
    const std::size_t last = m ? static_cast<std::size_t>(*m) : opt.max_terms;
    const R tol(opt.rel_tol);
    bool converged = res.terminating;
    while (k < last) {
        term *= ratio(k);
        ++k;
        acc.add(term);
        abs_sum += abs(term);
        if (term == R(0)) {
            converged = true;
            break;
        }
        if (!res.terminating && abs(term) <= tol * abs(acc.total())) {
            converged = true;
            break;
        }
    }
    res.value = acc.total();
    res.abs_sum = abs_sum;
    res.terms = k + 1;
    res.converged = converged;
    return res;
}

}  // namespace detail

/// rFs. Terminating series are summed exactly to their last term; otherwise the
/// sum stops at relative term < rel_tol or max_terms (then converged=false).
template <class R>
SeriesResult<R> hypergeometric(const SeriesParams<R>& p, const SeriesOptions& opt = {}) {
    const auto m = detail::termination_index(p.numerator);
    detail::check_lower_poles(p.denominator, m);
    if (p.z == R(0)) return SeriesResult<R>{R(1), R(1), 1, m.has_value(), true};
    return detail::sum_series<R>(m, opt, [&](std::size_t k) {
        R num(1);
        R den(k + 1);
        const R rk(k);
        for (const auto& a : p.numerator) num *= a.value + rk;
        for (const auto& b : p.denominator) den *= b.value + rk;
        if (den == R(0)) fail(ErrorCode::series_pole, "hypergeometric: lower Pochhammer vanished");
        return num * p.z / den;
    });
}

/// rphis with the (-1)^{(1+s-r)k} q^{(1+s-r)k(k-1)/2} balancing factor.
template <class R>
SeriesResult<R> basic_hypergeometric(const SeriesParams<R>& p, const SeriesOptions& opt = {}) {
    if (!p.q) fail(ErrorCode::invalid_argument, "basic_hypergeometric: q is required");
    const R q = *p.q;
    require_unit_interval_q(precision::to_double(q));
    const auto m = detail::termination_index(p.numerator);
    detail::check_lower_poles(p.denominator, m);
    if (p.z == R(0)) return SeriesResult<R>{R(1), R(1), 1, m.has_value(), true};
    const long excess = 1 + static_cast<long>(p.denominator.size()) - static_cast<long>(p.numerator.size());
    R qk(1);  // q^k
    return detail::sum_series<R>(m, opt, [&](std::size_t) {
        R num(1);
        R den(1);
        for (const auto& a : p.numerator) num *= R(1) - a.value * qk;
        for (const auto& b : p.denominator) den *= R(1) - b.value * qk;
        const R qk1 = qk * q;
        den *= R(1) - qk1;  // (q;q)_{k+1} / (q;q)_k
        if (den == R(0)) fail(ErrorCode::series_pole, "basic_hypergeometric: lower q-Pochhammer vanished");
        R r = num * p.z / den;
        if (excess != 0) {
            r *= precision::ipow(qk, excess);
            if (excess % 2 != 0) r = -r;
        }
        qk = qk1;
        return r;
    });
}

/// Result of a precision-escalated evaluation.
template <class Out = Wide>
struct AccurateValue {
    Out value = 0;
    double condition = 1;
    int digits10 = 0;  // precision of the accepted tier
    bool certified = false;
};

/// Evaluates `build.template operator()<R>()` (returning SeriesResult<R>) in
/// increasing precision until the cancellation-based error estimate
///   abs_sum * eps_R * 4 (terms + 2)
/// is below rel_target * max(|value|, abs_floor).
template <class Out = Wide, class Build>
AccurateValue<Out> accurate_series(Build&& build, Wide abs_floor = 0, double rel_target = 1e-18) {
    AccurateValue<Out> out;
    precision::escalate([&]<class R>() {
        using std::abs;
        if (precision::epsilon<R>() * 8 > rel_target) return false;
        const SeriesResult<R> s = build.template operator()<R>();
        if (!s.converged) fail(ErrorCode::non_convergence, "accurate_series: series did not converge");
        const Wide v = precision::to_wide(s.value);
        const Wide err = precision::to_wide(s.abs_sum) * static_cast<Wide>(precision::epsilon<R>()) * 4 *
                         static_cast<Wide>(s.terms + 2);
        const Wide scale = std::max(std::fabs(v), abs_floor);
        out.value = precision::convert<Out>(s.value);
        out.condition = s.condition();
        out.digits10 = precision::digits10<R>();
        out.certified = err <= static_cast<Wide>(rel_target) * scale;
        return out.certified;
    });
    return out;
}

}  // namespace bdk::qspecial
