#pragma once

// Scalar tiers used when a binary64 evaluation loses too many digits to
// cancellation. Every templated numeric routine in the library accepts any of
// these types; `escalate` walks them from cheapest to most precise.

#include <cmath>
#include <limits>
#include <type_traits>

#include <boost/multiprecision/mpfr.hpp>

namespace bdk::precision {

namespace bmp = boost::multiprecision;

using Wide = long double;

template <unsigned Digits10>
using Mpfr = bmp::number<bmp::mpfr_float_backend<Digits10>, bmp::et_off>;

using Tier40 = Mpfr<40>;
using Tier80 = Mpfr<80>;
using Tier160 = Mpfr<160>;
using Tier320 = Mpfr<320>;
using Tier640 = Mpfr<640>;

/// Working precision of assembled spectral data.
using Fine = Tier40;

template <class R>
inline const R& unit_roundoff() {
    static const R eps = std::numeric_limits<R>::epsilon();
    return eps;
}

template <class R>
inline double epsilon() {
    return static_cast<double>(std::numeric_limits<R>::epsilon());
}

template <class R>
inline int digits10() {
    return std::numeric_limits<R>::digits10;
}

template <class R>
inline Wide to_wide(const R& v) {
    if constexpr (std::is_floating_point_v<R>) {
        return static_cast<Wide>(v);
    } else {
        return v.template convert_to<Wide>();
    }
}

template <class R>
inline double to_double(const R& v) {
    if constexpr (std::is_floating_point_v<R>) {
        return static_cast<double>(v);
    } else {
        return v.template convert_to<double>();
    }
}

template <class Out, class R>
inline Out convert(const R& v) {
    if constexpr (std::is_same_v<Out, R>) {
        return v;
    } else if constexpr (std::is_floating_point_v<Out>) {
        return static_cast<Out>(to_wide(v));
    } else {
        return Out(v);
    }
}

/// base^e by repeated squaring; exact for dyadic bases while the result fits.
template <class R>
R ipow(R base, long e) {
    if (e < 0) {
        base = R(1) / base;
        e = -e;
    }
    R result(1);
    while (e > 0) {
        if (e & 1) result *= base;
        e >>= 1;
        if (e > 0) base *= base;
    }
    return result;
}

namespace detail {

template <class Fn, class T, class... Rest>
bool escalate_impl(Fn& fn) {
    if (fn.template operator()<T>()) return true;
    if constexpr (sizeof...(Rest) > 0) {
        return escalate_impl<Fn, Rest...>(fn);
    } else {
        return false;
    }
}

}  // namespace detail

/// Calls `fn.template operator()<R>()` for R = long double, 40, 80, 160, 320,
/// 640 digits until it returns true. Returns false if no tier was accepted.
template <class Fn>
bool escalate(Fn&& fn) {
    return detail::escalate_impl<std::remove_reference_t<Fn>, Wide, Tier40, Tier80, Tier160,
                                 Tier320, Tier640>(fn);
}

}  // namespace bdk::precision
