#include <cmath>
#include <numbers>
#include <string>

#include "bdk/oracle.hpp"

namespace bdk {

namespace {

constexpr int kTermCap = 100000;
constexpr Wide kRemainder = 1e-16L;
// Cramer: |H_n(x)| <= k sqrt(2^n n!) e^{x^2/2}
constexpr Wide kCramer = 1.0865L;

void check_t(double t) {
    if (!(t > 0) || !std::isfinite(t)) fail(ErrorCode::invalid_argument, "closed-form kernels need t > 0");
}

[[noreturn]] void too_small(const char* which, double t) {
    fail(ErrorCode::cutoff_failure,
         std::string(which) + " series needs more than 1e5 terms at t=" + std::to_string(t) + "; use a larger t");
}

}  // namespace

double hermite_kernel_series(double x, double y, double t, int* terms) {
    check_t(t);
    // h_n = H_n / sqrt(2^n n!), bounded by kCramer e^{x^2/2}
    const Wide w = std::exp(-2.0L * t);
    const Wide prefactor = std::exp(-static_cast<Wide>(x) * x) / std::sqrt(std::numbers::pi_v<Wide>);
    const Wide bound = prefactor * kCramer * kCramer * std::exp((static_cast<Wide>(x) * x + static_cast<Wide>(y) * y) / 2);
    Wide hx0 = 1, hy0 = 1, hx1 = std::sqrt(2.0L) * x, hy1 = std::sqrt(2.0L) * y;
    Wide sum = 1, wn = 1;
    int n = 0;
    for (;;) {
        wn *= w;
        ++n;
        sum += wn * hx1 * hy1;
        if (bound * wn * w / (1 - w) <= kRemainder) break;
        if (n >= kTermCap) too_small("Hermite", t);
        const Wide a = std::sqrt(2.0L / (n + 1)), b = std::sqrt(static_cast<Wide>(n) / (n + 1));
        const Wide hx2 = a * x * hx1 - b * hx0;
        const Wide hy2 = a * y * hy1 - b * hy0;
        hx0 = hx1;
        hx1 = hx2;
        hy0 = hy1;
        hy1 = hy2;
    }
    if (terms) *terms = n + 1;
    return static_cast<double>(prefactor * sum);
}

double hermite_kernel_closed(double x, double y, double t) {
    check_t(t);
    const Wide s = 1 - std::exp(-4.0L * t);
    const Wide d = x - y * std::exp(-2.0L * t);
    return static_cast<double>(std::exp(-d * d / s) / std::sqrt(std::numbers::pi_v<Wide> * s));
}

double laguerre_kernel_series(double x, double y, double t, double g, int* terms) {
    check_t(t);
    if (!(g > 0.5)) fail(ErrorCode::constraint_violation, "Laguerre kernel needs g > 1/2");
    if (!(x > 0) || !(y > 0)) fail(ErrorCode::invalid_argument, "Laguerre kernel needs positive x, y");
    const Wide beta = static_cast<Wide>(g) - 0.5L;
    const Wide u = static_cast<Wide>(x) * x, v = static_cast<Wide>(y) * y;
    const Wide w = std::exp(-4.0L * t);
    const Wide prefactor = 2 * std::exp(-u) * std::pow(static_cast<Wide>(x), 2 * static_cast<Wide>(g));
    // l_n = sqrt(n!/Gamma(n+b+1)) L_n^b; |e^{-u/2} L_n^b(u)| <= (b+1)_n / n! for b >= 0,
    // so |l_n(u) l_n(v)| <= e^{(u+v)/2} c_n with c_n = (b+1)_n / (n! Gamma(b+1)).
    const Wide g0 = std::tgamma(beta + 1);
    const Wide envelope = prefactor * std::exp((u + v) / 2) / g0;
    Wide lu0 = 1 / std::sqrt(g0), lv0 = lu0;
    Wide lu1 = (beta + 1 - u) / std::sqrt(g0 * (beta + 1)), lv1 = (beta + 1 - v) / std::sqrt(g0 * (beta + 1));
    Wide sum = lu0 * lv0 + w * lu1 * lv1;
    Wide wn = w, cn = beta + 1;  // c_1 Gamma(b+1)
    int n = 1;
    for (;;) {
        const Wide ratio = (n + beta + 1) / (n + 1) * w;
        if (ratio < 1 && envelope * cn * wn * ratio / (1 - ratio) <= kRemainder) break;
        if (n >= kTermCap) too_small("Laguerre", t);
        const Wide lu2 = ((2 * n + beta + 1 - u) * lu1 - std::sqrt(n * (n + beta)) * lu0) / std::sqrt((n + 1) * (n + beta + 1));
        const Wide lv2 = ((2 * n + beta + 1 - v) * lv1 - std::sqrt(n * (n + beta)) * lv0) / std::sqrt((n + 1) * (n + beta + 1));
        lu0 = lu1;
        lu1 = lu2;
        lv0 = lv1;
        lv1 = lv2;
        cn *= (n + beta + 1) / (n + 1);
        wn *= w;
        ++n;
        sum += wn * lu1 * lv1;
    }
    if (terms) *terms = n + 1;
    return static_cast<double>(prefactor * sum);
}

double bessel_i(double order, double z) {
    if (!(z >= 0)) fail(ErrorCode::invalid_argument, "bessel_i: z must be nonnegative");
    if (z == 0) return order == 0 ? 1.0 : 0.0;
    const Wide h = static_cast<Wide>(z) / 2;
    Wide term = std::pow(h, static_cast<Wide>(order)) / std::tgamma(static_cast<Wide>(order) + 1);
    Wide sum = term;
    for (int k = 1; k < kTermCap; ++k) {
        term *= h * h / (k * (k + static_cast<Wide>(order)));
        sum += term;
        if (term <= sum * 1e-21L) return static_cast<double>(sum);
    }
    fail(ErrorCode::non_convergence, "bessel_i: series did not converge");
}

double laguerre_kernel_closed(double x, double y, double t, double g) {
    check_t(t);
    if (!(g > 0.5)) fail(ErrorCode::constraint_violation, "Laguerre kernel needs g > 1/2");
    const Wide beta = static_cast<Wide>(g) - 0.5L;
    const Wide s = 1 - std::exp(-4.0L * t);
    const Wide xy = static_cast<Wide>(x) * y * std::exp(-2.0L * t);
    const Wide gauss = std::exp(-(static_cast<Wide>(x) * x + static_cast<Wide>(y) * y * std::exp(-4.0L * t)) / s);
    const Wide bessel = bessel_i(static_cast<double>(beta), static_cast<double>(2 * xy / s));
    return static_cast<double>(2 * std::pow(static_cast<Wide>(x), 2 * static_cast<Wide>(g)) / s * gauss *
                               std::pow(xy, -beta) * bessel);
}

ClosedFormReport hermite_kernel_check(double t, const std::vector<double>& xs, const std::vector<double>& ys,
                                      double tol) {
    ClosedFormReport rep;
    rep.kernel = "hermite";
    rep.t = t;
    rep.tolerance = tol;
    for (double x : xs) {
        for (double y : ys) {
            KernelPoint p{x, y, 0, 0, 0};
            p.series = hermite_kernel_series(x, y, t, &p.terms);
            p.closed = hermite_kernel_closed(x, y, t);
            rep.max_error = std::max(rep.max_error, std::fabs(p.series - p.closed));
            rep.points.push_back(p);
        }
    }
    return rep;
}

ClosedFormReport laguerre_kernel_check(double t, double g, const std::vector<double>& xs,
                                       const std::vector<double>& ys, double tol) {
    ClosedFormReport rep;
    rep.kernel = "laguerre";
    rep.t = t;
    rep.g = g;
    rep.tolerance = tol;
    for (double x : xs) {
        for (double y : ys) {
            KernelPoint p{x, y, 0, 0, 0};
            p.series = laguerre_kernel_series(x, y, t, g, &p.terms);
            p.closed = laguerre_kernel_closed(x, y, t, g);
            rep.max_error = std::max(rep.max_error, std::fabs(p.series - p.closed));
            rep.points.push_back(p);
        }
    }
    return rep;
}

}  // namespace bdk
