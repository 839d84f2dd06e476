#include "bdk/tridiagonal_eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "bdk/error.hpp"

namespace bdk {

namespace {

template <class R>
R pythag(const R& a, const R& b) {
    using std::abs;
    using std::sqrt;
    const R x = abs(a), y = abs(b);
    if (x > y) {
        const R r = y / x;
        return x * sqrt(1 + r * r);
    }
    if (y == 0) return R(0);
    const R r = x / y;
    return y * sqrt(1 + r * r);
}

template <class R>
R with_sign(const R& magnitude, const R& s) {
    using std::abs;
    return s >= 0 ? abs(magnitude) : -abs(magnitude);
}

}  // namespace

template <class R>
TridiagonalEigen<R> tridiagonal_eigen(std::vector<R> d, std::vector<R> e, std::size_t rows) {
    using std::abs;
    const std::size_t n = d.size();
    if (n == 0 || e.size() + 1 != n) fail(ErrorCode::invalid_argument, "tridiagonal_eigen: need n diagonal and n-1 off-diagonal entries");
    rows = std::min(rows, n);
    e.push_back(R(0));

    std::vector<std::vector<R>> z(rows, std::vector<R>(n, R(0)));
    for (std::size_t i = 0; i < rows; ++i) z[i][i] = R(1);
    const R eps = std::numeric_limits<R>::epsilon();

    for (std::size_t l = 0; l < n; ++l) {
        int sweeps = 0;
        for (;;) {
            std::size_t m = l;
            for (; m + 1 < n; ++m) {
                if (abs(e[m]) <= eps * (abs(d[m]) + abs(d[m + 1]))) break;
            }
            if (m == l) break;
            if (++sweeps > 60) {
                fail(ErrorCode::eigen_failure, "tridiagonal_eigen: no convergence for eigenvalue " + std::to_string(l));
            }
            R g = (d[l + 1] - d[l]) / (2 * e[l]);
            R r = pythag(g, R(1));
            g = d[m] - d[l] + e[l] / (g + with_sign(r, g));
            R s = 1, c = 1, p = 0;
            bool split = false;
            for (std::size_t i = m; i-- > l;) {
                const R f = s * e[i];
                const R b = c * e[i];
                r = pythag(f, g);
                e[i + 1] = r;
                if (r == 0) {
                    d[i + 1] -= p;
                    e[m] = 0;
                    split = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for (std::size_t k = 0; k < rows; ++k) {
                    const R t = z[k][i + 1];
                    z[k][i + 1] = s * z[k][i] + c * t;
                    z[k][i] = c * z[k][i] - s * t;
                }
            }
            if (split) continue;
            d[l] -= p;
            e[l] = g;
            e[m] = 0;
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
    TridiagonalEigen<R> out;
    out.values.reserve(n);
    out.vectors.assign(n, std::vector<R>(rows));
    for (std::size_t k = 0; k < n; ++k) {
        out.values.push_back(d[order[k]]);
        for (std::size_t i = 0; i < rows; ++i) out.vectors[k][i] = z[i][order[k]];
    }
    return out;
}

template TridiagonalEigen<double> tridiagonal_eigen(std::vector<double>, std::vector<double>, std::size_t);
template TridiagonalEigen<precision::Wide> tridiagonal_eigen(std::vector<precision::Wide>, std::vector<precision::Wide>,
                                                              std::size_t);
template TridiagonalEigen<precision::Tier40> tridiagonal_eigen(std::vector<precision::Tier40>,
                                                                std::vector<precision::Tier40>, std::size_t);
template TridiagonalEigen<precision::Tier80> tridiagonal_eigen(std::vector<precision::Tier80>,
                                                                std::vector<precision::Tier80>, std::size_t);
template TridiagonalEigen<precision::Tier160> tridiagonal_eigen(std::vector<precision::Tier160>,
                                                                 std::vector<precision::Tier160>, std::size_t);
template TridiagonalEigen<precision::Tier320> tridiagonal_eigen(std::vector<precision::Tier320>,
                                                                 std::vector<precision::Tier320>, std::size_t);

}  // namespace bdk
