#include "bdk/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bdk/tridiagonal_eigen.hpp"
#include "formulas.hpp"

namespace bdk {

namespace {

using precision::Tier160;
using precision::Tier320;
using precision::Tier40;
using precision::Tier80;

constexpr double kInvariantTolerance = 1e-12;
constexpr int kLatticeCap = 20000;

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

/// Calls fn.template operator()<R>() with the cheapest MPFR tier holding `digits`.
template <class Fn>
auto with_digits(int digits, Fn&& fn) {
    if (digits <= 38) return fn.template operator()<Tier40>();
    if (digits <= 78) return fn.template operator()<Tier80>();
    if (digits <= 158) return fn.template operator()<Tier160>();
    return fn.template operator()<Tier320>();
}

template <class R>
struct Rates {
    std::vector<R> B, D;
};

/// Formula rates on {0..last} with the boundary values set exactly; a
/// reflecting wall removes the birth at `last`.
template <class R>
Rates<R> lattice_rates(const Model& m, int last, bool reflect) {
    const detail::Formulas<R> F(m.pack());
    Rates<R> r;
    r.B.resize(idx(last) + 1);
    r.D.resize(idx(last) + 1);
    for (int x = 0; x <= last; ++x) {
        const bool wall = (m.finite() && x == m.N()) || (reflect && x == last);
        r.B[idx(x)] = wall ? R(0) : F.birth(x);
        r.D[idx(x)] = x == 0 ? R(0) : F.death(x);
    }
    return r;
}

/// Digits needed so that Phi exp(-tH) Phi^-1 on {0..block_last} keeps ~1e-16
/// absolute accuracy: eigenvector errors scale with ||H||, and the similarity
/// multiplies them by phi0(x)/phi0(y).
int needed_digits(const Rates<Wide>& r, int block_last) {
    Wide norm = 1, log_phi = 0, lo = 0, hi = 0;
    for (std::size_t x = 0; x < r.B.size(); ++x) norm = std::max(norm, r.B[x] + r.D[x]);
    for (int x = 0; x < block_last; ++x) {
        log_phi += std::log(r.B[idx(x)] / r.D[idx(x) + 1]) / 2;
        lo = std::min(lo, log_phi);
        hi = std::max(hi, log_phi);
    }
    return 20 + static_cast<int>(std::ceil(std::log10(norm))) + static_cast<int>(std::ceil((hi - lo) / std::log(10.0L)));
}

template <class R>
std::vector<Matrix> kernels_from_rates(const Rates<R>& r, int block_last, const std::vector<double>& times, int digits) {
    using std::sqrt;
    const std::size_t n = r.B.size();
    std::vector<R> diag(n), off(n - 1);
    for (std::size_t x = 0; x < n; ++x) {
        diag[x] = r.B[x] + r.D[x];
        if (x + 1 < n) off[x] = -sqrt(r.B[x] * r.D[x + 1]);
    }
    const auto eig = tridiagonal_eigen<R>(std::move(diag), std::move(off), idx(block_last) + 1);
    std::vector<R> phi0(idx(block_last) + 1);
    phi0[0] = R(1);
    for (int x = 0; x < block_last; ++x) phi0[idx(x) + 1] = phi0[idx(x)] * sqrt(r.B[idx(x)] / r.D[idx(x) + 1]);

    const R negligible = pow(R(10), -digits);
    std::vector<Matrix> out;
    for (double t : times) {
        Matrix T = Matrix::Zero(block_last + 1, block_last + 1);
        if (t == 0) {
            T.setIdentity();
            out.push_back(std::move(T));
            continue;
        }
        std::vector<R> e(n);
        for (std::size_t k = 0; k < n; ++k) e[k] = exp(-eig.values[k] * t);
        for (int x = 0; x <= block_last; ++x) {
            for (int y = x; y <= block_last; ++y) {
                R s = 0;
                for (std::size_t k = 0; k < n; ++k) {
                    if (e[k] < negligible) continue;
                    s += e[k] * eig.vectors[k][idx(x)] * eig.vectors[k][idx(y)];
                }
                T(y, x) = precision::to_double(phi0[idx(x)] / phi0[idx(y)] * s);
                T(x, y) = precision::to_double(phi0[idx(y)] / phi0[idx(x)] * s);
            }
        }
        out.push_back(std::move(T));
    }
    return out;
}

std::vector<Matrix> model_kernels(const Model& m, int last, int block_last, const std::vector<double>& times,
                                  int* digits_used) {
    const int digits = needed_digits(lattice_rates<Wide>(m, last, !m.finite()), block_last);
    if (digits_used) *digits_used = digits;
    return with_digits(digits, [&]<class R>() {
        return kernels_from_rates(lattice_rates<R>(m, last, !m.finite()), block_last, times, digits);
    });
}

void check_times(const std::vector<double>& times) {
    for (double t : times) {
        if (!(t >= 0) || !std::isfinite(t)) fail(ErrorCode::invalid_argument, "oracle: t must be finite and nonnegative");
    }
}

}  // namespace

GeneratorMatrix build_generator(const Model& model, const StateSpace& space) {
    const int X = space.x_max;
    if (model.finite() && X != model.N()) fail(ErrorCode::invalid_argument, "build_generator: finite family needs the full lattice");
    GeneratorMatrix g;
    g.space = space;
    g.reflecting = !space.finite();
    g.birth.resize(space.size());
    g.death.resize(space.size());
    for (int x = 0; x <= X; ++x) {
        g.birth[idx(x)] = model.birth_rate(x);
        g.death[idx(x)] = model.death_rate(x);
    }
    if (g.reflecting) {
        g.removed_birth = g.birth[idx(X)];
        g.birth[idx(X)] = 0;
    }
    const auto& B = g.birth;
    const auto& D = g.death;

    g.phi0.resize(space.size());
    g.phi0[0] = 1;
    for (int x = 0; x < X; ++x) {
        g.phi0[idx(x) + 1] = g.phi0[idx(x)] * std::sqrt(static_cast<Wide>(B[idx(x)]) / D[idx(x) + 1]);
    }

    const int n = X + 1;
    g.H = Matrix::Zero(n, n);
    g.H_tilde = Matrix::Zero(n, n);
    g.A = Matrix::Zero(n, n);
    for (int x = 0; x <= X; ++x) {
        g.H(x, x) = B[idx(x)] + D[idx(x)];
        g.H_tilde(x, x) = B[idx(x)] + D[idx(x)];
        g.A(x, x) = std::sqrt(B[idx(x)]);
        if (x < X) {
            g.H(x, x + 1) = g.H(x + 1, x) = -std::sqrt(B[idx(x)] * D[idx(x) + 1]);
            g.H_tilde(x, x + 1) = -B[idx(x)];
            g.H_tilde(x + 1, x) = -D[idx(x) + 1];
            g.A(x, x + 1) = -std::sqrt(D[idx(x) + 1]);
        }
    }
    g.L = -g.H_tilde.transpose();

    if (!((-g.L).transpose() == g.H_tilde)) fail(ErrorCode::internal_consistency, "build_generator: -L differs from H~^T");
    for (int x = 0; x <= X; ++x) {
        for (int y = std::max(0, x - 1); y <= std::min(X, x + 1); ++y) {
            const Wide sim = static_cast<Wide>(g.H(x, y)) * g.phi0[idx(y)] / g.phi0[idx(x)];
            const double ref = g.H_tilde(x, y);
            const double scale = ref != 0 ? std::fabs(ref) : 1.0;
            g.similarity_error = std::max(g.similarity_error, static_cast<double>(std::fabs(sim - ref)) / scale);
        }
    }
    const double hmax = std::max(1e-300, g.H.cwiseAbs().maxCoeff());
    g.factorization_error = (g.A.transpose() * g.A - g.H).cwiseAbs().maxCoeff() / hmax;
    for (int y = 0; y <= X; ++y) {
        const double total = B[idx(y)] + D[idx(y)];
        const double col = g.L.col(y).sum();
        if (total > 0) g.column_sum_error = std::max(g.column_sum_error, std::fabs(col) / total);
        else if (col != 0) g.column_sum_error = std::max(g.column_sum_error, std::fabs(col));
    }
    if (g.similarity_error > kInvariantTolerance || g.factorization_error > kInvariantTolerance ||
        g.column_sum_error > kInvariantTolerance) {
        fail(ErrorCode::internal_consistency,
             "build_generator: invariant violated (similarity " + std::to_string(g.similarity_error) + ", A^T A " +
                 std::to_string(g.factorization_error) + ", column sums " + std::to_string(g.column_sum_error) + ")");
    }
    return g;
}

Matrix expm_kernel(const GeneratorMatrix& gen, double t) {
    check_times({t});
    const int X = gen.space.x_max;
    Rates<Wide> wide;
    wide.B.assign(gen.birth.begin(), gen.birth.end());
    wide.D.assign(gen.death.begin(), gen.death.end());
    const int digits = needed_digits(wide, X);
    return with_digits(digits, [&]<class R>() {
        Rates<R> r;
        for (std::size_t x = 0; x < gen.birth.size(); ++x) {
            r.B.push_back(R(gen.birth[x]));
            r.D.push_back(R(gen.death[x]));
        }
        return kernels_from_rates(r, X, {t}, digits).front();
    });
}

OracleKernels oracle_kernels(const Model& model, const StateSpace& space, const std::vector<double>& times, double tol) {
    check_times(times);
    OracleKernels out;
    out.times = times;
    const int X = space.x_max;
    if (model.finite()) {
        out.lattice_last = model.N();
        out.kernels = model_kernels(model, model.N(), X, times, &out.digits);
        return out;
    }
    int pad = std::max(8, (X + 1) / 2);
    std::vector<Matrix> prev = model_kernels(model, X + pad, X, times, &out.digits);
    for (;;) {
        pad *= 2;
        if (X + pad > kLatticeCap) {
            fail(ErrorCode::non_convergence, std::string(model.info().name) + ": oracle padding did not settle below " +
                                                 std::to_string(kLatticeCap) + " states");
        }
        int digits = 0;
        std::vector<Matrix> cur = model_kernels(model, X + pad, X, times, &digits);
        double change = 0;
        for (std::size_t i = 0; i < cur.size(); ++i) change = std::max(change, (cur[i] - prev[i]).cwiseAbs().maxCoeff());
        out.kernels = std::move(cur);
        out.lattice_last = X + pad;
        out.digits = digits;
        out.padding_change = change;
        if (change <= tol) return out;
        prev = out.kernels;
    }
}

EigensystemReport verify_eigensystem(const Model& model, const StateSpace& space) {
    EigensystemReport rep;
    const int X = space.x_max;
    constexpr int kInfiniteLevels = 26;
    rep.levels = model.finite() ? model.N() + 1 : kInfiniteLevels;
    rep.lattice_last = model.finite() ? model.N() : eigenvector_support(model, rep.levels - 1, X);

    // eigenvalues of the dense H against E(n)
    const Rates<Wide> wide = lattice_rates<Wide>(model, rep.lattice_last, !model.finite());
    Wide norm = 1;
    for (std::size_t x = 0; x < wide.B.size(); ++x) norm = std::max(norm, wide.B[x] + wide.D[x]);
    const Wide e1 = model.energy(1);
    const int digits = 17 + static_cast<int>(std::ceil(std::log10(std::max<Wide>(1, norm / e1))));
    with_digits(digits, [&]<class R>() {
        using std::sqrt;
        const Rates<R> r = lattice_rates<R>(model, rep.lattice_last, !model.finite());
        const std::size_t n = r.B.size();
        std::vector<R> diag(n), off(n - 1);
        for (std::size_t x = 0; x < n; ++x) {
            diag[x] = r.B[x] + r.D[x];
            if (x + 1 < n) off[x] = -sqrt(r.B[x] * r.D[x + 1]);
        }
        const auto eig = tridiagonal_eigen<R>(std::move(diag), std::move(off), 0);
        rep.min_eigenvalue = precision::to_double(eig.values.front());
        const R E1 = R(model.energy_fine(1));
        for (int k = 0; k < rep.levels; ++k) {
            const R E = R(model.energy_fine(k));
            const R scale = E > E1 ? E : E1;
            rep.max_eigenvalue_error =
                std::max(rep.max_eigenvalue_error, precision::to_double(abs(eig.values[idx(k)] - E) / scale));
        }
        return 0;
    });

    // residuals of the closed-form eigenvectors with the untruncated rates
    const int last = model.finite() ? model.N() : X + 1;
    const Rates<Fine> r = lattice_rates<Fine>(model, last, false);
    std::vector<Fine> phi0(idx(last) + 1);
    for (int x = 0; x <= last; ++x) phi0[idx(x)] = exp(model.log_ground_state_sq_fine(x) / 2);
    const int rows = model.finite() ? model.N() : X;
    for (int k = 0; k < rep.levels; ++k) {
        std::vector<Fine> phi(idx(last) + 1);
        Fine size = 0;
        for (int x = 0; x <= last; ++x) {
            phi[idx(x)] = phi0[idx(x)] * model.polynomial_fine(k, x);
            if (x <= rows) size = std::max(size, Fine(abs(phi[idx(x)])));
        }
        const Fine E = model.energy_fine(k);
        Fine worst = 0;
        for (int x = 0; x <= rows; ++x) {
            Fine h = (r.B[idx(x)] + r.D[idx(x)] - E) * phi[idx(x)];
            if (x > 0) h -= sqrt(r.B[idx(x) - 1] * r.D[idx(x)]) * phi[idx(x) - 1];
            if (x < last) h -= sqrt(r.B[idx(x)] * r.D[idx(x) + 1]) * phi[idx(x) + 1];
            worst = std::max(worst, Fine(abs(h)));
        }
        rep.max_residual = std::max(rep.max_residual, precision::to_double(worst / size));
    }
    for (int x = 0; x <= rows; ++x) {
        Fine a = sqrt(r.B[idx(x)]) * phi0[idx(x)];
        if (x < last) a -= sqrt(r.D[idx(x) + 1]) * phi0[idx(x) + 1];
        rep.a_phi0 = std::max(rep.a_phi0, precision::to_double(abs(a)));
    }

    rep.residual_ok = rep.max_residual <= kResidualTolerance;
    rep.a_phi0_ok = rep.a_phi0 <= kAPhi0Tolerance;
    rep.psd_ok = rep.min_eigenvalue >= -kPsdTolerance;
    rep.spectrum_ok = rep.max_eigenvalue_error <= kEigenvalueTolerance;
    return rep;
}

}  // namespace bdk
