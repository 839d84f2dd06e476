#include "bdk/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "bdk/oracle.hpp"
#include "bdk/spectral.hpp"

namespace bdk {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

class Rows {
public:
    Rows(std::string family, std::optional<ModelParams> params) : family_(std::move(family)), params_(std::move(params)) {}

    void add(std::string check, std::string metric, double value, double threshold, std::string note = {}) {
        CheckResult r;
        r.check = std::move(check);
        r.family = family_;
        r.params = params_;
        r.metric = std::move(metric);
        r.value = value;
        r.threshold = threshold;
        r.pass = value <= threshold;  // false for NaN
        r.note = std::move(note);
        rows_.push_back(std::move(r));
    }

    /// Runs fn; a library error becomes a failed row carrying the message.
    void attempt(const std::string& check, const std::string& metric, double threshold, const std::function<double()>& fn,
                 std::string note = {}) {
        try {
            add(check, metric, fn(), threshold, std::move(note));
        } catch (const Error& e) {
            add(check, metric, kNaN, threshold, std::string(to_string(e.code())) + ": " + e.what());
        }
    }

    std::vector<CheckResult> take() { return std::move(rows_); }

private:
    std::string family_;
    std::optional<ModelParams> params_;
    std::vector<CheckResult> rows_;
};

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

/// sum_x phi0(x)^2 over the lattice (until the terms stop mattering for infinite families).
Wide ground_state_mass(const Model& m, int x_start) {
    Wide s = 0;
    int quiet = 0;
    for (int x = 0; x <= m.max_state(); ++x) {
        const Wide v = m.log_ground_state_sq(x).value();
        s += v;
        if (m.finite()) continue;
        quiet = v < 1e-22L * s ? quiet + 1 : 0;
        if (quiet >= 8 && x > x_start) break;
    }
    return s;
}

double binomial_pmf(int n, int k, double p) {
    const double lc = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    return std::exp(lc + k * std::log(p) + (n - k) * std::log1p(-p));
}

double poisson_pmf(int k, double a) { return std::exp(k * std::log(a) - a - std::lgamma(k + 1.0)); }

}  // namespace

double fitted_decay_rate(const std::vector<double>& t, const std::vector<double>& d) {
    if (t.size() != d.size() || t.size() < 2) fail(ErrorCode::invalid_argument, "fitted_decay_rate: need two or more points");
    double mt = 0, ml = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(d[i] > 0)) fail(ErrorCode::invalid_argument, "fitted_decay_rate: distances must be positive");
        mt += t[i];
        ml += std::log(d[i]);
    }
    mt /= static_cast<double>(t.size());
    ml /= static_cast<double>(t.size());
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        sxy += (t[i] - mt) * (std::log(d[i]) - ml);
        sxx += (t[i] - mt) * (t[i] - mt);
    }
    return -sxy / sxx;
}

double orthogonality_error(const Model& model, int levels) {
    const int x_start = model.finite() ? model.N() : model.state_space(1e-12).x_max;
    const int x_last = eigenvector_support(model, levels, x_start);
    const auto v = normalized_eigenvectors(model, levels, x_last);
    Wide worst = 0;
    for (int n = 0; n <= levels; ++n) {
        for (int k = 0; k <= n; ++k) {
            Wide s = 0;
            for (int x = 0; x <= x_last; ++x) s += v[idx(n)][idx(x)] * v[idx(k)][idx(x)];
            worst = std::max(worst, std::fabs(s - (n == k ? 1 : 0)));
        }
    }
    return static_cast<double>(worst);
}

double duality_error(const Model& model, int levels, int x_last) {
    Wide worst = 0;
    for (int n = 0; n <= levels; ++n) {
        const std::vector<Wide> Q = model.dual_polynomial_row(n, x_last);
        for (int x = 0; x <= x_last; ++x) {
            const Wide P = model.polynomial_wide(n, x);
            worst = std::max(worst, std::fabs(P - Q[idx(x)]) / std::max<Wide>(1, std::fabs(P)));
        }
    }
    return static_cast<double>(worst);
}

double self_duality_error(const Model& model, int last) {
    Wide worst = 0;
    for (int n = 0; n <= last; ++n) {
        for (int x = 0; x < n; ++x) {
            const Wide a = model.polynomial_wide(n, x);
            const Wide b = model.polynomial_wide(x, n);
            worst = std::max(worst, std::fabs(a - b) / std::max<Wide>(1, std::fabs(a)));
        }
    }
    return static_cast<double>(worst);
}

std::vector<CheckResult> verify_family(const ModelParams& params, const VerifyOptions& opt) {
    const FamilyInfo& fi = family_info(params.family);
    Rows rows(std::string(fi.id), params);
    std::optional<Model> maybe;
    try {
        maybe = Model::validate(params);
    } catch (const Error& e) {
        rows.add("validation", "accepted", kNaN, 0, std::string(to_string(e.code())) + ": " + e.what());
        return rows.take();
    }
    const Model& m = *maybe;
    const SpectralOptions so = SpectralOptions::from_budget(opt.eps, opt.t_min);
    const StateSpace space = m.state_space(so.eps_tail);
    const int levels = m.finite() ? std::min(m.N(), opt.max_level) : opt.max_level;
    const int grid_x = m.finite() ? m.N() : space.x_max;

    rows.attempt("orthogonality", "max |G_nm - delta_nm|", tolerance::orthogonality,
                 [&] { return orthogonality_error(m, levels); });
    rows.attempt("duality", "max |P_n - Q_x| / max(1,|P_n|)", tolerance::duality,
                 [&] { return duality_error(m, levels, grid_x); });
    if (fi.self_dual) {
        rows.attempt("self-duality", "max |P_n(x) - P_x(n)| / max(1,|P|)", tolerance::self_duality,
                     [&] { return self_duality_error(m, levels); });
    }

    rows.attempt("normalization", "|d_0^2 sum_x phi0(x)^2 - 1|", tolerance::normalization, [&] {
        return static_cast<double>(std::fabs(m.log_norm_const_sq(0).value() * ground_state_mass(m, space.x_max) - 1));
    });
    if (params.family == Family::meixner || params.family == Family::charlier) {
        rows.attempt("stationary-normalizer", "|d_0^2 / closed form - 1|", tolerance::normalization, [&] {
            const double closed = params.family == Family::meixner
                                      ? std::pow(1 - m.pack().c, m.pack().beta)
                                      : std::exp(-m.pack().a);
            return static_cast<double>(std::fabs(1 / ground_state_mass(m, space.x_max) / closed - 1));
        });
    }

    try {
        const EigensystemReport e = verify_eigensystem(m, space);
        rows.add("eigen-residual", "max ||H phi_n - E(n) phi_n|| / ||phi_n||", e.max_residual, kResidualTolerance);
        rows.add("a-phi0", "||A phi0||_inf", e.a_phi0, kAPhi0Tolerance);
        rows.add("positive-semidefinite", "-min eigenvalue of H", -e.min_eigenvalue, kPsdTolerance);
        rows.add("spectrum", "max |lambda_n - E(n)| / max(E(n),E(1))", e.max_eigenvalue_error, kEigenvalueTolerance,
                 std::to_string(e.levels) + " levels on 0.." + std::to_string(e.lattice_last));
    } catch (const Error& e) {
        rows.add("eigensystem", "report", kNaN, 0, std::string(to_string(e.code())) + ": " + e.what());
    }

    const std::vector<double> times = m.finite() ? std::vector<double>{0.1, 1, 10} : std::vector<double>{0.1, 1};
    std::optional<SpectralData> data;
    std::string build_error;
    try {
        data = SpectralData::build(m, so);
    } catch (const Error& e) {
        build_error = std::string(to_string(e.code())) + ": " + e.what();
    }
    auto spectral = [&](const std::string& check, const std::string& metric, double threshold,
                        const std::function<double()>& fn) {
        if (!data) rows.add(check, metric, kNaN, threshold, build_error);
        else rows.attempt(check, metric, threshold, fn);
    };

    spectral("oracle-equivalence", "max |T_spectral - T_expm|", tolerance::oracle, [&] {
        const OracleKernels orc = oracle_kernels(m, space, times);
        double worst = 0;
        for (std::size_t i = 0; i < times.size(); ++i) {
            worst = std::max(worst, max_abs(transition_matrix(*data, times[i]) - orc.kernels[i]));
        }
        return worst;
    });
    spectral("kernel-forms", "max |T_form - T_polynomial|", tolerance::forms, [&] {
        double worst = 0;
        for (double t : times) {
            const Matrix P = transition_matrix(*data, t, KernelForm::polynomial);
            for (KernelForm f : {KernelForm::normalized, KernelForm::dual, KernelForm::f_form}) {
                worst = std::max(worst, max_abs(transition_matrix(*data, t, f) - P));
            }
        }
        return worst;
    });
    if (m.finite()) {
        spectral("conservation", "max_y |sum_x T[y][x] - 1|", tolerance::conservation, [&] {
            Diagnostics d;
            for (double t : times) transition_matrix(*data, t, KernelForm::polynomial, &d);
            return d.max_row_deviation;
        });
    } else {
        spectral("conservation", "stationary-weighted row loss", space.tail_mass_bound + tolerance::conservation, [&] {
            Diagnostics d;
            for (double t : times) transition_matrix(*data, t, KernelForm::polynomial, &d);
            return d.stationary_row_loss;
        });
    }
    spectral("detailed-balance", "max |pi(y) T[y][x] - pi(x) T[x][y]|", tolerance::detailed_balance, [&] {
        const Distribution pi = stationary_distribution(*data);
        const Matrix T = transition_matrix(*data, 1.0);
        double worst = 0;
        for (int y = 0; y <= data->x_max(); ++y) {
            for (int x = 0; x < y; ++x) {
                worst = std::max(worst, std::fabs(pi.p[idx(y)] * T(y, x) - pi.p[idx(x)] * T(x, y)));
            }
        }
        return worst;
    });
    if (m.finite()) {
        spectral("semigroup", "max |T(0.5) T(1) - T(1.5)|", tolerance::semigroup, [&] {
            return max_abs(transition_matrix(*data, 0.5) * transition_matrix(*data, 1.0) - transition_matrix(*data, 1.5));
        });
        spectral("spectral-gap", "|fitted rate / E(1) - 1|", tolerance::gap_rate, [&] {
            const double e1 = m.energy(1);
            const Distribution pi = stationary_distribution(*data);
            std::vector<double> ts, ds;
            for (int i = 0; i <= 10; ++i) {
                const double t = (10 + i) / e1;
                const Matrix T = transition_matrix(*data, t);
                double d = 0;
                for (int x = 0; x <= data->x_max(); ++x) d += std::fabs(T(0, x) - pi.p[idx(x)]);
                ts.push_back(t);
                ds.push_back(d);
            }
            return std::fabs(fitted_decay_rate(ts, ds) / e1 - 1);
        });
    }
    if (params.family == Family::krawtchouk) {
        spectral("stationary-law", "max |pi(x) - Binomial(N,p)(x)|", tolerance::stationary_entry, [&] {
            const Distribution pi = stationary_distribution(*data);
            double worst = 0;
            for (int x = 0; x <= m.N(); ++x) {
                worst = std::max(worst, std::fabs(pi.p[idx(x)] - binomial_pmf(m.N(), x, m.pack().p)));
            }
            return worst;
        });
    }
    if (params.family == Family::charlier) {
        spectral("stationary-law", "max |d_0^2 phi0(x)^2 - Poisson(a)(x)|", tolerance::stationary_entry, [&] {
            double worst = 0;
            for (int x = 0; x <= data->x_max(); ++x) {
                worst = std::max(worst, std::fabs(precision::to_double(data->stationary(x)) - poisson_pmf(x, m.pack().a)));
            }
            return worst;
        });
    }
    return rows.take();
}

std::vector<CheckResult> verify_closed_form_kernels() {
    std::vector<CheckResult> out;
    const std::vector<double> real_grid{-2, -1, 0, 1, 2};
    const std::vector<double> positive_grid{0.25, 0.5, 1, 1.5, 2};
    constexpr double g = 1.25;
    for (double t : {0.25, 1.0}) {
        Rows h("hermite-mehler", std::nullopt);
        h.attempt("closed-form-kernel", "max |series - closed form| on 5x5 grid", tolerance::closed_form,
                  [&] { return hermite_kernel_check(t, real_grid, real_grid, tolerance::closed_form).max_error; },
                  "t=" + std::to_string(t));
        Rows l("laguerre-hardy-hille", std::nullopt);
        l.attempt("closed-form-kernel", "max |series - closed form| on 5x5 grid", tolerance::closed_form,
                  [&] { return laguerre_kernel_check(t, g, positive_grid, positive_grid, tolerance::closed_form).max_error; },
                  "t=" + std::to_string(t) + ", g=1.25");
        for (auto* r : {&h, &l}) {
            auto rows = r->take();
            out.insert(out.end(), rows.begin(), rows.end());
        }
    }
    return out;
}

}  // namespace bdk
