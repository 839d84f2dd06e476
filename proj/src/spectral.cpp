#include "bdk/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

namespace bdk {

namespace {

std::string num(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

constexpr int kLevelCap = 100000;
constexpr int kRatioWindow = 8;
constexpr int kCompletenessExtension = 4000;

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

Wide to_wide(const Fine& v) { return precision::to_wide(v); }

/// Geometric majorant of sum_{k>n} tau_k from the largest ratio over the last
/// few terms; infinite when the terms are not yet decreasing.
Wide geometric_tail(const std::vector<Wide>& tau) {
    const int n = static_cast<int>(tau.size()) - 1;
    if (tau.back() == 0) return 0;
    if (n < kRatioWindow) return std::numeric_limits<Wide>::infinity();
    Wide rho = 0;
    for (int k = n - kRatioWindow + 1; k <= n; ++k) rho = std::max(rho, tau[idx(k)] / tau[idx(k) - 1]);
    if (!(rho < 1)) return std::numeric_limits<Wide>::infinity();
    return tau.back() * rho / (1 - rho);
}

std::vector<Fine> polynomial_row(const Model& m, int n, int x_last) {
    std::vector<Fine> row(idx(x_last) + 1);
    for (int x = 0; x <= x_last; ++x) row[idx(x)] = m.polynomial_fine(n, x);
    return row;
}

CutoffResult cutoff_impl(const Model& m, const StateSpace& space, double t_min, double eps_spec,
                         std::vector<std::vector<Fine>>* rows) {
    if (m.finite()) {
        if (rows) {
            for (int n = 0; n <= m.N(); ++n) rows->push_back(polynomial_row(m, n, space.x_max));
        }
        return {m.N(), 0.0};
    }
    if (!(t_min > 0)) fail(ErrorCode::invalid_argument, "spectral_cutoff: t_min must be positive for infinite families");
    if (!(eps_spec > 0)) fail(ErrorCode::invalid_argument, "spectral_cutoff: eps_spec must be positive");

    std::vector<Wide> phi0_sq(space.size());
    for (int x = 0; x <= space.x_max; ++x) phi0_sq[idx(x)] = m.log_ground_state_sq(x).value();
    std::vector<Wide> tau;
    for (int n = 0; n < kLevelCap; ++n) {
        Wide weighted = 0, plain = 0;
        std::vector<Fine> row;
        if (rows) row = polynomial_row(m, n, space.x_max);
        for (int x = 0; x <= space.x_max; ++x) {
            const Wide a = std::fabs(rows ? to_wide(row[idx(x)]) : m.polynomial_wide(n, x));
            plain = std::max(plain, a);
            weighted = std::max(weighted, a * phi0_sq[idx(x)]);
        }
        tau.push_back(m.log_norm_const_sq(n).value() * std::exp(-static_cast<Wide>(m.energy(n)) * t_min) * weighted *
                      plain);
        if (rows) rows->push_back(std::move(row));
        const Wide bound = geometric_tail(tau);
        if (bound <= eps_spec) return {n, static_cast<double>(bound)};
    }
    fail(ErrorCode::cutoff_failure, std::string(m.info().name) + ": spectral sum not certified within 1e5 levels at t_min=" +
                                        num(t_min) + "; use a larger t_min");
}

/// max_y |1 - sum_n phi_hat_n(y)^2|. Levels past n_max are added (in long
/// double) until their geometric remainder is negligible against eps.
double eigen_completeness_deficit(const Model& m, const std::vector<std::vector<Fine>>& phi_hat, int x_max, double eps) {
    std::vector<Wide> sum(idx(x_max) + 1, 0);
    std::vector<Wide> tau;
    for (const auto& row : phi_hat) {
        Wide worst = 0;
        for (int y = 0; y <= x_max; ++y) {
            const Wide v = to_wide(row[idx(y)] * row[idx(y)]);
            sum[idx(y)] += v;
            worst = std::max(worst, v);
        }
        tau.push_back(worst);
    }
    if (!m.finite()) {
        std::vector<Wide> log_phi0_sq(idx(x_max) + 1);
        for (int y = 0; y <= x_max; ++y) log_phi0_sq[idx(y)] = m.log_ground_state_sq(y).log_abs;
        const int first = static_cast<int>(phi_hat.size());
        for (int n = first; !(geometric_tail(tau) <= 1e-3 * eps); ++n) {
            if (n > first + kCompletenessExtension) {
                fail(ErrorCode::cutoff_failure, std::string(m.info().name) +
                                                    ": completeness sum does not settle within the level extension");
            }
            const Wide log_dn = m.log_norm_const_sq(n).log_abs;
            Wide worst = 0;
            for (int y = 0; y <= x_max; ++y) {
                const Wide p = m.polynomial_wide(n, y);
                const Wide v = std::exp(log_dn + log_phi0_sq[idx(y)]) * p * p;
                sum[idx(y)] += v;
                worst = std::max(worst, v);
            }
            tau.push_back(worst);
        }
    }
    Wide deficit = 0;
    for (Wide s : sum) deficit = std::max(deficit, std::fabs(1 - s));
    return static_cast<double>(deficit);
}

double clamp_entry(const Fine& value, Diagnostics* diag) {
    double out = precision::to_double(value);
    double c = 0;
    if (out < 0) {
        c = -out;
        out = 0;
    } else if (out > 1) {
        c = out - 1;
        out = 1;
    }
    if (c > 0) {
        if (diag) {
            ++diag->clamp_count;
            diag->max_clamp = std::max(diag->max_clamp, c);
        }
        if (c > kClampFailure) {
            fail(ErrorCode::internal_consistency, "kernel entry outside [0,1] by " + num(c) + " (precision exhausted; tighten the state space)");
        }
    }
    return out;
}

void check_time(const SpectralData& d, double t) {
    if (!(t >= 0) || !std::isfinite(t)) fail(ErrorCode::invalid_argument, "t must be a finite nonnegative time");
    if (!d.model().finite() && t > 0 && t < d.options().t_min) {
        fail(ErrorCode::cutoff_failure, "t=" + num(t) + " is below the certified t_min=" +
                                            num(d.options().t_min) + "; rebuild with a smaller t_min");
    }
}

void check_state(const SpectralData& d, int x) {
    if (x < 0 || x > d.x_max()) {
        fail(ErrorCode::out_of_range, "state " + std::to_string(x) + " outside 0.." + std::to_string(d.x_max()));
    }
}

std::vector<Fine> decay(const SpectralData& d, double t) {
    std::vector<Fine> e(idx(d.n_max()) + 1);
    for (int n = 0; n <= d.n_max(); ++n) e[idx(n)] = exp(-d.energy(n) * t);
    return e;
}

Fine kernel_sum(const SpectralData& d, int y, int x, const std::vector<Fine>& e, KernelForm form) {
    Fine s = 0;
    for (int n = 0; n <= d.n_max(); ++n) {
        const Fine& en = e[idx(n)];
        switch (form) {
            case KernelForm::polynomial: s += d.norm_sq(n) * en * d.P(n, x) * d.P(n, y); break;
            case KernelForm::normalized: s += en * d.phi_hat(n, x) * d.phi_hat(n, y); break;
            case KernelForm::dual: s += d.norm_sq(n) * en * d.Q(x, n) * d.Q(y, n); break;
            case KernelForm::f_form: {
                const Fine Fx = d.phi0_sq(x) * d.Q(x, n);
                const Fine Fy = d.phi0_sq(y) * d.Q(y, n);
                s += d.norm_sq(n) * en * Fx * Fy;
                break;
            }
        }
    }
    switch (form) {
        case KernelForm::polynomial:
        case KernelForm::dual: return d.phi0_sq(x) * s;
        case KernelForm::normalized: return d.phi0(x) / d.phi0(y) * s;
        case KernelForm::f_form: return s / d.phi0_sq(y);
    }
    return s;
}

Fine kernel_entry(const SpectralData& d, int y, int x, double t, const std::vector<Fine>& e, KernelForm form) {
    // the t = 0 sum is the completeness relation; return its value, not its rounding
    if (t == 0) return Fine(x == y ? 1 : 0);
    return kernel_sum(d, y, x, e, form);
}

}  // namespace

SpectralOptions SpectralOptions::from_budget(double eps, double t_min) {
    SpectralOptions o;
    o.eps_tail = eps / 2;
    o.eps_spec = eps / 2;
    o.t_min = t_min;
    return o;
}

CutoffResult spectral_cutoff(const Model& model, const StateSpace& space, double t_min, double eps_spec) {
    return cutoff_impl(model, space, t_min, eps_spec, nullptr);
}

SpectralData SpectralData::build(const Model& model, const SpectralOptions& opt) {
    if (!(opt.eps_tail > 0 && opt.eps_tail <= 0.1) || !(opt.eps_spec > 0 && opt.eps_spec <= 0.1)) {
        fail(ErrorCode::invalid_argument, "eps budgets must lie in (0, 0.1]");
    }
    SpectralData d(model);
    d.opt_ = opt;
    d.space_ = model.state_space(opt.eps_tail);
    d.cutoff_ = cutoff_impl(model, d.space_, opt.t_min, opt.eps_spec, &d.P_);

    const int X = d.space_.x_max;
    const int M = d.cutoff_.n_max;
    d.phi0_.resize(d.space_.size());
    std::vector<Fine> log_phi0_sq(d.space_.size());
    for (int x = 0; x <= X; ++x) {
        log_phi0_sq[idx(x)] = model.log_ground_state_sq_fine(x);
        d.phi0_[idx(x)] = exp(log_phi0_sq[idx(x)] / 2);
    }
    d.dsq_.resize(idx(M) + 1);
    d.energy_.resize(idx(M) + 1);
    d.Q_.resize(idx(M) + 1);
    d.phi_hat_.assign(idx(M) + 1, std::vector<Fine>(d.space_.size()));
    for (int n = 0; n <= M; ++n) {
        const Fine log_dn = model.log_norm_const_sq_fine(n);
        d.dsq_[idx(n)] = exp(log_dn);
        d.energy_[idx(n)] = model.energy_fine(n);
        d.Q_[idx(n)] = model.dual_polynomial_row_fine(n, X);
        for (int x = 0; x <= X; ++x) {
            d.phi_hat_[idx(n)][idx(x)] = exp((log_dn + log_phi0_sq[idx(x)]) / 2) * d.P_[idx(n)][idx(x)];
        }
    }

    d.deficit_ = eigen_completeness_deficit(model, d.phi_hat_, X, opt.eps_spec);
    if (!(d.deficit_ <= std::max(opt.eps_spec, 1e-13))) {
        fail(ErrorCode::internal_consistency,
             std::string(model.info().name) + ": eigenvectors are not complete on the state space (1 - sum_n phi_hat_n(y)^2 = " +
                 num(d.deficit_) + ")");
    }
    return d;
}

double transition_probability(const SpectralData& data, int y, int x, double t, KernelForm form, Diagnostics* diag) {
    check_time(data, t);
    check_state(data, y);
    check_state(data, x);
    return clamp_entry(kernel_entry(data, y, x, t, decay(data, t), form), diag);
}

Matrix transition_matrix(const SpectralData& data, double t, KernelForm form, Diagnostics* diag) {
    check_time(data, t);
    const int X = data.x_max();
    const auto e = decay(data, t);
    Matrix T(X + 1, X + 1);
    double worst_row = 0;
    Wide loss = 0, mass = 0;
    for (int y = 0; y <= X; ++y) {
        Wide row = 0;
        for (int x = 0; x <= X; ++x) {
            T(y, x) = clamp_entry(kernel_entry(data, y, x, t, e, form), diag);
            row += T(y, x);
        }
        worst_row = std::max(worst_row, static_cast<double>(std::fabs(row - 1)));
        const Wide w = to_wide(data.stationary(y));
        loss += w * (1 - row);
        mass += w;
    }
    if (diag) {
        diag->max_row_deviation = std::max(diag->max_row_deviation, worst_row);
        diag->stationary_row_loss = std::max(diag->stationary_row_loss, static_cast<double>(std::fabs(loss / mass)));
    }
    return T;
}

void check_distribution(const Distribution& d, std::size_t size) {
    if (d.p.size() != size) {
        fail(ErrorCode::invalid_argument, "distribution has " + std::to_string(d.p.size()) + " entries, state space has " +
                                              std::to_string(size));
    }
    Wide s = 0;
    for (double v : d.p) {
        if (!(v >= 0) || !std::isfinite(v)) fail(ErrorCode::invalid_argument, "distribution has a negative or non-finite entry");
        s += v;
    }
    if (std::fabs(s - 1) > 1e-9L) fail(ErrorCode::invalid_argument, "distribution does not sum to 1");
}

Distribution stationary_distribution(const SpectralData& data) {
    Distribution out;
    out.p.resize(data.space().size());
    Fine s = 0;
    for (int x = 0; x <= data.x_max(); ++x) s += data.stationary(x);
    for (int x = 0; x <= data.x_max(); ++x) out.p[idx(x)] = precision::to_double(data.stationary(x) / s);
    out.renormalized_by = precision::to_double(1 - s);
    return out;
}

Distribution evolve(const SpectralData& data, const Distribution& initial, double t, Diagnostics* diag) {
    check_distribution(initial, data.space().size());
    check_time(data, t);
    if (t == 0) {
        Distribution out = initial;
        out.renormalized_by = 0;
        return out;
    }
    const Matrix T = transition_matrix(data, t, KernelForm::polynomial, diag);
    const int X = data.x_max();
    std::vector<Wide> acc(data.space().size(), 0);
    for (int y = 0; y <= X; ++y) {
        const Wide w = initial.p[static_cast<std::size_t>(y)];
        if (w == 0) continue;
        for (int x = 0; x <= X; ++x) acc[static_cast<std::size_t>(x)] += w * T(y, x);
    }
    const Wide s = std::accumulate(acc.begin(), acc.end(), Wide(0));
    Distribution out;
    out.t = initial.t + t;
    out.p.resize(acc.size());
    const bool renorm = std::fabs(s - 1) > 1e-13L;
    for (std::size_t i = 0; i < acc.size(); ++i) out.p[i] = static_cast<double>(renorm ? acc[i] / s : acc[i]);
    out.renormalized_by = renorm ? static_cast<double>(1 - s) : 0.0;
    return out;
}

std::vector<std::vector<Wide>> normalized_eigenvectors(const Model& model, int n_last, int x_last) {
    std::vector<Wide> log_phi0_sq(static_cast<std::size_t>(x_last) + 1);
    for (int x = 0; x <= x_last; ++x) log_phi0_sq[static_cast<std::size_t>(x)] = model.log_ground_state_sq(x).log_abs;
    std::vector<std::vector<Wide>> v(static_cast<std::size_t>(n_last) + 1,
                                     std::vector<Wide>(static_cast<std::size_t>(x_last) + 1));
    for (int n = 0; n <= n_last; ++n) {
        const Wide log_dn = model.log_norm_const_sq(n).log_abs;
        for (int x = 0; x <= x_last; ++x) {
            v[static_cast<std::size_t>(n)][static_cast<std::size_t>(x)] =
                std::exp((log_dn + log_phi0_sq[static_cast<std::size_t>(x)]) / 2) * model.polynomial_wide(n, x);
        }
    }
    return v;
}

int eigenvector_support(const Model& model, int n_last, int x_start, double tol) {
    if (model.finite()) return model.N();
    constexpr int kQuiet = 8;
    constexpr int kExtension = 5000;
    std::vector<Wide> log_dn(static_cast<std::size_t>(n_last) + 1);
    for (int n = 0; n <= n_last; ++n) log_dn[static_cast<std::size_t>(n)] = model.log_norm_const_sq(n).log_abs;
    int quiet = 0;
    int x = x_start;
    for (; x <= x_start + kExtension; ++x) {
        const Wide log_phi = model.log_ground_state_sq(x).log_abs;
        Wide worst = 0;
        for (int n = 0; n <= n_last; ++n) {
            const Wide v = std::exp((log_dn[static_cast<std::size_t>(n)] + log_phi) / 2) * model.polynomial_wide(n, x);
            worst = std::max(worst, v * v);
        }
        quiet = worst < tol ? quiet + 1 : 0;
        if (quiet >= kQuiet && x > x_start) return x;
    }
    fail(ErrorCode::non_convergence, std::string(model.info().name) + ": eigenvectors do not decay within the extension");
}

}  // namespace bdk
