#include "bdk/models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "formulas.hpp"

namespace bdk {

namespace {

using precision::Tier160;
using precision::Tier320;
using precision::Tier40;
using precision::Tier640;
using precision::Tier80;

constexpr int kInfiniteStateCap = 1000000;
constexpr int kPositivityProbe = 256;  // lattice points checked for infinite families

void require(bool ok, const FamilyInfo& fi, const std::string& what) {
    if (!ok) fail(ErrorCode::constraint_violation, std::string(fi.name) + ": constraint violated: " + what);
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

ParamPack pack_params(const ModelParams& raw) {
    const FamilyInfo& fi = family_info(raw.family);
    for (const auto& [k, v] : raw.values) {
        if (std::find(fi.params.begin(), fi.params.end(), k) == fi.params.end()) {
            fail(ErrorCode::invalid_argument, std::string(fi.name) + " has no parameter '" + k + "'");
        }
        if (!std::isfinite(v)) fail(ErrorCode::invalid_argument, "parameter '" + k + "' is not finite");
    }
    for (auto name : fi.params) {
        if (!raw.values.count(std::string(name))) {
            fail(ErrorCode::invalid_argument, std::string(fi.name) + " requires parameter '" + std::string(name) + "'");
        }
    }
    if (fi.q_family) {
        if (!raw.q) fail(ErrorCode::invalid_argument, std::string(fi.name) + " requires q");
        if (!(*raw.q > 0 && *raw.q < 1)) fail(ErrorCode::constraint_violation, "q must satisfy 0<q<1 (got " + fmt(*raw.q) + ")");
    } else if (raw.q) {
        fail(ErrorCode::invalid_argument, std::string(fi.name) + " takes no q");
    }
    if (fi.finite) {
        if (!raw.N) fail(ErrorCode::invalid_argument, std::string(fi.name) + " requires N");
        if (*raw.N < 1) fail(ErrorCode::constraint_violation, "N must be a positive integer");
        if (*raw.N > 100000) fail(ErrorCode::out_of_range, "N is too large");
    } else if (raw.N) {
        fail(ErrorCode::invalid_argument, std::string(fi.name) + " is an infinite family and takes no N");
    }

    ParamPack k;
    k.family = raw.family;
    k.N = raw.N.value_or(0);
    k.q = raw.q.value_or(0);
    auto get = [&](const char* name) {
        auto it = raw.values.find(name);
        return it == raw.values.end() ? 0.0 : it->second;
    };
    k.a = get("a");
    k.b = get("b");
    k.c = get("c");
    k.d = get("d");
    k.p = get("p");
    k.beta = get("beta");
    if (raw.family == Family::racah) k.c = -k.N;
    if (raw.family == Family::q_racah) k.c = std::pow(k.q, -k.N);
    return k;
}

void check_constraints(const ParamPack& k) {
    const FamilyInfo& fi = family_info(k.family);
    const double q = k.q, a = k.a, b = k.b, c = k.c, d = k.d, p = k.p;
    const int N = k.N;
    switch (k.family) {
        case Family::racah:
            require(a >= b, fi, "a>=b");
            require(d > 0, fi, "d>0");
            require(a > N + d, fi, "a>N+d");
            require(b > 0 && b < 1 + d, fi, "0<b<1+d");
            break;
        case Family::hahn:
        case Family::dual_hahn:
            require(a > 0, fi, "a>0");
            require(b > 0, fi, "b>0");
            break;
        case Family::krawtchouk: require(p > 0 && p < 1, fi, "0<p<1"); break;
        case Family::q_racah: {
            require(a <= b, fi, "a<=b");
            require(d > 0 && d < 1, fi, "0<d<1");
            require(a > 0 && a < std::pow(q, N) * d, fi, "0<a<q^N d");
            require(q * d < b && b < 1, fi, "qd<b<1");
            require(a * b * c / (d * q) < 1 / q, fi, "dt<q^-1");
            break;
        }
        case Family::q_hahn:
        case Family::dual_q_hahn:
            require(a > 0 && a < 1, fi, "0<a<1");
            require(b > 0 && b < 1, fi, "0<b<1");
            break;
        case Family::quantum_q_krawtchouk: require(p > std::pow(q, -N), fi, "p>q^-N"); break;
        case Family::q_krawtchouk: require(p > 0, fi, "p>0"); break;
        case Family::affine_q_krawtchouk: require(p > 0 && p < 1 / q, fi, "0<p<q^-1"); break;
        case Family::meixner:
            require(k.beta > 0, fi, "beta>0");
            require(c > 0 && c < 1, fi, "0<c<1");
            break;
        case Family::charlier:
        case Family::alternative_q_charlier:
        case Family::q_charlier: require(a > 0, fi, "a>0"); break;
        case Family::little_q_jacobi:
            require(a > 0 && a < 1 / q, fi, "0<a<q^-1");
            require(b < 1 / q, fi, "b<q^-1");
            break;
        case Family::q_meixner:
            require(b > 0 && b < 1 / q, fi, "0<b<q^-1");
            require(c > 0, fi, "c>0");
            break;
        case Family::little_q_laguerre:
        case Family::al_salam_carlitz_ii: require(a > 0 && a < 1 / q, fi, "0<a<q^-1"); break;
    }
}

void check_lattice(const ParamPack& k) {
    const FamilyInfo& fi = family_info(k.family);
    const detail::Formulas<double> F(k);
    const int last = fi.finite ? k.N : kPositivityProbe;
    for (int x = 0; x <= last; ++x) {
        if (x < last || !fi.finite) {
            const double B = F.birth(x);
            if (!(B > 0) || !std::isfinite(B)) {
                fail(ErrorCode::model_degeneracy,
                     std::string(fi.name) + ": B(" + std::to_string(x) + ")=" + fmt(B) + " is not positive");
            }
        }
        if (x > 0) {
            const double D = F.death(x);
            if (!(D > 0) || !std::isfinite(D)) {
                fail(ErrorCode::model_degeneracy,
                     std::string(fi.name) + ": D(" + std::to_string(x) + ")=" + fmt(D) + " is not positive");
            }
        }
    }
    for (int x = 1; x <= std::min(last, 32); ++x) {
        if (!(F.energy(x) > F.energy(x - 1)) || !(F.eta(x) > F.eta(x - 1))) {
            fail(ErrorCode::model_degeneracy, std::string(fi.name) + ": E(n) or eta(x) not increasing at " +
                                                  std::to_string(x));
        }
    }
}

LogValue to_log_value(const qspecial::SignedLog<Wide>& s) { return LogValue{s.sign, s.log_abs}; }

template <class R>
std::vector<R> dual_row(const ParamPack& k, long n, long x_last) {
    const detail::Formulas<R> F(k);
    std::vector<R> Q(static_cast<std::size_t>(x_last) + 1);
    Q[0] = R(1);
    if (x_last == 0) return Q;
    const R E = F.energy(n);
    const R B0 = F.birth(0);
    Q[1] = (B0 - E) / B0;
    for (long x = 1; x < x_last; ++x) {
        const R B = F.birth(x);
        const R D = F.death(x);
        Q[x + 1] = ((B + D - E) * Q[x] - D * Q[x - 1]) / B;
    }
    return Q;
}

template <class R>
std::vector<Wide> widen(const std::vector<R>& v) {
    std::vector<Wide> out(v.size());
    std::transform(v.begin(), v.end(), out.begin(), [](const R& r) { return precision::to_wide(r); });
    return out;
}

bool rows_agree(const std::vector<Wide>& lo, const std::vector<Wide>& hi, const std::vector<Wide>& floor) {
    for (std::size_t i = 0; i < lo.size(); ++i) {
        const Wide scale = std::max(std::fabs(hi[i]), floor[i]);
        if (!(std::fabs(lo[i] - hi[i]) <= 1e-17L * scale)) return false;
    }
    return true;
}

template <class R>
std::vector<Fine> fine_dual_row(const ParamPack& k, long n, long x_last) {
    const std::vector<R> row = dual_row<R>(k, n, x_last);
    std::vector<Fine> out(row.size());
    std::transform(row.begin(), row.end(), out.begin(), [](const R& r) { return precision::convert<Fine>(r); });
    return out;
}

bool fine_rows_agree(const std::vector<Fine>& lo, const std::vector<Fine>& hi, const std::vector<Wide>& floor) {
    for (std::size_t i = 0; i < lo.size(); ++i) {
        const Wide scale = std::max(std::fabs(precision::to_wide(hi[i])), floor[i]);
        if (!(precision::to_wide(abs(lo[i] - hi[i])) <= 1e-34L * scale)) return false;
    }
    return true;
}

Fine positive_log(const qspecial::SignedLog<Fine>& s, const char* what, int i) {
    if (s.sign != 1) {
        fail(ErrorCode::internal_consistency, std::string(what) + "(" + std::to_string(i) + ") is not positive");
    }
    return s.log_abs;
}

}  // namespace

Wide LogValue::value() const { return sign == 0 ? 0 : sign * std::exp(log_abs); }

Model Model::validate(const ModelParams& raw) {
    ParamPack k = pack_params(raw);
    check_constraints(k);
    check_lattice(k);
    return Model(raw, k);
}

int Model::N() const {
    if (!finite()) fail(ErrorCode::invalid_argument, std::string(info().name) + " has no N");
    return pack_.N;
}

double Model::d_tilde() const {
    const auto& k = pack_;
    if (k.family == Family::racah) return k.a + k.b - k.N - k.d - 1;
    if (k.family == Family::q_racah) return k.a * k.b * std::pow(k.q, -k.N) / (k.d * k.q);
    fail(ErrorCode::invalid_argument, "d_tilde is defined for Racah and q-Racah only");
}

int Model::max_state() const { return finite() ? pack_.N : kInfiniteStateCap; }

void Model::check_state(int x) const {
    if (x < 0 || x > max_state()) {
        fail(ErrorCode::out_of_range, "state " + std::to_string(x) + " outside 0.." + std::to_string(max_state()));
    }
}

void Model::check_level(int n) const {
    if (n < 0 || n > max_state()) {
        fail(ErrorCode::out_of_range, "level " + std::to_string(n) + " outside 0.." + std::to_string(max_state()));
    }
}

double Model::birth_rate(int x) const {
    check_state(x);
    if (finite() && x == pack_.N) return 0.0;
    return detail::Formulas<double>(pack_).birth(x);
}

double Model::death_rate(int x) const {
    check_state(x);
    if (x == 0) return 0.0;
    return detail::Formulas<double>(pack_).death(x);
}

double Model::energy(int n) const {
    check_level(n);
    if (n == 0) return 0.0;
    return detail::Formulas<double>(pack_).energy(n);
}

double Model::sinusoidal(int x) const {
    check_state(x);
    if (x == 0) return 0.0;
    return detail::Formulas<double>(pack_).eta(x);
}

LogValue Model::log_ground_state_sq(int x) const {
    check_state(x);
    return to_log_value(detail::Formulas<Wide>(pack_).ground_state_sq(x));
}

double Model::ground_state_sq(int x, GroundStateMethod method) const {
    check_state(x);
    if (method == GroundStateMethod::closed_form) return static_cast<double>(log_ground_state_sq(x).value());
    const detail::Formulas<Wide> F(pack_);
    Wide log_sum = 0;
    for (int y = 0; y < x; ++y) log_sum += std::log(F.birth(y) / F.death(y + 1));
    return static_cast<double>(std::exp(log_sum));
}

LogValue Model::log_norm_const_sq(int n) const {
    check_level(n);
    return to_log_value(detail::Formulas<Wide>(pack_).norm_const_sq(n));
}

double Model::norm_const_sq(int n) const { return static_cast<double>(log_norm_const_sq(n).value()); }

Wide Model::phi_hat_scale(int n, int x) const {
    return std::exp((log_norm_const_sq(n).log_abs + log_ground_state_sq(x).log_abs) / 2);
}

Wide Model::polynomial_wide(int n, int x) const {
    check_level(n);
    check_state(x);
    if (n == 0 || x == 0) return 1;
    const Wide floor = std::min<Wide>(1, Wide(0.01) / phi_hat_scale(n, x));
    const ParamPack k = pack_;
    auto build = [&]<class R>() { return detail::Formulas<R>(k).polynomial(n, x); };
    const auto v = qspecial::accurate_series(build, floor);
    if (!v.certified) {
        fail(ErrorCode::non_convergence, "P_" + std::to_string(n) + "(eta(" + std::to_string(x) +
                                             ")): precision exhausted at " + std::to_string(v.digits10) + " digits");
    }
    return v.value;
}

double Model::polynomial(int n, int x) const { return static_cast<double>(polynomial_wide(n, x)); }

std::vector<Wide> Model::dual_polynomial_row(int n, int x_last) const {
    check_level(n);
    check_state(x_last);
    std::vector<Wide> floor(static_cast<std::size_t>(x_last) + 1);
    const Wide log_dn = log_norm_const_sq(n).log_abs;
    {
        const detail::Formulas<Wide> F(pack_);
        for (int x = 0; x <= x_last; ++x) {
            const Wide scale = std::exp((log_dn + F.ground_state_sq(x).log_abs) / 2);
            floor[static_cast<std::size_t>(x)] = std::min<Wide>(1, Wide(0.01) / scale);
        }
    }
    std::vector<Wide> prev = dual_row<Wide>(pack_, n, x_last);
    std::vector<Wide> cur = widen(dual_row<Tier40>(pack_, n, x_last));
    if (rows_agree(prev, cur, floor)) return cur;
    prev = std::move(cur);
    cur = widen(dual_row<Tier80>(pack_, n, x_last));
    if (rows_agree(prev, cur, floor)) return cur;
    prev = std::move(cur);
    cur = widen(dual_row<Tier160>(pack_, n, x_last));
    if (rows_agree(prev, cur, floor)) return cur;
    prev = std::move(cur);
    cur = widen(dual_row<Tier320>(pack_, n, x_last));
    if (rows_agree(prev, cur, floor)) return cur;
    prev = std::move(cur);
    cur = widen(dual_row<Tier640>(pack_, n, x_last));
    if (rows_agree(prev, cur, floor)) return cur;
    fail(ErrorCode::non_convergence, "Q_x(E(" + std::to_string(n) + ")): recurrence did not stabilise at 640 digits");
}

double Model::dual_polynomial(int x, int n) const {
    return static_cast<double>(dual_polynomial_row(n, x).back());
}

Fine Model::energy_fine(int n) const {
    check_level(n);
    if (n == 0) return Fine(0);
    return detail::Formulas<Fine>(pack_).energy(n);
}

Fine Model::log_ground_state_sq_fine(int x) const {
    check_state(x);
    return positive_log(detail::Formulas<Fine>(pack_).ground_state_sq(x), "phi0^2", x);
}

Fine Model::log_norm_const_sq_fine(int n) const {
    check_level(n);
    return positive_log(detail::Formulas<Fine>(pack_).norm_const_sq(n), "d_n^2", n);
}

Fine Model::polynomial_fine(int n, int x) const {
    check_level(n);
    check_state(x);
    if (n == 0 || x == 0) return Fine(1);
    const Wide floor = std::min<Wide>(1, Wide(0.01) / phi_hat_scale(n, x));
    const ParamPack k = pack_;
    auto build = [&]<class R>() { return detail::Formulas<R>(k).polynomial(n, x); };
    const auto v = qspecial::accurate_series<Fine>(build, floor, 1e-34);
    if (!v.certified) {
        fail(ErrorCode::non_convergence, "P_" + std::to_string(n) + "(eta(" + std::to_string(x) +
                                             ")): precision exhausted at " + std::to_string(v.digits10) + " digits");
    }
    return v.value;
}

std::vector<Fine> Model::dual_polynomial_row_fine(int n, int x_last) const {
    check_level(n);
    check_state(x_last);
    std::vector<Wide> floor(static_cast<std::size_t>(x_last) + 1);
    const Wide log_dn = log_norm_const_sq(n).log_abs;
    {
        const detail::Formulas<Wide> F(pack_);
        for (int x = 0; x <= x_last; ++x) {
            const Wide scale = std::exp((log_dn + F.ground_state_sq(x).log_abs) / 2);
            floor[static_cast<std::size_t>(x)] = std::min<Wide>(1, Wide(0.01) / scale);
        }
    }
    std::vector<Fine> prev = fine_dual_row<Tier40>(pack_, n, x_last);
    std::vector<Fine> cur = fine_dual_row<Tier80>(pack_, n, x_last);
    if (fine_rows_agree(prev, cur, floor)) return cur;
    prev = std::move(cur);
    cur = fine_dual_row<Tier160>(pack_, n, x_last);
    if (fine_rows_agree(prev, cur, floor)) return cur;
    prev = std::move(cur);
    cur = fine_dual_row<Tier320>(pack_, n, x_last);
    if (fine_rows_agree(prev, cur, floor)) return cur;
    prev = std::move(cur);
    cur = fine_dual_row<Tier640>(pack_, n, x_last);
    if (fine_rows_agree(prev, cur, floor)) return cur;
    fail(ErrorCode::non_convergence, "Q_x(E(" + std::to_string(n) + ")): recurrence did not stabilise at 640 digits");
}

double Model::ratio_limit() const {
    switch (pack_.family) {
        case Family::meixner: return pack_.c;
        case Family::little_q_jacobi:
        case Family::little_q_laguerre: return pack_.a * pack_.q;
        default: return 0.0;
    }
}

StateSpace Model::truncate_state_space(double eps_tail) const {
    if (finite()) fail(ErrorCode::invalid_argument, "truncate_state_space: finite family");
    if (!(eps_tail > 0 && eps_tail < 1)) fail(ErrorCode::invalid_argument, "eps_tail must lie in (0,1)");

    const detail::Formulas<Wide> F(pack_);
    auto ratio = [&](int x) { return F.birth(x) / F.death(x + 1); };
    const Wide limit = ratio_limit();
    constexpr int kLookahead = 64;

    // w[x] = stationary mass d0^2 phi0(x)^2 by the two-term ratio
    std::vector<Wide> w{log_norm_const_sq(0).value()};
    Wide certified_bound = -1;
    int xc = -1;
    for (int X = 0; X < kInfiniteStateCap; ++X) {
        w.push_back(w.back() * ratio(X));
        Wide rho = limit;
        for (int j = 1; j <= kLookahead; ++j) rho = std::max(rho, ratio(X + j));
        if (rho < 1) {
            const Wide bound = w[static_cast<std::size_t>(X) + 1] / (1 - rho);
            if (bound <= Wide(eps_tail) * 1e-6L || bound == 0) {
                certified_bound = bound;
                xc = X;
                break;
            }
        }
    }
    if (xc < 0) {
        fail(ErrorCode::non_normalizable,
             std::string(info().name) + ": B(x)/D(x+1) does not fall below 1 within 1e6 states");
    }
    // tail(X) = sum_{X<x<=xc} w[x] + bound; pick the smallest X with tail(X) < eps
    std::vector<Wide> tail(static_cast<std::size_t>(xc) + 1);
    Wide acc = certified_bound;
    for (int X = xc; X >= 0; --X) {
        tail[static_cast<std::size_t>(X)] = acc;
        acc += w[static_cast<std::size_t>(X)];
    }
    int x_max = xc;
    for (int X = 0; X <= xc; ++X) {
        if (tail[static_cast<std::size_t>(X)] < eps_tail) {
            x_max = X;
            break;
        }
    }
    StateSpace s;
    s.kind = StateSpace::Kind::truncated;
    s.x_max = x_max;
    s.tail_mass_bound = static_cast<double>(tail[static_cast<std::size_t>(x_max)]);
    return s;
}

StateSpace Model::state_space(double eps_tail) const {
    if (!finite()) return truncate_state_space(eps_tail);
    StateSpace s;
    s.kind = StateSpace::Kind::finite;
    s.x_max = pack_.N;
    return s;
}

double little_q_jacobi_printed_form(const Model& m, int n, int x) {
    if (m.family() != Family::little_q_jacobi) fail(ErrorCode::invalid_argument, "not a little q-Jacobi model");
    if (n < 0 || x < 0) fail(ErrorCode::out_of_range, "negative index");
    return precision::to_double(detail::Formulas<precision::Tier160>(m.pack()).little_q_jacobi_printed(n, x).value);
}

}  // namespace bdk
