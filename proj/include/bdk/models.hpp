#pragma once

// Catalog of the 18 exactly solvable birth-death families. A validated Model
// owns its parameters and evaluates B, D, E(n), eta(x), phi0(x)^2, d_n^2, the
// eigenpolynomials P_n(eta(x)) and the dual polynomials Q_x(E(n)).

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bdk/error.hpp"
#include "bdk/precision.hpp"

namespace bdk {

using precision::Fine;
using precision::Wide;

enum class Family {
    racah,
    hahn,
    dual_hahn,
    krawtchouk,
    q_racah,
    q_hahn,
    dual_q_hahn,
    quantum_q_krawtchouk,
    q_krawtchouk,
    affine_q_krawtchouk,
    meixner,
    charlier,
    little_q_jacobi,
    q_meixner,
    little_q_laguerre,
    al_salam_carlitz_ii,
    alternative_q_charlier,
    q_charlier,
};

inline constexpr std::size_t family_count = 18;

struct FamilyInfo {
    Family family;
    std::string_view id;    // e.g. "q-racah-ks3.2"
    std::string_view name;  // e.g. "q-Racah"
    std::string_view ks;    // e.g. "KS3.2"
    bool finite;
    bool q_family;
    bool self_dual;
    std::vector<std::string_view> params;
    std::string_view constraints;
};

const std::array<FamilyInfo, family_count>& families();
const FamilyInfo& family_info(Family f);
/// Looks up a KS-tagged id; throws invalid_argument for unknown ids.
Family family_from_id(std::string_view id);

/// Raw parameter set as read from a file or the command line.
struct ModelParams {
    Family family = Family::krawtchouk;
    std::optional<double> q;
    std::optional<int> N;
    std::map<std::string, double> values;
};

/// Flat numeric view of a parameter set, shared with the scalar-generic formulas.
struct ParamPack {
    Family family = Family::krawtchouk;
    int N = 0;
    double q = 0, a = 0, b = 0, c = 0, d = 0, p = 0, beta = 0;
};

struct StateSpace {
    enum class Kind { finite, truncated };
    Kind kind = Kind::finite;
    int x_max = 0;
    double tail_mass_bound = 0;  // stationary mass beyond x_max (truncated only)

    std::size_t size() const { return static_cast<std::size_t>(x_max) + 1; }
    bool finite() const { return kind == Kind::finite; }
};

enum class GroundStateMethod { closed_form, product };

/// Log-magnitude form of a positive quantity together with the sign of the
/// underlying closed form (which must be +1 for phi0^2 and d_n^2).
struct LogValue {
    int sign = 1;
    Wide log_abs = 0;
    Wide value() const;
};

class Model {
public:
    /// Checks the family's published constraints and lattice positivity of B, D.
    static Model validate(const ModelParams& raw);

    Family family() const { return pack_.family; }
    const FamilyInfo& info() const { return family_info(pack_.family); }
    const ModelParams& params() const { return raw_; }
    const ParamPack& pack() const { return pack_; }
    bool finite() const { return info().finite; }
    /// N for finite families; throws for infinite ones.
    int N() const;
    double q() const { return pack_.q; }
    /// Derived d~ for Racah and q-Racah.
    double d_tilde() const;
    /// Largest valid state for finite families, otherwise a large sentinel.
    int max_state() const;

    double birth_rate(int x) const;
    double death_rate(int x) const;
    double energy(int n) const;
    double sinusoidal(int x) const;

    double ground_state_sq(int x, GroundStateMethod method = GroundStateMethod::closed_form) const;
    LogValue log_ground_state_sq(int x) const;
    double norm_const_sq(int n) const;
    LogValue log_norm_const_sq(int n) const;

    /// P_n(eta(x)) from the terminating series, in whatever precision tier is
    /// needed to hold relative error below ~1e-18 (absolute near zeros).
    double polynomial(int n, int x) const;
    Wide polynomial_wide(int n, int x) const;
    /// Q_x(E(n)) for x = 0..x_last by the three-term recurrence, escalating
    /// precision until two tiers agree.
    std::vector<Wide> dual_polynomial_row(int n, int x_last) const;
    double dual_polynomial(int x, int n) const;

    /// The same quantities at the spectral working precision (about 34 correct
    /// digits). phi0^2 and d_n^2 are returned as logarithms.
    Fine energy_fine(int n) const;
    Fine log_ground_state_sq_fine(int x) const;
    Fine log_norm_const_sq_fine(int n) const;
    Fine polynomial_fine(int n, int x) const;
    std::vector<Fine> dual_polynomial_row_fine(int n, int x_last) const;

    /// Smallest x_max whose stationary tail mass is below eps_tail.
    StateSpace truncate_state_space(double eps_tail) const;
    /// {0..N} for finite families, truncate_state_space(eps_tail) otherwise.
    StateSpace state_space(double eps_tail) const;

private:
    Model(ModelParams raw, ParamPack pack) : raw_(std::move(raw)), pack_(pack) {}
    void check_state(int x) const;
    void check_level(int n) const;
    Wide phi_hat_scale(int n, int x) const;
    double ratio_limit() const;

    ModelParams raw_;
    ParamPack pack_;
};

/// Printed normalisation of the little q-Jacobi eigenpolynomial, which loses
/// many digits to cancellation; kept for cross-checks at small n.
double little_q_jacobi_printed_form(const Model& m, int n, int x);

/// Built-in default parameter set for a family.
ModelParams default_params(Family f);

}  // namespace bdk
