#pragma once

// The verification suite behind `bdk verify`: every check yields one
// CheckResult row {check, family, params, metric, value, threshold, pass}.

#include <optional>
#include <string>
#include <vector>

#include "bdk/models.hpp"

namespace bdk {

struct CheckResult {
    std::string check;
    std::string family;                 // family id, or the kernel name for closed-form checks
    std::optional<ModelParams> params;
    std::string metric;
    double value = 0;                   // NaN when the check could not run
    double threshold = 0;
    bool pass = false;
    std::string note;                   // error text or context
};

struct VerifyOptions {
    double eps = 1e-12;    // joint truncation budget, split evenly between tail and spectrum
    double t_min = 0.1;
    int max_level = 25;    // orthogonality / duality grid for infinite families
};

namespace tolerance {
inline constexpr double orthogonality = 1e-9;
inline constexpr double duality = 1e-9;
inline constexpr double self_duality = 1e-10;
inline constexpr double oracle = 1e-10;
inline constexpr double semigroup = 1e-8;
inline constexpr double detailed_balance = 1e-10;
inline constexpr double forms = 1e-10;
inline constexpr double conservation = 1e-10;
inline constexpr double stationary_entry = 1e-12;
inline constexpr double normalization = 1e-10;
inline constexpr double gap_rate = 0.05;
inline constexpr double closed_form = 1e-8;
}  // namespace tolerance

/// Least-squares slope of log d(t) against t.
double fitted_decay_rate(const std::vector<double>& t, const std::vector<double>& d);

/// max |G_nm - delta_nm| for the Gram matrix of phi_hat_n, n, m <= levels,
/// summed over a lattice long enough for the eigenvectors to have died out.
double orthogonality_error(const Model& model, int levels);
/// max |P_n(eta(x)) - Q_x(E(n))| / max(1, |P_n|) for n <= levels, x <= x_last.
double duality_error(const Model& model, int levels, int x_last);
/// max |P_n(eta(x)) - P_x(eta(n))| / max(1, |P_n|) for n, x <= last.
double self_duality_error(const Model& model, int last);

std::vector<CheckResult> verify_family(const ModelParams& params, const VerifyOptions& opt = {});
std::vector<CheckResult> verify_closed_form_kernels();

inline bool all_pass(const std::vector<CheckResult>& rows) {
    for (const auto& r : rows) {
        if (!r.pass) return false;
    }
    return true;
}

}  // namespace bdk
