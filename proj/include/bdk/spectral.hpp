#pragma once

// Transition kernels by spectral expansion. Matrices are indexed [y][x] with
// y the start state and x the end state. Spectral data are held at 40 digits:
// rows that start deep in the stationary tail lose many digits to cancellation.

#include <vector>

#include <Eigen/Dense>

#include "bdk/models.hpp"

namespace bdk {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct SpectralOptions {
    double eps_tail = 1e-12;  // stationary mass allowed beyond x_max
    double eps_spec = 1e-12;  // kernel mass allowed beyond n_max at t >= t_min
    double t_min = 0.1;       // smallest positive time the cutoff is certified for

    /// Joint budget: eps_tail = eps_spec = eps/2.
    static SpectralOptions from_budget(double eps, double t_min = 0.1);
};

struct CutoffResult {
    int n_max = 0;
    double tail_bound = 0;  // bound on the dropped levels' contribution at t_min
};

/// Smallest n_max whose remainder, majorised by a geometric ratio of
///   tau_n = d_n^2 e^{-E(n) t_min} max_x phi0(x)^2 |P_n(x)| max_y |P_n(y)|,
/// is below eps_spec. Finite families return N with a zero bound.
CutoffResult spectral_cutoff(const Model& model, const StateSpace& space, double t_min, double eps_spec);

enum class KernelForm { polynomial, normalized, dual, f_form };

struct Diagnostics {
    std::size_t clamp_count = 0;
    double max_clamp = 0;        // largest |value - clamp(value)|
    double max_row_deviation = 0;  // max_y |sum_x T[y][x] - 1|
    // |sum_y pi(y) (1 - sum_x T[y][x])| / sum_y pi(y); bounded by the tail mass
    double stationary_row_loss = 0;
};

/// Entries whose clamp exceeds this fail with internal_consistency.
inline constexpr double kClampFailure = 1e-9;

class SpectralData {
public:
    static SpectralData build(const Model& model, const SpectralOptions& opt = {});

    const Model& model() const { return model_; }
    const StateSpace& space() const { return space_; }
    const SpectralOptions& options() const { return opt_; }
    int x_max() const { return space_.x_max; }
    int n_max() const { return cutoff_.n_max; }
    double spectral_tail_bound() const { return cutoff_.tail_bound; }
    /// max_y |1 - sum_n phi_hat_n(y)^2| over the state space.
    double completeness_deficit() const { return deficit_; }

    const Fine& phi0(int x) const { return phi0_[idx(x)]; }
    Fine phi0_sq(int x) const { return phi0_[idx(x)] * phi0_[idx(x)]; }
    const Fine& norm_sq(int n) const { return dsq_[idx(n)]; }
    const Fine& energy(int n) const { return energy_[idx(n)]; }
    const Fine& P(int n, int x) const { return P_[idx(n)][idx(x)]; }
    const Fine& Q(int x, int n) const { return Q_[idx(n)][idx(x)]; }
    const Fine& phi_hat(int n, int x) const { return phi_hat_[idx(n)][idx(x)]; }
    /// d_0^2 phi0(x)^2
    Fine stationary(int x) const { return phi0_sq(x) * dsq_[0]; }

private:
    SpectralData(Model m) : model_(std::move(m)) {}
    static std::size_t idx(int i) { return static_cast<std::size_t>(i); }

    Model model_;
    StateSpace space_;
    SpectralOptions opt_;
    CutoffResult cutoff_;
    double deficit_ = 0;
    std::vector<Fine> phi0_, dsq_, energy_;
    std::vector<std::vector<Fine>> P_, Q_, phi_hat_;  // [n][x]
};

/// One kernel entry P(y -> x; t), clamped to [0,1] with the clamp recorded.
double transition_probability(const SpectralData& data, int y, int x, double t,
                              KernelForm form = KernelForm::polynomial, Diagnostics* diag = nullptr);

Matrix transition_matrix(const SpectralData& data, double t, KernelForm form = KernelForm::polynomial,
                         Diagnostics* diag = nullptr);

struct Distribution {
    std::vector<double> p;
    double t = 0;
    double renormalized_by = 0;  // mass added back after truncation, 0 if untouched
};

/// Throws invalid_argument unless p has the right size, is nonnegative and sums to 1 (1e-9).
void check_distribution(const Distribution& d, std::size_t size);

Distribution stationary_distribution(const SpectralData& data);

/// sum_y initial(y) T(t)[y][x]; t = 0 returns the input unchanged.
Distribution evolve(const SpectralData& data, const Distribution& initial, double t, Diagnostics* diag = nullptr);

/// Normalised eigenvectors phi_hat_n(x) = d_n phi0(x) P_n(eta(x)), n <= n_last, x <= x_last.
std::vector<std::vector<Wide>> normalized_eigenvectors(const Model& model, int n_last, int x_last);

/// Last lattice point beyond which every phi_hat_n^2 (n <= n_last) stays below tol;
/// at least x_start. For finite families returns N.
int eigenvector_support(const Model& model, int n_last, int x_start, double tol = 1e-26);

}  // namespace bdk
