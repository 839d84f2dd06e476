#pragma once

// Brute-force checks that share nothing with the spectral module except the
// rates: dense generator and Hamiltonian, exp(tL) through a high-precision
// tridiagonal eigendecomposition, eigenpair residuals, Gillespie paths, and the
// two continuous-variable kernels with known closed forms.

#include <cstdint>
#include <string>
#include <vector>

#include "bdk/models.hpp"
#include "bdk/spectral.hpp"

namespace bdk {

struct GeneratorMatrix {
    StateSpace space;
    bool reflecting = false;     // truncated space with B(x_max) := 0
    double removed_birth = 0;    // the B(x_max) that was dropped
    std::vector<double> birth, death;  // rates as used
    std::vector<Wide> phi0;      // diagonal of Phi, phi0(0) = 1
    Matrix L;        // dP/dt = L P; sub-diagonal B(x-1), super-diagonal D(x+1)
    Matrix H;        // symmetric, off-diagonal -sqrt(B(x) D(x+1))
    Matrix H_tilde;  // Phi^-1 H Phi, written with the rates directly
    Matrix A;        // upper bidiagonal, H = A^T A
    double similarity_error = 0;      // max |(Phi^-1 H Phi - H_tilde)_xy| / scale
    double factorization_error = 0;   // max |A^T A - H| / max |H|
    double column_sum_error = 0;      // max_y |sum_x L_xy| / (B(y) + D(y))
};

/// Invariants are checked on construction; a violation above 1e-12 is an
/// internal_consistency error.
GeneratorMatrix build_generator(const Model& model, const StateSpace& space);

/// exp(tL) as Phi exp(-tH) Phi^-1 on the generator's own lattice, returned
/// with rows indexed by the start state.
Matrix expm_kernel(const GeneratorMatrix& gen, double t);

struct OracleKernels {
    std::vector<double> times;
    std::vector<Matrix> kernels;  // one per time, block {0..x_max}, row = start state
    int lattice_last = 0;         // last state of the lattice that was diagonalised
    int digits = 0;               // working precision of the eigendecomposition
    double padding_change = 0;    // block change at the last doubling of the padding
};

/// Kernels on {0..x_max}. Finite families use their whole lattice. Infinite
/// families diagonalise a longer reflecting lattice, doubling the padding until
/// the block moves by less than tol.
OracleKernels oracle_kernels(const Model& model, const StateSpace& space, const std::vector<double>& times,
                             double tol = 1e-14);

struct EigensystemReport {
    int levels = 0;                  // eigenpairs compared, n = 0..levels-1
    int lattice_last = 0;
    double max_residual = 0;         // max_n ||H phi_n - E(n) phi_n||_inf / ||phi_n||_inf
    double a_phi0 = 0;               // ||A phi0||_inf
    double min_eigenvalue = 0;
    double max_eigenvalue_error = 0; // max_n |lambda_n - E(n)| / max(E(n), E(1))
    bool residual_ok = false, a_phi0_ok = false, psd_ok = false, spectrum_ok = false;
    bool pass() const { return residual_ok && a_phi0_ok && psd_ok && spectrum_ok; }
};

inline constexpr double kResidualTolerance = 1e-10;
inline constexpr double kAPhi0Tolerance = 1e-12;
inline constexpr double kPsdTolerance = 1e-10;
inline constexpr double kEigenvalueTolerance = 1e-9;

/// Finite families: all N+1 levels on {0..N}. Infinite families: 26 levels,
/// eigenvalues taken on a lattice long enough for those eigenvectors to have
/// died out, residuals on {0..x_max} with the untruncated rates.
EigensystemReport verify_eigensystem(const Model& model, const StateSpace& space);

struct SampleResult {
    Distribution empirical;
    std::vector<std::uint64_t> counts;
    std::uint64_t escape_attempts = 0;  // births proposed at x_max of a truncated space
    std::uint64_t seed = 0;
    std::size_t n_paths = 0;
    int y0 = 0;
    std::string generator = "mt19937_64 seeded by splitmix64(seed, path)";
};

SampleResult gillespie_sample(const Model& model, const StateSpace& space, int y0, double t, std::size_t n_paths,
                              std::uint64_t seed);

double total_variation(const std::vector<double>& p, const std::vector<double>& q);
/// 4 max_x sqrt(p_x (1 - p_x) / n_paths) + 0.002
double sampling_band(const std::vector<double>& p, std::size_t n_paths);

struct KernelPoint {
    double x = 0, y = 0;
    double series = 0, closed = 0;
    int terms = 0;
};

struct ClosedFormReport {
    std::string kernel;  // "hermite" or "laguerre"
    double t = 0;
    double g = 0;        // Laguerre only
    std::vector<KernelPoint> points;
    double max_error = 0;
    double tolerance = 1e-8;
    bool pass() const { return max_error <= tolerance; }
};

/// e^{-x^2}/sqrt(pi) sum_n H_n(x) H_n(y) e^{-2nt} / (2^n n!), truncated by a
/// Cramer-bound remainder; throws cutoff_failure if t is too small.
double hermite_kernel_series(double x, double y, double t, int* terms = nullptr);
double hermite_kernel_closed(double x, double y, double t);
/// 2 e^{-x^2} x^{2g} sum_n n! L_n^b(x^2) L_n^b(y^2) e^{-4nt} / Gamma(n+b+1), b = g - 1/2.
double laguerre_kernel_series(double x, double y, double t, double g, int* terms = nullptr);
double laguerre_kernel_closed(double x, double y, double t, double g);
double bessel_i(double order, double z);

ClosedFormReport hermite_kernel_check(double t, const std::vector<double>& xs, const std::vector<double>& ys,
                                      double tol = 1e-8);
ClosedFormReport laguerre_kernel_check(double t, double g, const std::vector<double>& xs,
                                       const std::vector<double>& ys, double tol = 1e-8);

}  // namespace bdk
