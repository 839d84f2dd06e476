#pragma once

// Symmetric tridiagonal eigensolver (implicit QL with Wilkinson shifts) for
// any of the precision tiers. Only the first `rows` components of each
// eigenvector are accumulated, which is all the padded oracle needs.

#include <cstddef>
#include <vector>

#include "bdk/precision.hpp"

namespace bdk {

template <class R>
struct TridiagonalEigen {
    std::vector<R> values;                // ascending
    std::vector<std::vector<R>> vectors;  // vectors[k][i], i < rows, unit 2-norm over the full lattice
};

/// diag has n entries, off has n-1 (off[i] couples i and i+1).
/// Throws eigen_failure if an eigenvalue needs more than 60 sweeps.
template <class R>
TridiagonalEigen<R> tridiagonal_eigen(std::vector<R> diag, std::vector<R> off, std::size_t rows);

extern template TridiagonalEigen<double> tridiagonal_eigen(std::vector<double>, std::vector<double>, std::size_t);
extern template TridiagonalEigen<precision::Wide> tridiagonal_eigen(std::vector<precision::Wide>,
                                                                     std::vector<precision::Wide>, std::size_t);
extern template TridiagonalEigen<precision::Tier40> tridiagonal_eigen(std::vector<precision::Tier40>,
                                                                       std::vector<precision::Tier40>, std::size_t);
extern template TridiagonalEigen<precision::Tier80> tridiagonal_eigen(std::vector<precision::Tier80>,
                                                                       std::vector<precision::Tier80>, std::size_t);
extern template TridiagonalEigen<precision::Tier160> tridiagonal_eigen(std::vector<precision::Tier160>,
                                                                        std::vector<precision::Tier160>, std::size_t);
extern template TridiagonalEigen<precision::Tier320> tridiagonal_eigen(std::vector<precision::Tier320>,
                                                                        std::vector<precision::Tier320>, std::size_t);

}  // namespace bdk
