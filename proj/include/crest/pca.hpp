#pragma once

#include <vector>

#include "crest/tensor.hpp"

namespace crest {

// Per-location channel projection learned on the first frame: each spatial
// cell of a C-channel feature map is one C-dimensional sample.
struct PcaProjection {
    std::vector<double> mean;         // length in_dim
    std::vector<double> basis;        // in_dim x out_dim, column-orthonormal
    int in_dim = 0;
    int out_dim = 0;
    std::vector<double> eigenvalues;  // all in_dim values, descending
    bool rank_deficient = false;      // basis zero-padded past the rank

    double basis_at(int row, int col) const {
        return basis[static_cast<size_t>(row) * out_dim + col];
    }
};

// Covariance eigendecomposition (cyclic Jacobi), eigenvalue-descending,
// each basis column sign-normalized so its largest-magnitude entry is
// positive. Degenerate covariance keeps the achievable rank, zero-pads the
// remaining columns and sets rank_deficient.
PcaProjection fit_pca(const Tensor3& features, int out_channels);

// Per-location (x - mean) . basis; spatial dims unchanged.
Tensor3 apply_pca(const Tensor3& features, const PcaProjection& proj);

// Eigendecomposition of a symmetric matrix (row-major n x n), descending
// eigenvalues; exposed for reuse and testing.
struct SymmetricEigen {
    std::vector<double> values;   // n, descending
    std::vector<double> vectors;  // n x n, column k = vectors[i*n + k]
};
SymmetricEigen eigh(const std::vector<double>& sym, int n);

}  // namespace crest
