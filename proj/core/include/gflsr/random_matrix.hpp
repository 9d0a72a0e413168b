#pragma once

#include "gflsr/rng.hpp"
#include "gflsr/types.hpp"

namespace gflsr {

/// Matrix with orthonormal, sign-canonical columns: QR of a standard-normal
/// draw with the R-diagonal sign fix, then column sign canonicalization.
/// Deterministic given the seed. Requires cols <= rows.
Matrix random_orthonormal(Index rows, Index cols, Rng& rng);
Matrix random_orthonormal(Index rows, Index cols, std::uint64_t seed);

/// Inverse-Wishart draw via the Bartlett decomposition. The scale matrix must
/// be symmetric positive definite and dof >= dim + 1. The returned matrix is
/// symmetrized, and the long-run mean over draws is scale / (dof - dim - 1)
/// when that denominator is positive.
Matrix sample_inverse_wishart(const Matrix& scale, int dof, Rng& rng);
Matrix sample_inverse_wishart(const Matrix& scale, int dof, std::uint64_t seed);

/// Symmetric PSD square root; eigenvalues below -1e-10 throw, small negative
/// ones are clipped to zero.
Matrix psd_sqrt(const Matrix& m);

}  // namespace gflsr
