#include "gflsr/random_matrix.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <cmath>

#include "gflsr/canonical.hpp"

namespace gflsr {

Matrix random_orthonormal(Index rows, Index cols, Rng& rng) {
  if (cols > rows) throw ConfigError("random_orthonormal: cols > rows");
  Matrix g(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) g(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
  const Matrix r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  for (Index j = 0; j < cols; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  canonicalize_columns(q);
  return q;
}

Matrix random_orthonormal(Index rows, Index cols, std::uint64_t seed) {
  Rng rng(seed);
  return random_orthonormal(rows, cols, rng);
}

Matrix sample_inverse_wishart(const Matrix& scale, int dof, Rng& rng) {
  const Index p = scale.rows();
  if (scale.cols() != p || p == 0) {
    throw ConfigError("sample_inverse_wishart: scale must be square");
  }
  if ((scale - scale.transpose()).cwiseAbs().maxCoeff() >
      1e-10 * std::max(1.0, scale.cwiseAbs().maxCoeff())) {
    throw ConfigError("sample_inverse_wishart: scale not symmetric");
  }
  if (dof < p + 1) {
    throw ConfigError("sample_inverse_wishart: dof too small (need dof >= dim + 1)");
  }
  Eigen::LLT<Matrix> llt(scale);
  if (llt.info() != Eigen::Success) {
    throw ConfigError("sample_inverse_wishart: scale not positive definite");
  }

  // X ~ IW(scale, dof)  <=>  X^{-1} ~ Wishart(scale^{-1}, dof).
  // Draw the Wishart as (C A)(C A)^T where C C^T = scale^{-1} and A is the
  // Bartlett lower-triangular factor.
  Matrix a = Matrix::Zero(p, p);
  for (Index i = 0; i < p; ++i) {
    a(i, i) = std::sqrt(rng.chi_squared(static_cast<double>(dof - i)));
    for (Index j = 0; j < i; ++j) a(i, j) = rng.normal();
  }
  const Matrix l = llt.matrixL();
  const Matrix ca = l.transpose().triangularView<Eigen::Upper>().solve(a);
  const Matrix wishart = ca * ca.transpose();
  Matrix draw = wishart.ldlt().solve(Matrix::Identity(p, p));
  draw = 0.5 * (draw + draw.transpose()).eval();
  return draw;
}

Matrix sample_inverse_wishart(const Matrix& scale, int dof, std::uint64_t seed) {
  Rng rng(seed);
  return sample_inverse_wishart(scale, dof, rng);
}

Matrix psd_sqrt(const Matrix& m) {
  if (m.rows() != m.cols()) throw ConfigError("psd_sqrt: matrix must be square");
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success) throw NumericError("psd_sqrt: eigensolver failed");
  Vector vals = es.eigenvalues();
  const double scale = std::max(1.0, vals.cwiseAbs().maxCoeff());
  for (Index i = 0; i < vals.size(); ++i) {
    if (vals[i] < -1e-10 * scale) {
      throw ConfigError("psd_sqrt: matrix not positive semi-definite");
    }
    vals[i] = vals[i] > 0.0 ? std::sqrt(vals[i]) : 0.0;
  }
  return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace gflsr
