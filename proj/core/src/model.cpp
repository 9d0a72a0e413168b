#include "gflsr/model.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "gflsr/canonical.hpp"

namespace gflsr {

namespace {

constexpr double kOrthoTol = 1e-10;
constexpr double kPsdTol = -1e-10;

bool is_orthonormal(const Matrix& m, double tol) {
  if (m.cols() == 0) return true;
  const Matrix g = m.transpose() * m;
  return (g - Matrix::Identity(m.cols(), m.cols())).cwiseAbs().maxCoeff() <= tol;
}

bool is_psd(const Matrix& m, double* min_eig = nullptr) {
  if (m.rows() != m.cols()) return false;
  if ((m - m.transpose()).cwiseAbs().maxCoeff() >
      1e-8 * std::max(1.0, m.cwiseAbs().maxCoeff())) {
    return false;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  if (min_eig) *min_eig = lo;
  return lo >= kPsdTol;
}

}  // namespace

Matrix ModelParams::sigma_x_matrix() const {
  switch (noise_case) {
    case NoiseCase::A:
      return sigma_x_sq * (Matrix::Identity(p, p) - W * W.transpose());
    case NoiseCase::B:
      return sigma_x_sq * Matrix::Identity(p, p);
    default:
      return Sigma_X;
  }
}

Matrix ModelParams::sigma_y_matrix() const {
  switch (noise_case) {
    case NoiseCase::A:
      return sigma_y_sq * (Matrix::Identity(q, q) - V * V.transpose());
    case NoiseCase::B:
      return sigma_y_sq * Matrix::Identity(q, q);
    default:
      return Sigma_Y;
  }
}

ValidationReport validate_params(const ModelParams& params) {
  ValidationReport report;
  auto add = [&](const std::string& msg) { report.violations.push_back(msg); };

  if (params.p <= 0 || params.q <= 0 || params.H <= 0) {
    add("dimensions must be positive");
    return report;
  }
  if (params.H > std::min(params.p, params.q)) add("H exceeds min(p, q)");
  if (params.W.rows() != params.p || params.W.cols() != params.H ||
      params.V.rows() != params.q || params.V.cols() != params.H ||
      params.b.size() != params.H || params.sigma_xi_sq.size() != params.H) {
    add("parameter shapes inconsistent with p, q, H");
    return report;
  }

  if (!is_orthonormal(params.W, kOrthoTol)) add("W not orthonormal");
  if (!is_orthonormal(params.V, kOrthoTol)) add("V not orthonormal");

  for (Index h = 0; h < params.H; ++h) {
    if (sign_flip_needed(params.W.col(h))) {
      add("W column " + std::to_string(h) + " not sign-canonical");
    }
    if (sign_flip_needed(params.V.col(h))) {
      add("V column " + std::to_string(h) + " not sign-canonical");
    }
  }

  for (Index h = 0; h < params.H; ++h) {
    if (!(params.sigma_xi_sq[h] > 0.0)) add("sigma_xi_sq must be positive");
  }
  for (Index h = 0; h + 1 < params.H; ++h) {
    if (!(params.sigma_xi_sq[h] * params.b[h] >
          params.sigma_xi_sq[h + 1] * params.b[h + 1])) {
      add("s2*b not strictly decreasing");
      break;
    }
  }

  if (params.sigma1_sq < 0.0) add("sigma1_sq negative");

  if (params.noise_case == NoiseCase::C) {
    if (params.Sigma_X.rows() != params.p || params.Sigma_X.cols() != params.p) {
      add("Sigma_X has wrong shape");
    } else if (!is_psd(params.Sigma_X)) {
      add("Sigma_X not symmetric PSD");
    }
    if (params.Sigma_Y.rows() != params.q || params.Sigma_Y.cols() != params.q) {
      add("Sigma_Y has wrong shape");
    } else if (!is_psd(params.Sigma_Y)) {
      add("Sigma_Y not symmetric PSD");
    }
  } else {
    if (params.sigma_x_sq < 0.0) add("sigma_x_sq negative");
    if (params.sigma_y_sq < 0.0) add("sigma_y_sq negative");
  }

  return report;
}

Matrix model_covariance(const ModelParams& params) {
  const Matrix S = params.sigma_xi_sq.asDiagonal();
  const Matrix B = params.b.asDiagonal();
  const Index p = params.p, q = params.q;

  Matrix cov(p + q, p + q);
  cov.topLeftCorner(p, p) = params.W * S * params.W.transpose() + params.sigma_x_matrix();
  const Matrix cross = params.W * S * B * params.V.transpose();
  cov.topRightCorner(p, q) = cross;
  cov.bottomLeftCorner(q, p) = cross.transpose();
  const Matrix omega_var =
      B * S * B + params.sigma1_sq * Matrix::Identity(params.H, params.H);
  cov.bottomRightCorner(q, q) =
      params.V * omega_var * params.V.transpose() + params.sigma_y_matrix();
  return cov;
}

Dataset Dataset::from_raw(const Matrix& X0, const Matrix& Y0) {
  if (X0.rows() != Y0.rows()) throw ConfigError("Dataset: X and Y row counts differ");
  if (X0.rows() < 2) throw ConfigError("Dataset: need n >= 2");
  if (!X0.allFinite() || !Y0.allFinite()) {
    throw ConfigError("Dataset: non-finite entries");
  }
  Dataset ds;
  ds.x_means = X0.colwise().mean();
  ds.y_means = Y0.colwise().mean();
  ds.X = X0.rowwise() - ds.x_means.transpose();
  ds.Y = Y0.rowwise() - ds.y_means.transpose();
  return ds;
}

Dataset Dataset::from_centered(Matrix Xc, Matrix Yc) {
  if (Xc.rows() != Yc.rows()) throw ConfigError("Dataset: X and Y row counts differ");
  if (Xc.rows() < 2) throw ConfigError("Dataset: need n >= 2");
  Dataset ds;
  ds.x_means = Vector::Zero(Xc.cols());
  ds.y_means = Vector::Zero(Yc.cols());
  ds.X = std::move(Xc);
  ds.Y = std::move(Yc);
  return ds;
}

}  // namespace gflsr
