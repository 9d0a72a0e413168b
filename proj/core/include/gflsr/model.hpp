#pragma once

#include <string>
#include <vector>

#include "gflsr/types.hpp"

namespace gflsr {

/// Generative model parameters (ground truth for simulation, or a fitted set).
///
/// W and V carry orthonormal, sign-canonical columns; b and sigma_xi_sq hold
/// the per-component slopes and latent variances with sigma_xi_sq[h] * b[h]
/// strictly decreasing. Noise storage depends on noise_case: cases A and B
/// keep the scalars sigma_x_sq / sigma_y_sq (A uses the projected form
/// sigma^2 (I - W W^T)), case C keeps full matrices.
struct ModelParams {
  Index p = 0, q = 0, H = 0;
  Matrix W;             // p x H
  Matrix V;             // q x H
  Vector b;             // H
  Vector sigma_xi_sq;   // H
  NoiseCase noise_case = NoiseCase::B;
  double sigma_x_sq = 0.0;
  double sigma_y_sq = 0.0;
  Matrix Sigma_X;       // p x p, case C
  Matrix Sigma_Y;       // q x q, case C
  double sigma1_sq = 0.0;

  /// Materialized X-noise covariance for the active case.
  Matrix sigma_x_matrix() const;
  /// Materialized Y-noise covariance for the active case.
  Matrix sigma_y_matrix() const;
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks the identifiability preconditions: orthonormal sign-canonical W/V,
/// H <= min(p, q), strictly decreasing sigma_xi_sq[h]*b[h], PSD noise
/// covariances. Report-only; an empty list means valid.
ValidationReport validate_params(const ModelParams& params);

/// Joint (p+q) x (p+q) model covariance in the symmetric block form
///   [ W S W^T + Sigma_X          W S B V^T                  ]
///   [ V B S W^T                  V (B^2 S + s1^2 I) V^T + Sigma_Y ]
/// with S = diag(sigma_xi_sq). Equal covariances imply equal canonical
/// parameter sets (and conversely).
Matrix model_covariance(const ModelParams& params);

/// Column-centered sample. X and Y hold the centered values; x_means/y_means
/// record what was subtracted, so raw_x()/raw_y() reproduce the input.
struct Dataset {
  Matrix X;  // n x p, centered
  Matrix Y;  // n x q, centered
  Vector x_means;
  Vector y_means;

  Index n() const { return X.rows(); }
  Index p() const { return X.cols(); }
  Index q() const { return Y.cols(); }

  Matrix raw_x() const { return X.rowwise() + x_means.transpose(); }
  Matrix raw_y() const { return Y.rowwise() + y_means.transpose(); }

  /// Centers the raw matrices. Requires n >= 2, matching row counts and
  /// finite entries.
  static Dataset from_raw(const Matrix& X0, const Matrix& Y0);

  /// Wraps already-centered matrices with zero mean records.
  static Dataset from_centered(Matrix Xc, Matrix Yc);
};

/// Latent scores and residual draws retained by the simulators so fitted
/// quantities can be compared against what generated the data.
///
/// For simulate_pls all pieces are stored column-centered, consistent with
/// the centered Dataset: X == xi * W^T + X_H holds exactly in centered space.
/// simulate_gflsr keeps the raw draws (f_H applies to raw scores).
struct GroundTruth {
  Matrix xi;     // n x H
  Matrix omega;  // n x H
  Matrix X_H;    // n x p
  Matrix Y_H;    // n x q
  Matrix eps;    // n x H
};

}  // namespace gflsr
