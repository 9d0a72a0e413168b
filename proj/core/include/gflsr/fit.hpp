#pragma once

#include <memory>
#include <optional>

#include "gflsr/dependence.hpp"
#include "gflsr/model.hpp"
#include "gflsr/types.hpp"

namespace gflsr {

struct FitConfig {
  Index H = 1;
  Variant variant = Variant::PlsR;
  // Square loss throughout; svd_tol / max_iter control the singular-pair solver.
  double svd_tol = 1e-12;
  int max_iter = 10000;
};

/// Configuration for the generic-dependence fitter.
struct GflsrFitConfig {
  Index H = 1;
  DependenceMeasure measure = DependenceMeasure::Covariance;

  enum class FHFamily { Linear, PolyAdditive };
  FHFamily fh_family = FHFamily::Linear;
  int poly_degree = 2;  // <= 3

  double eta = 0.0;  // variance-regularization weight on u

  enum class Optimizer { ClosedFormSVD, CoordinateAscent };
  Optimizer optimizer = Optimizer::ClosedFormSVD;

  // CoordinateAscent search schedule.
  int restarts = 8;
  int levels = 9;
  int proposals_per_level = 64;
  double initial_step = 0.8;

  double svd_tol = 1e-12;
  int max_iter = 10000;
};

/// Fitted additive-polynomial response map, present on fit_gflsr results with
/// the PolyAdditive family. Column block h holds the coefficients of
/// xi_h^1..xi_h^degree; higher powers are centered by basis_means before the
/// least-squares fit and at prediction time.
struct FHModel {
  int degree = 1;
  Matrix coef;         // q x (H * degree)
  Vector basis_means;  // H * degree
};

/// Per-component weights, scores, slopes and residuals of a fitted model.
///
/// U_hat columns are exactly orthonormal and the score columns are exactly
/// orthogonal (square-loss deflation). X_resid is the weight-form residual
/// X - sum_h xi_h u_h^T, so the reconstruction identity holds by construction
/// and the rows feed the residual bootstrap directly.
struct FitResult {
  Variant variant = Variant::PlsR;
  Matrix U_hat;       // p x H
  Matrix V_hat;       // q x H
  Matrix xi_hat;      // n x H
  Matrix omega_hat;   // n x H
  Vector b_hat;       // H
  Matrix theta_hat;   // q x H
  Matrix X_resid;     // n x p
  Matrix Y_resid;     // n x q
  Matrix eps_hat;     // n x H
  Vector x_means;
  Vector y_means;
  FitConfig config;
  std::optional<GflsrFitConfig> gflsr_config;  // set by fit_gflsr
  std::optional<FHModel> fh;                   // set by fit_gflsr(PolyAdditive)

  Index n() const { return xi_hat.rows(); }
  Index p() const { return U_hat.rows(); }
  Index q() const { return V_hat.rows(); }
  Index H() const { return U_hat.cols(); }

  Matrix fitted_x() const { return xi_hat * U_hat.transpose(); }
  /// Centered fitted response part (theta-form for PLS-R, V omega for PLS-SVD).
  Matrix fitted_y() const;
};

/// Rank collapse before reaching H components; carries the components
/// extracted so far.
class InsufficientComponentsError : public NumericError {
 public:
  InsufficientComponentsError(const std::string& msg, std::shared_ptr<FitResult> p)
      : NumericError(msg), partial(std::move(p)) {}
  std::shared_ptr<FitResult> partial;
};

struct SingularPair {
  Vector u;
  Vector v;
  double s = 0.0;
  int iterations = 0;
};

/// Top singular pair of C by alternating power iteration from the
/// dominant-column start; u and v come back sign-canonical and s is the
/// singular value. Converged when successive singular-value iterates change
/// by less than tol. Throws on an all-zero matrix ("no dependence signal")
/// and on non-convergence within max_iter.
SingularPair leading_singular_pair(const Matrix& C, double tol, int max_iter);

/// Component-wise estimation: per component, the covariance-maximizing weight
/// pair of (1/n) X^T Y on the deflated matrices, scores, the square-loss
/// slope b_h, and deflation. X deflation projects out the score; Y deflation
/// subtracts theta_h xi_h (PLS-R, cumulative from Y_0) or projects out
/// omega_h (PLS-SVD).
FitResult fit_pls(const Dataset& data, const FitConfig& cfg);

/// Deflation-projection prediction for uncentered X rows; returns uncentered
/// responses.
Matrix predict(const FitResult& fit, const Matrix& X_new);

enum class DistanceKind {
  RootMeanSquare,  // min over sign of (1/p) sqrt(sum (s u_i - w_i)^2)
  MeanSquare,      // min over sign of (1/p) sum (s u_i - w_i)^2
};

/// Sign-invariant distance between unit loading vectors.
double loading_distance(const Vector& u_hat, const Vector& w_true,
                        DistanceKind kind = DistanceKind::RootMeanSquare);

/// Per component, maximizes D(X u, Y v) + eta u^T Sigma u over unit vectors
/// constrained to the orthogonal complement of the previous weights, then
/// fits f_H by least squares over the configured family and deflates Y by it.
/// With Covariance, Linear f_H and eta = 0 this reproduces fit_pls (PLS-R).
FitResult fit_gflsr(const Dataset& data, const GflsrFitConfig& cfg);

}  // namespace gflsr
