#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gflsr/fit.hpp"
#include "gflsr/types.hpp"

namespace gflsr {

/// Bias-corrected variance and slope estimates under assumption B (isotropic)
/// or C (general PSD). Negative intermediate variances are clamped to zero
/// and flagged; a nonpositive slope denominator falls back to the naive
/// slope, also flagged.
struct CorrectedEstimates {
  NoiseCase assumption = NoiseCase::B;
  double sigma_x_sq = 0.0;              // case B (and the ratio estimator for case A data)
  double sigma_y_sq = 0.0;
  Matrix Sigma_X;                       // case C
  Matrix Sigma_Y;
  Vector sigma_xi_sq;                   // H
  Vector b;                             // H corrected slopes
  Vector sigma1_sq_per_component;       // H
  double sigma1_sq = 0.0;               // average of the per-component values
  std::vector<std::string> flags;

  bool clamped() const { return !flags.empty(); }
};

CorrectedEstimates corrected_estimates(const FitResult& fit, NoiseCase assumption);

/// Measurement-error-corrected slope: xi'omega / (xi'xi - n * noise_term),
/// where noise_term is the corrected sigma_x^2 (case B) or u' Sigma_corr u
/// (case C). Throws when the denominator is nonpositive.
double corrected_b(const Vector& xi_hat, const Vector& omega_hat, double noise_term);

/// B refitted parameter sets from jointly resampled residual rows,
/// sign-aligned to the base fit. Replicates are computed on per-replicate
/// substreams of the master seed and merged in index order, so results do not
/// depend on scheduling.
struct BootstrapResult {
  int B = 0;
  double ci_level = 0.95;
  std::uint64_t seed = 0;
  FitResult base;
  std::vector<FitResult> replicates;
  int failed = 0;
};

/// Aligns the signs of a replicate's per-component quantities to the base fit
/// so every replicate weight has nonnegative inner product with the base
/// weight. Idempotent.
void align_to_base(FitResult& replicate, const FitResult& base);

BootstrapResult residual_bootstrap(const FitResult& fit, int B, std::uint64_t seed,
                                   int threads = 0);

/// Interpolated empirical quantile (order-statistic interpolation).
double empirical_quantile(std::vector<double> values, double prob);

struct IntervalTable {
  struct Row {
    std::string param;
    Index i = 0;
    Index j = 0;
    double lower = 0.0;
    double point = 0.0;  // replicate median
    double upper = 0.0;
  };
  double level = 0.95;
  std::vector<Row> rows;

  const Row* find(const std::string& param, Index i, Index j) const;
};

/// Percentile confidence intervals for every entry of U, V, b and the case-B
/// corrected variance estimates.
IntervalTable intervals(const BootstrapResult& boot, double level);

struct PredictionIntervals {
  Matrix lower;
  Matrix point;
  Matrix upper;
};

/// Percentile prediction bands: predictions under every replicate plus (when
/// add_residual is set) a draw from the replicate's residual rows.
PredictionIntervals predict_interval(const BootstrapResult& boot, const Matrix& X_new,
                                     double level, bool add_residual = true);

}  // namespace gflsr
