#pragma once

#include <utility>
#include <vector>

#include "gflsr/model.hpp"
#include "gflsr/rng.hpp"
#include "gflsr/types.hpp"

namespace gflsr {

/// Residual and latent-noise specification for simulate_pls.
struct NoiseSpec {
  enum class LatentDist { NormalQuantile, ExponentialCenteredRate1 };

  NoiseCase kind = NoiseCase::B;
  double sigma_x_sq = 0.0;
  double sigma_y_sq = 0.0;
  Matrix Sigma_X;  // case C
  Matrix Sigma_Y;  // case C
  double sigma1_sq = 0.0;
  LatentDist latent = LatentDist::NormalQuantile;

  /// Shared uniform across components with Hermite orders 1..H, giving
  /// uncorrelated-but-dependent scores. Default draws an independent U_h per
  /// component (independent scores).
  bool shared_u = false;

  /// Normalize the sampled latent block so (xi, eps) has exactly zero column
  /// means, exactly the target variances and exactly zero cross-moments.
  /// This is the empirical-moments construction under which zero-residual
  /// data is recovered exactly by the fit. Ignored when n <= 2H + 2.
  bool exact_latent_moments = true;

  static NoiseSpec from_params(const ModelParams& params);

  /// Noise magnitudes from a proportional error rate alpha in (0, 1):
  /// sigma1^2 so that sigma1^2 / Var(omega_1) = alpha, and sigma_x^2 /
  /// sigma_y^2 so the noise trace is an alpha fraction of the total
  /// variance trace on each side.
  static NoiseSpec isotropic_from_rate(const ModelParams& params, double alpha);
};

/// Draws n samples from the generative PLS recursions and returns the
/// centered dataset together with the (centered) latent ground truth.
std::pair<Dataset, GroundTruth> simulate_pls(const ModelParams& params, Index n,
                                             const NoiseSpec& noise,
                                             std::uint64_t seed,
                                             Variant variant = Variant::PlsR);

/// The four scripted generative scenarios (two predictors/one response with a
/// single linear latent, through three components with nonlinear responses).
/// noise_scale multiplies every noise standard deviation; 0 gives the exact
/// noiseless system.
struct GflsrScenario {
  enum class Id { S1LinearSingle, S2NonlinearSingle, S3LinearMulti, S4NonlinearMulti };

  Id id = Id::S1LinearSingle;
  Index p = 2, q = 1, H = 1;
  Matrix W;                        // p x H latent-to-X coefficient columns
  std::vector<double> x_noise_sd;  // per X column
  std::vector<double> y_noise_sd;  // per Y draw site
  double noise_scale = 1.0;

  static GflsrScenario standard(Id id);
  static GflsrScenario from_string(const std::string& name);
  const char* name() const;
};

std::pair<Dataset, GroundTruth> simulate_gflsr(const GflsrScenario& scenario,
                                               Index n, std::uint64_t seed);

/// Deterministic loading matrices built from normal-density curves over the
/// variable index, Gram-Schmidt orthonormalized and sign-canonicalized.
std::pair<Matrix, Matrix> density_curve_loadings(Index p, Index q, Index H);

}  // namespace gflsr
