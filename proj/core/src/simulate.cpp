#include "gflsr/simulate.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "gflsr/canonical.hpp"
#include "gflsr/normal.hpp"
#include "gflsr/psi.hpp"
#include "gflsr/random_matrix.hpp"

namespace gflsr {

NoiseSpec NoiseSpec::from_params(const ModelParams& params) {
  NoiseSpec spec;
  spec.kind = params.noise_case;
  spec.sigma_x_sq = params.sigma_x_sq;
  spec.sigma_y_sq = params.sigma_y_sq;
  spec.Sigma_X = params.Sigma_X;
  spec.Sigma_Y = params.Sigma_Y;
  spec.sigma1_sq = params.sigma1_sq;
  return spec;
}

NoiseSpec NoiseSpec::isotropic_from_rate(const ModelParams& params, double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw ConfigError("isotropic_from_rate: alpha must lie in [0, 1)");
  }
  NoiseSpec spec;
  spec.kind = NoiseCase::B;
  const double ratio = alpha / (1.0 - alpha);
  const double signal_x = params.sigma_xi_sq.sum();
  spec.sigma_x_sq = ratio * signal_x / static_cast<double>(params.p);
  const double var_omega1 = params.b[0] * params.b[0] * params.sigma_xi_sq[0];
  spec.sigma1_sq = ratio * var_omega1;
  double signal_y = 0.0;
  for (Index h = 0; h < params.H; ++h) {
    signal_y += params.b[h] * params.b[h] * params.sigma_xi_sq[h] + spec.sigma1_sq;
  }
  spec.sigma_y_sq = ratio * signal_y / static_cast<double>(params.q);
  return spec;
}

namespace {

void center_columns(Matrix& m) {
  if (m.rows() > 0 && m.cols() > 0) m.rowwise() -= m.colwise().mean().eval();
}

// Rescale [xi eps] so columns have exactly zero mean, exactly the target
// standard deviations and exactly zero pairwise sample cross-moments.
// Zero-sd columns are zeroed out directly.
void enforce_exact_moments(Matrix& block, const Vector& target_sd) {
  const Index n = block.rows();
  const Index k = block.cols();
  std::vector<Index> active;
  for (Index j = 0; j < k; ++j) {
    if (target_sd[j] > 0.0) {
      active.push_back(j);
    } else {
      block.col(j).setZero();
    }
  }
  const Index m = static_cast<Index>(active.size());
  if (m == 0 || n <= m + 1) return;

  Matrix sub(n, m);
  for (Index j = 0; j < m; ++j) sub.col(j) = block.col(active[static_cast<std::size_t>(j)]);
  center_columns(sub);
  const Matrix cov = sub.transpose() * sub / static_cast<double>(n);
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) return;  // degenerate draw, keep raw
  const Matrix l = llt.matrixL();
  sub = l.triangularView<Eigen::Lower>()
            .transpose()
            .solve<Eigen::OnTheRight>(sub);
  for (Index j = 0; j < m; ++j) {
    block.col(active[static_cast<std::size_t>(j)]) =
        target_sd[active[static_cast<std::size_t>(j)]] * sub.col(j);
  }
}

Matrix noise_rows(Index n, Index dim, NoiseCase kind, double sigma_sq,
                  const Matrix& sigma_full, const Matrix& loading, Rng& rng) {
  Matrix g(n, dim);
  switch (kind) {
    case NoiseCase::A: {
      if (sigma_sq == 0.0) return Matrix::Zero(n, dim);
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < dim; ++j) g(i, j) = rng.normal();
      const Matrix proj =
          Matrix::Identity(dim, dim) - loading * loading.transpose();
      return std::sqrt(sigma_sq) * g * proj;
    }
    case NoiseCase::B: {
      if (sigma_sq == 0.0) return Matrix::Zero(n, dim);
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < dim; ++j) g(i, j) = rng.normal();
      return std::sqrt(sigma_sq) * g;
    }
    default: {
      if (sigma_full.rows() != dim || sigma_full.cols() != dim) {
        throw ConfigError("simulate_pls: case-C covariance has wrong shape");
      }
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < dim; ++j) g(i, j) = rng.normal();
      return g * psd_sqrt(sigma_full);
    }
  }
}

}  // namespace

std::pair<Dataset, GroundTruth> simulate_pls(const ModelParams& params, Index n,
                                             const NoiseSpec& noise,
                                             std::uint64_t seed, Variant variant) {
  const ValidationReport report = validate_params(params);
  if (!report.ok()) {
    throw ConfigError("simulate_pls: invalid params: " + report.violations.front());
  }
  if (n < 2) throw ConfigError("simulate_pls: need n >= 2");
  if (noise.shared_u && noise.latent != NoiseSpec::LatentDist::NormalQuantile) {
    throw ConfigError("simulate_pls: shared_u requires the normal-quantile latent family");
  }

  const Index H = params.H;
  Rng rng(seed);

  // Latent scores, backward over components as in the model recursions.
  Matrix xi(n, H);
  if (noise.shared_u) {
    Vector u(n);
    for (Index i = 0; i < n; ++i) u[i] = rng.uniform();
    for (Index h = H - 1; h >= 0; --h) {
      const PsiFamily family = PsiFamily::hermite(static_cast<int>(h) + 1);
      for (Index i = 0; i < n; ++i) xi(i, h) = psi_eval(family, u[i]);
    }
  } else {
    for (Index h = H - 1; h >= 0; --h) {
      if (noise.latent == NoiseSpec::LatentDist::NormalQuantile) {
        for (Index i = 0; i < n; ++i) xi(i, h) = rng.normal();
      } else {
        for (Index i = 0; i < n; ++i) xi(i, h) = rng.exponential() - 1.0;
      }
    }
  }

  Matrix eps(n, H);
  const double sigma1 = std::sqrt(noise.sigma1_sq);
  for (Index h = 0; h < H; ++h) {
    for (Index i = 0; i < n; ++i) eps(i, h) = rng.normal();
  }

  // Unit-variance draws scaled to the model magnitudes, optionally with the
  // exact-moment normalization of the whole latent block.
  Matrix latent_block(n, 2 * H);
  latent_block.leftCols(H) = xi;
  latent_block.rightCols(H) = eps;
  Vector target_sd(2 * H);
  for (Index h = 0; h < H; ++h) {
    target_sd[h] = std::sqrt(params.sigma_xi_sq[h]);
    target_sd[H + h] = sigma1;
  }
  if (noise.exact_latent_moments && n > 2 * H + 2) {
    enforce_exact_moments(latent_block, target_sd);
  } else {
    for (Index j = 0; j < 2 * H; ++j) latent_block.col(j) *= target_sd[j];
  }
  xi = latent_block.leftCols(H);
  eps = latent_block.rightCols(H);

  const Matrix omega = xi * params.b.asDiagonal() + eps;

  const Matrix x_noise = noise_rows(n, params.p, noise.kind, noise.sigma_x_sq,
                                    noise.Sigma_X, params.W, rng);
  const Matrix y_noise = noise_rows(n, params.q, noise.kind, noise.sigma_y_sq,
                                    noise.Sigma_Y, params.V, rng);

  const Matrix x0 = xi * params.W.transpose() + x_noise;
  Matrix y0;
  if (variant == Variant::PlsR) {
    y0 = xi * params.b.asDiagonal() * params.V.transpose() + y_noise;
  } else {
    y0 = omega * params.V.transpose() + y_noise;
  }

  Dataset ds = Dataset::from_raw(x0, y0);

  GroundTruth truth;
  truth.xi = xi;
  truth.omega = omega;
  truth.X_H = x_noise;
  truth.Y_H = y_noise;
  truth.eps = eps;
  center_columns(truth.xi);
  center_columns(truth.omega);
  center_columns(truth.X_H);
  center_columns(truth.Y_H);
  center_columns(truth.eps);
  return {std::move(ds), std::move(truth)};
}

GflsrScenario GflsrScenario::standard(Id id) {
  GflsrScenario s;
  s.id = id;
  const double sd_small = std::sqrt(0.02);
  const double sd_tiny = std::sqrt(0.0001);
  switch (id) {
    case Id::S1LinearSingle:
      s.p = 2; s.q = 1; s.H = 1;
      s.W = (Matrix(2, 1) << 3, 2).finished();
      s.x_noise_sd = {sd_small, sd_small};
      s.y_noise_sd = {sd_small};
      break;
    case Id::S2NonlinearSingle:
      s.p = 2; s.q = 1; s.H = 2;
      s.W = (Matrix(2, 2) << 3, 1, 1, 1).finished();
      s.x_noise_sd = {sd_tiny, sd_tiny};
      s.y_noise_sd = {sd_small};
      break;
    case Id::S3LinearMulti:
      s.p = 2; s.q = 2; s.H = 2;
      s.W = (Matrix(2, 2) << 1, 1, 1, 2).finished();
      s.x_noise_sd = {sd_tiny, sd_tiny};
      s.y_noise_sd = {sd_small, sd_small};
      break;
    case Id::S4NonlinearMulti:
      s.p = 3; s.q = 3; s.H = 3;
      s.W = (Matrix(3, 3) << 3, 2, 3, 1, 6, 3, 2, 1, 1).finished();
      s.x_noise_sd = {sd_tiny, sd_tiny, sd_tiny};
      s.y_noise_sd = {sd_small, sd_small, sd_small};
      break;
  }
  return s;
}

GflsrScenario GflsrScenario::from_string(const std::string& name) {
  if (name == "s1") return standard(Id::S1LinearSingle);
  if (name == "s2") return standard(Id::S2NonlinearSingle);
  if (name == "s3") return standard(Id::S3LinearMulti);
  if (name == "s4") return standard(Id::S4NonlinearMulti);
  throw ConfigError("unknown scenario: " + name);
}

const char* GflsrScenario::name() const {
  switch (id) {
    case Id::S1LinearSingle: return "s1";
    case Id::S2NonlinearSingle: return "s2";
    case Id::S3LinearMulti: return "s3";
    default: return "s4";
  }
}

std::pair<Dataset, GroundTruth> simulate_gflsr(const GflsrScenario& scenario,
                                               Index n, std::uint64_t seed) {
  if (n < 2) throw ConfigError("simulate_gflsr: need n >= 2");
  Rng rng(seed);
  const double ns = scenario.noise_scale;

  auto draw = [&](double sd) {
    Vector v = Vector::Zero(n);
    if (sd * ns > 0.0) {
      for (Index i = 0; i < n; ++i) v[i] = sd * ns * rng.normal();
    }
    return v;
  };
  auto quant = [&]() {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = rng.normal();
    return v;
  };

  const double s02 = std::sqrt(0.02);
  const double s04 = std::sqrt(0.0001);

  const Index p = scenario.p, q = scenario.q, H = scenario.H;
  Matrix xi(n, H), omega(n, H), eps = Matrix::Zero(n, H);
  Matrix x0(n, p), y0(n, q), fh(n, q);

  switch (scenario.id) {
    case GflsrScenario::Id::S1LinearSingle: {
      xi.col(0) = quant();
      omega.col(0) = 2.0 * xi.col(0);
      x0.col(0) = 3.0 * xi.col(0) + draw(s02);
      x0.col(1) = 2.0 * xi.col(0) + draw(s02);
      fh.col(0) = 2.0 * xi.col(0);
      y0.col(0) = fh.col(0) + draw(s02);
      break;
    }
    case GflsrScenario::Id::S2NonlinearSingle: {
      // h = 2
      xi.col(1) = quant();
      eps.col(1) = draw(s02);
      omega.col(1) = xi.col(1).array().square().matrix() + eps.col(1);
      Vector x11 = xi.col(1) + draw(s04);
      Vector x12 = xi.col(1) + draw(s04);
      Vector y1 = xi.col(1).array().square().matrix() + draw(s02);
      // h = 1
      xi.col(0) = quant();
      eps.col(0) = draw(s02);
      omega.col(0) = xi.col(0).array().exp().matrix() + y1 + eps.col(0);
      x0.col(0) = 3.0 * xi.col(0) + x11;
      x0.col(1) = 1.0 * xi.col(0) + x12;
      fh.col(0) = xi.col(0).array().exp().matrix() +
                  xi.col(1).array().square().matrix();
      y0.col(0) = fh.col(0) + draw(s02);
      break;
    }
    case GflsrScenario::Id::S3LinearMulti: {
      // h = 2
      xi.col(1) = quant();
      eps.col(1) = draw(s02);
      omega.col(1) = xi.col(1).array().square().matrix() + eps.col(1);
      Vector x11 = xi.col(1) + draw(s04);
      Vector x12 = 2.0 * xi.col(1) + draw(s04);
      Vector y11 = 3.0 * xi.col(1) + draw(s02);
      Vector y12 = 0.9 * xi.col(1) + draw(s02);
      // h = 1
      xi.col(0) = quant();
      eps.col(0) = draw(s02);
      omega.col(0) = 3.0 * xi.col(0) + eps.col(0);
      x0.col(0) = xi.col(0) + x11;
      x0.col(1) = xi.col(0) + x12;
      fh.col(0) = 3.0 * xi.col(1);
      fh.col(1) = 3.0 * xi.col(0) + 0.9 * xi.col(1);
      y0.col(0) = y11 + draw(s02);
      y0.col(1) = 3.0 * xi.col(0) + 0.9 * xi.col(1) + draw(s02);
      break;
    }
    case GflsrScenario::Id::S4NonlinearMulti: {
      auto sq = [](const Vector& v) { return v.array().square().matrix().eval(); };
      auto cube = [](const Vector& v) { return v.array().cube().matrix().eval(); };
      // h = 3
      xi.col(2) = quant();
      eps.col(2) = draw(s02);
      omega.col(2) = xi.col(2) + eps.col(2);
      Vector x21 = 3.0 * xi.col(2) + draw(s04);
      Vector x22 = 3.0 * xi.col(2) + draw(s04);
      Vector x23 = 1.0 * xi.col(2) + draw(s04);
      Vector y21 = sq(xi.col(2)) + draw(s02);
      Vector y22 = cube(xi.col(2)) + draw(s02);
      Vector y23 = 0.3 * sq(xi.col(2)) - 0.5 * cube(xi.col(2)) + draw(s02);
      // h = 2
      xi.col(1) = quant();
      eps.col(1) = draw(s02);
      omega.col(1) = xi.col(1) + eps.col(1);
      Vector x11 = 2.0 * xi.col(1) + x21;
      Vector x12 = 6.0 * xi.col(1) + x22;
      Vector x13 = 1.0 * xi.col(1) + x23;
      Vector y11 = xi.col(1) + y21;
      Vector y12 = sq(xi.col(1)) + y22;
      Vector y13 = 0.3 * xi.col(1) - 0.5 * sq(xi.col(1)) + y23;
      // h = 1
      xi.col(0) = quant();
      eps.col(0) = draw(s02);
      omega.col(0) = xi.col(0) + eps.col(0);
      x0.col(0) = 3.0 * xi.col(0) + x11;
      x0.col(1) = 1.0 * xi.col(0) + x12;
      x0.col(2) = 2.0 * xi.col(0) + x13;
      y0.col(0) = cube(xi.col(0)) + y11;
      y0.col(1) = xi.col(0) + y12;
      y0.col(2) = 1.3 * xi.col(0) - 0.5 * cube(xi.col(0)) + y13;
      fh.col(0) = cube(xi.col(0)) + xi.col(1) + sq(xi.col(2));
      fh.col(1) = xi.col(0) + sq(xi.col(1)) + cube(xi.col(2));
      fh.col(2) = 1.3 * xi.col(0) - 0.5 * cube(xi.col(0)) + 0.3 * xi.col(1) -
                  0.5 * sq(xi.col(1)) + 0.3 * sq(xi.col(2)) - 0.5 * cube(xi.col(2));
      break;
    }
  }

  Dataset ds = Dataset::from_raw(x0, y0);
  GroundTruth truth;
  truth.xi = xi;
  truth.omega = omega;
  truth.eps = eps;
  truth.X_H = x0 - xi * scenario.W.transpose();
  truth.Y_H = y0 - fh;
  return {std::move(ds), std::move(truth)};
}

std::pair<Matrix, Matrix> density_curve_loadings(Index p, Index q, Index H) {
  if (H > std::min(p, q)) throw ConfigError("density_curve_loadings: H > min(p, q)");

  auto density = [](double x, double var) {
    return std::exp(-0.5 * x * x / var) / std::sqrt(2.0 * M_PI * var);
  };
  auto build = [&](Index rows, double offset) {
    Matrix m(rows, H);
    for (Index k = 0; k < H; ++k) {
      const double kk = static_cast<double>(k + 1);
      for (Index j = 0; j < rows; ++j) {
        const double jj = static_cast<double>(j + 1);
        m(j, k) = density((offset + jj / 10.0) * kk, kk / 10.0);
      }
    }
    // Modified Gram-Schmidt, then the sign convention.
    for (Index k = 0; k < H; ++k) {
      for (Index l = 0; l < k; ++l) m.col(k) -= m.col(l).dot(m.col(k)) * m.col(l);
      const double nrm = m.col(k).norm();
      if (nrm < 1e-14) throw NumericError("density_curve_loadings: rank collapse");
      m.col(k) /= nrm;
    }
    canonicalize_columns(m);
    return m;
  };

  return {build(p, 0.5), build(q, 0.6)};
}

}  // namespace gflsr
