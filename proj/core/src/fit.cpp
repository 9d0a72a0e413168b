#include "gflsr/fit.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "gflsr/canonical.hpp"

namespace gflsr {

Matrix FitResult::fitted_y() const {
  if (fh) {
    Matrix basis(n(), fh->coef.cols());
    for (Index h = 0; h < H(); ++h) {
      for (int d = 1; d <= fh->degree; ++d) {
        const Index col = h * fh->degree + (d - 1);
        basis.col(col) = xi_hat.col(h).array().pow(d).matrix();
        basis.col(col).array() -= fh->basis_means[col];
      }
    }
    return basis * fh->coef.transpose();
  }
  if (variant == Variant::PlsSvd) return omega_hat * V_hat.transpose();
  return xi_hat * theta_hat.transpose();
}

SingularPair leading_singular_pair(const Matrix& C, double tol, int max_iter) {
  if (C.size() == 0) throw ConfigError("leading_singular_pair: empty matrix");
  if (!C.allFinite()) throw ConfigError("leading_singular_pair: non-finite entries");
  if (!(tol > 0.0)) throw ConfigError("leading_singular_pair: tol must be positive");

  Index start = 0;
  double best = -1.0;
  for (Index j = 0; j < C.cols(); ++j) {
    const double nrm = C.col(j).norm();
    if (nrm > best) {
      best = nrm;
      start = j;
    }
  }
  if (best == 0.0) throw NumericError("no dependence signal: all-zero matrix");

  Vector u = C.col(start) / best;
  Vector v;
  double s = 0.0;
  double s_prev = -1.0;
  int it = 0;
  bool converged = false;
  for (; it < max_iter; ++it) {
    // Ending on the v half-step keeps C^T u = s v exact, which downstream
    // slope/theta identities rely on.
    v = C.transpose() * u;
    s = v.norm();
    if (s == 0.0) throw NumericError("no dependence signal: u orthogonal to column space");
    v /= s;
    if (std::abs(s - s_prev) < tol) {
      converged = true;
      break;
    }
    s_prev = s;
    u = C * v;
    u /= u.norm();
  }
  if (!converged) {
    throw NumericError("leading_singular_pair: no convergence in " +
                       std::to_string(max_iter) + " iterations (last s=" +
                       std::to_string(s) + ", delta=" +
                       std::to_string(std::abs(s - s_prev)) + ")");
  }

  // Stationarity of s certifies the vector pair only to about sqrt(eps);
  // polish the iterate until the weight itself is stationary.
  const double polish_tol = std::max(1e-15, 0.1 * tol);
  for (int extra = 0; extra < 500; ++extra) {
    Vector u_new = C * v;
    u_new /= u_new.norm();
    const double delta = (u_new - u).cwiseAbs().maxCoeff();
    u = u_new;
    v = C.transpose() * u;
    s = v.norm();
    v /= s;
    ++it;
    if (delta < polish_tol) break;
  }

  SingularPair pair;
  pair.u = canonicalize_sign(u);
  pair.v = canonicalize_sign(v);
  pair.s = s;
  pair.iterations = it + 1;
  return pair;
}

namespace {

// Power iteration with a full-SVD fallback for near-degenerate spectra.
SingularPair solve_pair(const Matrix& C, double tol, int max_iter) {
  try {
    return leading_singular_pair(C, tol, max_iter);
  } catch (const NumericError&) {
    Eigen::JacobiSVD<Matrix> svd(C, Eigen::ComputeThinU | Eigen::ComputeThinV);
    SingularPair pair;
    pair.u = canonicalize_sign(svd.matrixU().col(0));
    pair.v = canonicalize_sign(svd.matrixV().col(0));
    pair.s = svd.singularValues()[0];
    pair.iterations = max_iter;
    return pair;
  }
}

void project_out_score(Matrix& m, const Vector& score) {
  const double ss = score.squaredNorm();
  if (ss == 0.0) return;
  m.noalias() -= score * (score.transpose() * m) / ss;
}

}  // namespace

FitResult fit_pls(const Dataset& data, const FitConfig& cfg) {
  const Index n = data.n(), p = data.p(), q = data.q(), H = cfg.H;
  if (H < 1) throw ConfigError("fit_pls: H must be >= 1");
  if (H > std::min({p, q, n - 1})) {
    throw ConfigError("fit_pls: H exceeds min(p, q, n - 1)");
  }

  FitResult fit;
  fit.variant = cfg.variant;
  fit.config = cfg;
  fit.x_means = data.x_means;
  fit.y_means = data.y_means;
  fit.U_hat.resize(p, H);
  fit.V_hat.resize(q, H);
  fit.xi_hat.resize(n, H);
  fit.omega_hat.resize(n, H);
  fit.b_hat.resize(H);
  fit.theta_hat.resize(q, H);
  fit.eps_hat.resize(n, H);

  Matrix xd = data.X;
  Matrix yd = data.Y;

  auto partial = [&](Index done) {
    auto part = std::make_shared<FitResult>(fit);
    part->U_hat.conservativeResize(p, done);
    part->V_hat.conservativeResize(q, done);
    part->xi_hat.conservativeResize(n, done);
    part->omega_hat.conservativeResize(n, done);
    part->b_hat.conservativeResize(done);
    part->theta_hat.conservativeResize(q, done);
    part->eps_hat.conservativeResize(n, done);
    part->X_resid = data.X - part->xi_hat * part->U_hat.transpose();
    part->Y_resid = yd;
    return part;
  };

  for (Index h = 0; h < H; ++h) {
    const Matrix cov = xd.transpose() * yd / static_cast<double>(n);
    if (cov.cwiseAbs().maxCoeff() == 0.0) {
      throw InsufficientComponentsError(
          "insufficient components: rank collapse at component " +
              std::to_string(h + 1),
          partial(h));
    }
    const SingularPair pair = solve_pair(cov, cfg.svd_tol, cfg.max_iter);
    if (pair.s < 1e-12) {
      throw InsufficientComponentsError(
          "insufficient components: singular value below 1e-12 at component " +
              std::to_string(h + 1),
          partial(h));
    }

    const Vector xi = xd * pair.u;
    const Vector omega = yd * pair.v;
    const double xi_sq = xi.squaredNorm();
    if (xi_sq == 0.0) {
      throw InsufficientComponentsError(
          "insufficient components: zero score at component " + std::to_string(h + 1),
          partial(h));
    }
    const double b = omega.dot(xi) / xi_sq;

    fit.U_hat.col(h) = pair.u;
    fit.V_hat.col(h) = pair.v;
    fit.xi_hat.col(h) = xi;
    fit.omega_hat.col(h) = omega;
    fit.b_hat[h] = b;
    fit.theta_hat.col(h) = b * pair.v;
    fit.eps_hat.col(h) = omega - b * xi;

    // Square-loss deflation: project the score out of X. Y follows the
    // cumulative theta form (PLS-R) or the symmetric score projection.
    project_out_score(xd, xi);
    if (cfg.variant == Variant::PlsR) {
      yd = data.Y - fit.xi_hat.leftCols(h + 1) * fit.theta_hat.leftCols(h + 1).transpose();
    } else {
      project_out_score(yd, omega);
    }
  }

  fit.X_resid = data.X - fit.xi_hat * fit.U_hat.transpose();
  if (cfg.variant == Variant::PlsR) {
    fit.Y_resid = yd;
  } else {
    fit.Y_resid = data.Y - fit.omega_hat * fit.V_hat.transpose();
  }
  return fit;
}

Matrix predict(const FitResult& fit, const Matrix& X_new) {
  if (X_new.cols() != fit.p()) {
    throw ConfigError("predict: column count mismatch (expected " +
                      std::to_string(fit.p()) + ")");
  }
  if (!X_new.allFinite()) throw ConfigError("predict: non-finite entries");

  Matrix xc = X_new.rowwise() - fit.x_means.transpose();
  Matrix scores(X_new.rows(), fit.H());
  for (Index h = 0; h < fit.H(); ++h) {
    scores.col(h) = xc * fit.U_hat.col(h);
    xc.noalias() -= scores.col(h) * fit.U_hat.col(h).transpose();
  }

  Matrix y;
  if (fit.fh) {
    Matrix basis(X_new.rows(), fit.fh->coef.cols());
    for (Index h = 0; h < fit.H(); ++h) {
      for (int d = 1; d <= fit.fh->degree; ++d) {
        const Index col = h * fit.fh->degree + (d - 1);
        basis.col(col) = scores.col(h).array().pow(d).matrix();
        basis.col(col).array() -= fit.fh->basis_means[col];
      }
    }
    y = basis * fit.fh->coef.transpose();
  } else {
    y = scores * fit.theta_hat.transpose();
  }
  return y.rowwise() + fit.y_means.transpose();
}

double loading_distance(const Vector& u_hat, const Vector& w_true,
                        DistanceKind kind) {
  if (u_hat.size() != w_true.size()) {
    throw ConfigError("loading_distance: length mismatch");
  }
  const double p = static_cast<double>(u_hat.size());
  const double plus = (u_hat - w_true).squaredNorm();
  const double minus = (u_hat + w_true).squaredNorm();
  const double best = std::min(plus, minus);
  if (kind == DistanceKind::RootMeanSquare) return std::sqrt(best) / p;
  return best / p;
}

}  // namespace gflsr
