#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <sstream>

#include "gflsr/canonical.hpp"
#include "gflsr/fit.hpp"
#include "gflsr/rng.hpp"

namespace gflsr {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Matrix orthogonal_complement(const Matrix& basis, Index dim) {
  if (basis.cols() == 0) return Matrix::Identity(dim, dim);
  Eigen::HouseholderQR<Matrix> qr(basis);
  const Matrix full = qr.householderQ() * Matrix::Identity(dim, dim);
  return full.rightCols(dim - basis.cols());
}

struct Objective {
  const Matrix& xd;
  const Matrix& yd;
  const Matrix& zu;
  const Matrix& zv;
  DependenceMeasure measure;
  double eta;
  double n;

  double operator()(const Vector& a, const Vector& c) const {
    const Vector xs = xd * (zu * a);
    const Vector ys = yd * (zv * c);
    double value;
    try {
      value = dependence(measure, xs, ys);
    } catch (const ConfigError&) {
      return kNegInf;  // constant score under a correlation measure
    }
    if (eta != 0.0) value += eta * xs.squaredNorm() / n;
    return value;
  }
};

Vector random_unit(Index dim, Rng& rng) {
  Vector v(dim);
  for (Index i = 0; i < dim; ++i) v[i] = rng.normal();
  const double nrm = v.norm();
  return nrm > 0 ? Vector(v / nrm) : Vector(Vector::Unit(dim, 0));
}

// Alternating random-direction ascent on the product of spheres in the
// complement coordinates. Returns the best pair found plus the per-level
// objective trace.
std::pair<std::pair<Vector, Vector>, std::vector<double>> coordinate_ascent(
    const Objective& obj, const GflsrFitConfig& cfg, const Vector& warm_a,
    const Vector& warm_c, Rng& rng) {
  const Index du = warm_a.size(), dv = warm_c.size();
  Vector best_a = warm_a, best_c = warm_c;
  double best = obj(best_a, best_c);
  std::vector<double> trace;

  for (int r = 0; r < cfg.restarts + 1; ++r) {
    Vector a = r == 0 ? warm_a : random_unit(du, rng);
    Vector c = r == 0 ? warm_c : random_unit(dv, rng);
    double cur = obj(a, c);
    double step = cfg.initial_step;
    for (int level = 0; level < cfg.levels; ++level) {
      for (int side = 0; side < 2; ++side) {
        for (int t = 0; t < cfg.proposals_per_level; ++t) {
          if (side == 0 && du > 1) {
            Vector cand = a + step * random_unit(du, rng);
            cand /= cand.norm();
            const double val = obj(cand, c);
            if (val > cur) { cur = val; a = cand; }
          } else if (side == 1 && dv > 1) {
            Vector cand = c + step * random_unit(dv, rng);
            cand /= cand.norm();
            const double val = obj(a, cand);
            if (val > cur) { cur = val; c = cand; }
          } else if ((side == 0 && du == 1) || (side == 1 && dv == 1)) {
            // One-dimensional side: only the sign is free.
            Vector& w = side == 0 ? a : c;
            Vector flipped = -w;
            const double val = side == 0 ? obj(flipped, c) : obj(a, flipped);
            if (val > cur) { cur = val; w = flipped; }
            break;
          }
        }
      }
      step *= 0.5;
      trace.push_back(cur);
    }
    if (cur > best) { best = cur; best_a = a; best_c = c; }
  }

  if (!std::isfinite(best)) {
    std::ostringstream msg;
    msg << "fit_gflsr: optimizer stagnation, objective trace:";
    for (double v : trace) msg << ' ' << v;
    throw NumericError(msg.str());
  }
  return {{best_a, best_c}, trace};
}

void project_out_score(Matrix& m, const Vector& score) {
  const double ss = score.squaredNorm();
  if (ss == 0.0) return;
  m.noalias() -= score * (score.transpose() * m) / ss;
}

// Additive polynomial basis xi_h^1..xi_h^degree per component, powers >= 1
// centered so the fit needs no intercept on centered responses.
Matrix poly_basis(const Matrix& scores, int degree, Vector* means) {
  const Index h = scores.cols();
  Matrix basis(scores.rows(), h * degree);
  Vector mu(h * degree);
  for (Index j = 0; j < h; ++j) {
    for (int d = 1; d <= degree; ++d) {
      const Index col = j * degree + (d - 1);
      basis.col(col) = scores.col(j).array().pow(d).matrix();
      mu[col] = basis.col(col).mean();
      basis.col(col).array() -= mu[col];
    }
  }
  if (means) *means = mu;
  return basis;
}

}  // namespace

FitResult fit_gflsr(const Dataset& data, const GflsrFitConfig& cfg) {
  const Index n = data.n(), p = data.p(), q = data.q(), H = cfg.H;
  if (H < 1) throw ConfigError("fit_gflsr: H must be >= 1");
  if (H > std::min({p, q, n - 1})) {
    throw ConfigError("fit_gflsr: H exceeds min(p, q, n - 1)");
  }
  if (cfg.optimizer == GflsrFitConfig::Optimizer::ClosedFormSVD) {
    if (cfg.measure != DependenceMeasure::Covariance) {
      throw ConfigError("fit_gflsr: ClosedFormSVD requires the covariance measure");
    }
    if (cfg.eta != 0.0) {
      throw ConfigError("fit_gflsr: ClosedFormSVD requires eta = 0");
    }
  } else if (p > 8 || q > 8) {
    throw ConfigError("fit_gflsr: CoordinateAscent supports p, q <= 8");
  }
  if (cfg.fh_family == GflsrFitConfig::FHFamily::PolyAdditive &&
      (cfg.poly_degree < 1 || cfg.poly_degree > 3)) {
    throw ConfigError("fit_gflsr: poly_degree must lie in 1..3");
  }
  if (cfg.eta < 0.0) throw ConfigError("fit_gflsr: eta must be >= 0");

  FitResult fit;
  fit.variant = Variant::PlsR;
  fit.config.H = H;
  fit.config.variant = Variant::PlsR;
  fit.config.svd_tol = cfg.svd_tol;
  fit.config.max_iter = cfg.max_iter;
  fit.gflsr_config = cfg;
  fit.x_means = data.x_means;
  fit.y_means = data.y_means;
  fit.U_hat.resize(p, H);
  fit.V_hat.resize(q, H);
  fit.xi_hat.resize(n, H);
  fit.omega_hat.resize(n, H);
  fit.b_hat.resize(H);
  fit.theta_hat = Matrix::Zero(q, H);
  fit.eps_hat.resize(n, H);

  const bool linear = cfg.fh_family == GflsrFitConfig::FHFamily::Linear;
  Matrix xd = data.X;
  Matrix yd = data.Y;
  Rng search_rng(0x6f1a2b3c4d5e6f70ULL);

  Vector fh_means;
  Matrix fh_coef;

  for (Index h = 0; h < H; ++h) {
    Vector u, v;
    if (cfg.optimizer == GflsrFitConfig::Optimizer::ClosedFormSVD) {
      const Matrix cov = xd.transpose() * yd / static_cast<double>(n);
      SingularPair pair;
      try {
        pair = leading_singular_pair(cov, cfg.svd_tol, cfg.max_iter);
      } catch (const NumericError& e) {
        throw NumericError(std::string("fit_gflsr: ") + e.what());
      }
      u = pair.u;
      v = pair.v;
    } else {
      const Matrix zu = orthogonal_complement(fit.U_hat.leftCols(h), p);
      const Matrix zv = orthogonal_complement(fit.V_hat.leftCols(h), q);
      Objective obj{xd, yd, zu, zv, cfg.measure, cfg.eta, static_cast<double>(n)};

      // Warm start from the projected covariance singular pair.
      const Matrix proj_cov =
          zu.transpose() * (xd.transpose() * yd) * zv / static_cast<double>(n);
      Vector warm_a, warm_c;
      if (proj_cov.cwiseAbs().maxCoeff() > 0.0) {
        Eigen::JacobiSVD<Matrix> svd(proj_cov,
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
        warm_a = svd.matrixU().col(0);
        warm_c = svd.matrixV().col(0);
      } else {
        warm_a = Vector::Unit(zu.cols(), 0);
        warm_c = Vector::Unit(zv.cols(), 0);
      }
      const auto [pair, trace] = coordinate_ascent(obj, cfg, warm_a, warm_c, search_rng);
      u = canonicalize_sign(zu * pair.first);
      v = canonicalize_sign(zv * pair.second);
    }

    const Vector xi = xd * u;
    const Vector omega = yd * v;
    const double xi_sq = xi.squaredNorm();
    if (xi_sq == 0.0) throw NumericError("fit_gflsr: zero score");
    const double b = omega.dot(xi) / xi_sq;

    fit.U_hat.col(h) = u;
    fit.V_hat.col(h) = v;
    fit.xi_hat.col(h) = xi;
    fit.omega_hat.col(h) = omega;
    fit.b_hat[h] = b;
    fit.eps_hat.col(h) = omega - b * xi;

    project_out_score(xd, xi);

    // f_H least squares on the scores extracted so far, then response
    // deflation from Y_0.
    const Matrix scores = fit.xi_hat.leftCols(h + 1);
    if (linear) {
      const Matrix coef = scores.colPivHouseholderQr().solve(data.Y);  // (h+1) x q
      fit.theta_hat.leftCols(h + 1) = coef.transpose();
      yd = data.Y - scores * coef;
    } else {
      const Matrix basis = poly_basis(scores, cfg.poly_degree, &fh_means);
      const Matrix coef = basis.colPivHouseholderQr().solve(data.Y);
      fh_coef = coef.transpose();
      yd = data.Y - basis * coef;
    }
  }

  fit.X_resid = data.X - fit.xi_hat * fit.U_hat.transpose();
  fit.Y_resid = yd;
  if (!linear) {
    FHModel fh;
    fh.degree = cfg.poly_degree;
    fh.coef = fh_coef;
    fh.basis_means = fh_means;
    fit.fh = fh;
  }
  return fit;
}

}  // namespace gflsr
