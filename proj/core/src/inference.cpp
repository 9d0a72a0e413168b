#include "gflsr/inference.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <thread>

#include "gflsr/rng.hpp"

namespace gflsr {

namespace {

Vector column_variances(const Matrix& m) {
  const double n = static_cast<double>(m.rows());
  Vector out(m.cols());
  for (Index j = 0; j < m.cols(); ++j) {
    const double mean = m.col(j).mean();
    out[j] = (m.col(j).array() - mean).square().sum() / n;
  }
  return out;
}

// mean diag of (I - B B^T)(I - B B^T)^T without forming the p x p matrix.
double projector_diag_mean(const Matrix& basis, Index dim) {
  const Matrix gram = basis.transpose() * basis;
  const double tr = dim - 2.0 * gram.trace() + gram.squaredNorm();
  return tr / static_cast<double>(dim);
}

Matrix pseudo_inverse(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()));
  if (es.info() != Eigen::Success) throw NumericError("pseudo_inverse: eigensolver failed");
  Vector vals = es.eigenvalues();
  const double cutoff = 1e-10 * std::max(vals.cwiseAbs().maxCoeff(), 1e-300);
  for (Index i = 0; i < vals.size(); ++i) {
    vals[i] = std::abs(vals[i]) > cutoff ? 1.0 / vals[i] : 0.0;
  }
  return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().transpose();
}

// PLS-R residuals carry the link noise; strip it back to the symmetric-model
// residual Y_H - sum_h eps_h v_h^T convention used by the corrections.
Matrix y_tilde_resid(const FitResult& fit) {
  if (fit.variant == Variant::PlsSvd) return fit.Y_resid;
  return fit.Y_resid - fit.eps_hat * fit.V_hat.transpose();
}

double clamp_flag(double value, const std::string& name,
                  std::vector<std::string>& flags) {
  if (value < 0.0) {
    flags.push_back("variance clamped: " + name);
    return 0.0;
  }
  return value;
}

}  // namespace

double corrected_b(const Vector& xi_hat, const Vector& omega_hat, double noise_term) {
  if (xi_hat.size() != omega_hat.size() || xi_hat.size() < 2) {
    throw ConfigError("corrected_b: need matching scores with n >= 2");
  }
  const double n = static_cast<double>(xi_hat.size());
  const double denom = xi_hat.squaredNorm() - n * noise_term;
  if (!(denom > 0.0)) {
    throw NumericError("noise exceeds signal variance: nonpositive slope denominator");
  }
  return xi_hat.dot(omega_hat) / denom;
}

CorrectedEstimates corrected_estimates(const FitResult& fit, NoiseCase assumption) {
  if (assumption == NoiseCase::A) {
    throw ConfigError("corrected_estimates: assumption must be B or C");
  }
  const Index n = fit.n(), p = fit.p(), q = fit.q(), H = fit.H();
  const double dn = static_cast<double>(n);

  CorrectedEstimates est;
  est.assumption = assumption;
  est.sigma_xi_sq.resize(H);
  est.b.resize(H);
  est.sigma1_sq_per_component.resize(H);

  const Matrix x0 = fit.fitted_x() + fit.X_resid;  // centered data, exactly
  const Matrix y0 = fit.fitted_y() + fit.Y_resid;
  const Matrix yt = y_tilde_resid(fit);

  // Quadratic forms u' Var(X_0) u and v' Var(Y_0) v, 1/n divisor.
  auto quad = [&](const Matrix& data, const Vector& w) {
    const Vector s = data * w;
    const double mean = s.mean();
    return (s.array() - mean).square().sum() / dn;
  };

  Vector noise_term(H);
  if (assumption == NoiseCase::B) {
    est.sigma_x_sq = clamp_flag(
        column_variances(fit.X_resid).mean() / projector_diag_mean(fit.U_hat, p),
        "sigma_x_sq", est.flags);
    est.sigma_y_sq = clamp_flag(
        column_variances(yt).mean() / projector_diag_mean(fit.V_hat, q),
        "sigma_y_sq", est.flags);
    noise_term.setConstant(est.sigma_x_sq);
    for (Index h = 0; h < H; ++h) {
      est.sigma_xi_sq[h] = clamp_flag(quad(x0, fit.U_hat.col(h)) - est.sigma_x_sq,
                                      "sigma_xi_sq[" + std::to_string(h) + "]",
                                      est.flags);
    }
  } else {
    const Matrix proj_x = Matrix::Identity(p, p) - fit.U_hat * fit.U_hat.transpose();
    Matrix xr = fit.X_resid;
    xr.rowwise() -= xr.colwise().mean().eval();
    const Matrix var_xr = xr.transpose() * xr / dn;
    est.Sigma_X = pseudo_inverse(proj_x) * var_xr;
    est.Sigma_X = 0.5 * (est.Sigma_X + est.Sigma_X.transpose()).eval();

    const Matrix proj_y = Matrix::Identity(q, q) - fit.V_hat * fit.V_hat.transpose();
    Matrix ytc = yt;
    ytc.rowwise() -= ytc.colwise().mean().eval();
    const Matrix var_yt = ytc.transpose() * ytc / dn;
    est.Sigma_Y = pseudo_inverse(proj_y) * var_yt;
    est.Sigma_Y = 0.5 * (est.Sigma_Y + est.Sigma_Y.transpose()).eval();

    for (Index h = 0; h < H; ++h) {
      const Vector u = fit.U_hat.col(h);
      noise_term[h] = u.dot(est.Sigma_X * u);
      est.sigma_xi_sq[h] = clamp_flag(quad(x0, u) - noise_term[h],
                                      "sigma_xi_sq[" + std::to_string(h) + "]",
                                      est.flags);
    }
    est.sigma_y_sq = est.Sigma_Y.diagonal().mean();
    est.sigma_x_sq = est.Sigma_X.diagonal().mean();
  }

  for (Index h = 0; h < H; ++h) {
    try {
      est.b[h] = corrected_b(fit.xi_hat.col(h), fit.omega_hat.col(h), noise_term[h]);
    } catch (const NumericError&) {
      est.flags.push_back("noise exceeds signal variance: b[" + std::to_string(h) +
                          "] left uncorrected");
      est.b[h] = fit.b_hat[h];
    }
  }

  for (Index h = 0; h < H; ++h) {
    const Vector v = fit.V_hat.col(h);
    const double var_omega = quad(y0, v);
    const double y_noise = assumption == NoiseCase::B
                               ? est.sigma_y_sq
                               : v.dot(est.Sigma_Y * v);
    est.sigma1_sq_per_component[h] =
        clamp_flag(var_omega - y_noise - est.b[h] * est.b[h] * est.sigma_xi_sq[h],
                   "sigma1_sq[" + std::to_string(h) + "]", est.flags);
  }
  est.sigma1_sq = est.sigma1_sq_per_component.mean();
  return est;
}

void align_to_base(FitResult& replicate, const FitResult& base) {
  if (replicate.H() != base.H()) {
    throw ConfigError("align_to_base: component counts differ");
  }
  for (Index h = 0; h < base.H(); ++h) {
    const double su = replicate.U_hat.col(h).dot(base.U_hat.col(h)) < 0.0 ? -1.0 : 1.0;
    const double sv = replicate.V_hat.col(h).dot(base.V_hat.col(h)) < 0.0 ? -1.0 : 1.0;
    if (su < 0.0) {
      replicate.U_hat.col(h) = -replicate.U_hat.col(h);
      replicate.xi_hat.col(h) = -replicate.xi_hat.col(h);
      replicate.theta_hat.col(h) = -replicate.theta_hat.col(h);
      if (replicate.fh) {
        for (int d = 1; d <= replicate.fh->degree; ++d) {
          if (d % 2 == 1) {
            const Index col = h * replicate.fh->degree + (d - 1);
            replicate.fh->coef.col(col) = -replicate.fh->coef.col(col);
            replicate.fh->basis_means[col] = -replicate.fh->basis_means[col];
          }
        }
      }
    }
    if (sv < 0.0) {
      replicate.V_hat.col(h) = -replicate.V_hat.col(h);
      replicate.omega_hat.col(h) = -replicate.omega_hat.col(h);
      replicate.eps_hat.col(h) = -replicate.eps_hat.col(h);
    }
    replicate.b_hat[h] *= su * sv;
  }
}

BootstrapResult residual_bootstrap(const FitResult& fit, int B, std::uint64_t seed,
                                   int threads) {
  if (B < 1) throw ConfigError("residual_bootstrap: need B >= 1");
  const Index n = fit.n();

  BootstrapResult boot;
  boot.B = B;
  boot.seed = seed;
  boot.base = fit;

  const Matrix fitted_x = fit.fitted_x();
  const Matrix fitted_y = fit.fitted_y();

  std::vector<std::unique_ptr<FitResult>> slots(static_cast<std::size_t>(B));
  std::vector<char> failed(static_cast<std::size_t>(B), 0);

  auto run_one = [&](int b) {
    Rng rng(Rng::mix(seed, static_cast<std::uint64_t>(b)));
    Matrix xb = fitted_x;
    Matrix yb = fitted_y;
    for (Index i = 0; i < n; ++i) {
      const Index r = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
      xb.row(i) += fit.X_resid.row(r);
      yb.row(i) += fit.Y_resid.row(r);
    }
    xb.rowwise() += fit.x_means.transpose();
    yb.rowwise() += fit.y_means.transpose();
    try {
      const Dataset ds = Dataset::from_raw(xb, yb);
      FitResult rep = fit.gflsr_config ? fit_gflsr(ds, *fit.gflsr_config)
                                       : fit_pls(ds, fit.config);
      align_to_base(rep, fit);
      slots[static_cast<std::size_t>(b)] = std::make_unique<FitResult>(std::move(rep));
    } catch (const std::exception&) {
      failed[static_cast<std::size_t>(b)] = 1;
    }
  };

  int nthreads = threads > 0 ? threads
                             : static_cast<int>(std::thread::hardware_concurrency());
  nthreads = std::max(1, std::min(nthreads, B));
  if (nthreads == 1) {
    for (int b = 0; b < B; ++b) run_one(b);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t) {
      pool.emplace_back([&, t]() {
        for (int b = t; b < B; b += nthreads) run_one(b);
      });
    }
    for (auto& th : pool) th.join();
  }

  for (int b = 0; b < B; ++b) {
    if (failed[static_cast<std::size_t>(b)]) {
      ++boot.failed;
    } else {
      boot.replicates.push_back(std::move(*slots[static_cast<std::size_t>(b)]));
    }
  }
  if (boot.failed * 10 > B) {
    throw NumericError("residual_bootstrap: more than 10% of replicates failed (" +
                       std::to_string(boot.failed) + "/" + std::to_string(B) + ")");
  }
  return boot;
}

double empirical_quantile(std::vector<double> values, double prob) {
  if (values.empty()) throw ConfigError("empirical_quantile: empty sample");
  if (!(prob >= 0.0 && prob <= 1.0)) throw ConfigError("empirical_quantile: prob out of range");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * prob;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  const double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

const IntervalTable::Row* IntervalTable::find(const std::string& param, Index i,
                                              Index j) const {
  for (const auto& row : rows) {
    if (row.param == param && row.i == i && row.j == j) return &row;
  }
  return nullptr;
}

IntervalTable intervals(const BootstrapResult& boot, double level) {
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("intervals: level out of range");
  if (boot.replicates.empty()) throw ConfigError("intervals: no replicates");
  const double lo_p = 0.5 * (1.0 - level);
  const double hi_p = 1.0 - lo_p;

  IntervalTable table;
  table.level = level;

  const std::size_t m = boot.replicates.size();
  std::vector<double> buf(m);
  auto add = [&](const std::string& param, Index i, Index j, auto&& getter) {
    for (std::size_t b = 0; b < m; ++b) buf[b] = getter(boot.replicates[b]);
    IntervalTable::Row row;
    row.param = param;
    row.i = i;
    row.j = j;
    row.lower = empirical_quantile(buf, lo_p);
    row.point = empirical_quantile(buf, 0.5);
    row.upper = empirical_quantile(buf, hi_p);
    table.rows.push_back(std::move(row));
  };

  const Index p = boot.base.p(), q = boot.base.q(), H = boot.base.H();
  for (Index h = 0; h < H; ++h) {
    for (Index i = 0; i < p; ++i) {
      add("u", i, h, [&](const FitResult& f) { return f.U_hat(i, h); });
    }
    for (Index i = 0; i < q; ++i) {
      add("v", i, h, [&](const FitResult& f) { return f.V_hat(i, h); });
    }
    add("b", h, 0, [&](const FitResult& f) { return f.b_hat[h]; });
  }

  // Case-B corrected estimates per replicate.
  std::vector<CorrectedEstimates> corr;
  corr.reserve(m);
  for (const auto& rep : boot.replicates) {
    corr.push_back(corrected_estimates(rep, NoiseCase::B));
  }
  auto add_corr = [&](const std::string& param, Index i, auto&& getter) {
    for (std::size_t b = 0; b < m; ++b) buf[b] = getter(corr[b]);
    IntervalTable::Row row;
    row.param = param;
    row.i = i;
    row.j = 0;
    row.lower = empirical_quantile(buf, lo_p);
    row.point = empirical_quantile(buf, 0.5);
    row.upper = empirical_quantile(buf, hi_p);
    table.rows.push_back(std::move(row));
  };
  add_corr("sigma_x_sq_corr", 0, [](const CorrectedEstimates& e) { return e.sigma_x_sq; });
  add_corr("sigma_y_sq_corr", 0, [](const CorrectedEstimates& e) { return e.sigma_y_sq; });
  add_corr("sigma1_sq_corr", 0, [](const CorrectedEstimates& e) { return e.sigma1_sq; });
  for (Index h = 0; h < H; ++h) {
    add_corr("sigma_xi_sq_corr", h,
             [h](const CorrectedEstimates& e) { return e.sigma_xi_sq[h]; });
    add_corr("b_corr", h, [h](const CorrectedEstimates& e) { return e.b[h]; });
  }
  return table;
}

PredictionIntervals predict_interval(const BootstrapResult& boot, const Matrix& X_new,
                                     double level, bool add_residual) {
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("predict_interval: level out of range");
  if (boot.replicates.empty()) throw ConfigError("predict_interval: no replicates");
  const double lo_p = 0.5 * (1.0 - level);
  const double hi_p = 1.0 - lo_p;

  const Index m = X_new.rows();
  const Index q = boot.base.q();
  const std::size_t nrep = boot.replicates.size();

  std::vector<Matrix> preds;
  preds.reserve(nrep);
  for (std::size_t b = 0; b < nrep; ++b) {
    const FitResult& rep = boot.replicates[b];
    Matrix pb = predict(rep, X_new);
    if (add_residual) {
      // Residual of the prediction path Y_0 - f_H(xi): for the symmetric
      // variant this adds the link-noise part back on top of Y_resid, since
      // a new point's omega is not observable.
      Matrix pred_resid = rep.Y_resid;
      if (rep.variant == Variant::PlsSvd && !rep.fh) {
        pred_resid += rep.eps_hat * rep.V_hat.transpose();
      }
      Rng rng(Rng::mix(Rng::mix(boot.seed, 0x7072656443694221ULL),
                       static_cast<std::uint64_t>(b)));
      for (Index i = 0; i < m; ++i) {
        const Index r = static_cast<Index>(
            rng.below(static_cast<std::uint64_t>(pred_resid.rows())));
        pb.row(i) += pred_resid.row(r);
      }
    }
    preds.push_back(std::move(pb));
  }

  PredictionIntervals pi;
  pi.lower.resize(m, q);
  pi.point.resize(m, q);
  pi.upper.resize(m, q);
  std::vector<double> buf(nrep);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < q; ++j) {
      for (std::size_t b = 0; b < nrep; ++b) buf[b] = preds[b](i, j);
      pi.lower(i, j) = empirical_quantile(buf, lo_p);
      pi.point(i, j) = empirical_quantile(buf, 0.5);
      pi.upper(i, j) = empirical_quantile(buf, hi_p);
    }
  }
  return pi;
}

}  // namespace gflsr
