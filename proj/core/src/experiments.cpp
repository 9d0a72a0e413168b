#include "gflsr/experiments.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "gflsr/csv.hpp"
#include "gflsr/fit.hpp"
#include "gflsr/random_matrix.hpp"

namespace gflsr {

namespace {

using nlohmann::json;

void run_reps(int reps, int threads, const std::function<void(int)>& body) {
  int nthreads = threads > 0 ? threads
                             : static_cast<int>(std::thread::hardware_concurrency());
  nthreads = std::max(1, std::min(nthreads, reps));
  if (nthreads == 1) {
    for (int r = 0; r < reps; ++r) body(r);
    return;
  }
  std::vector<std::thread> pool;
  for (int t = 0; t < nthreads; ++t) {
    pool.emplace_back([&, t]() {
      for (int r = t; r < reps; r += nthreads) body(r);
    });
  }
  for (auto& th : pool) th.join();
}

std::uint64_t cell_seed(std::uint64_t seed, std::uint64_t cell, int rep) {
  return Rng::mix(Rng::mix(seed, cell), static_cast<std::uint64_t>(rep));
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid experiment config: ") + e.what());
  }
  ExperimentConfig cfg;
  cfg.kind = j.at("kind").get<std::string>();
  cfg.seed = j.value("seed", cfg.seed);
  cfg.reps = j.value("reps", 0);
  cfg.B = j.value("B", 0);
  cfg.H = j.value("H", Index{0});
  if (j.contains("n_grid")) {
    for (const auto& v : j["n_grid"]) cfg.n_grid.push_back(v.get<Index>());
  }
  if (j.contains("alpha")) {
    for (const auto& v : j["alpha"]) cfg.alpha.push_back(v.get<double>());
  }
  cfg.threads = j.value("threads", 0);
  cfg.include_raw = j.value("include_raw", false);
  cfg.out = j.value("out", std::string());
  if (j.contains("corn")) {
    cfg.corn_x = j["corn"].value("x_csv", std::string());
    cfg.corn_y = j["corn"].value("y_csv", std::string());
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::string ExperimentConfig::to_json() const {
  json j;
  j["kind"] = kind;
  j["seed"] = seed;
  if (reps) j["reps"] = reps;
  if (B) j["B"] = B;
  if (H) j["H"] = H;
  if (!n_grid.empty()) j["n_grid"] = n_grid;
  if (!alpha.empty()) j["alpha"] = alpha;
  if (threads) j["threads"] = threads;
  if (include_raw) j["include_raw"] = include_raw;
  if (!out.empty()) j["out"] = out;
  if (!corn_x.empty()) j["corn"] = {{"x_csv", corn_x}, {"y_csv", corn_y}};
  return j.dump(2);
}

const Report::Row* Report::find(const std::string& config_id,
                                const std::string& metric, Index n) const {
  for (const auto& row : rows) {
    if (row.config_id == config_id && row.metric == metric && row.n == n) return &row;
  }
  return nullptr;
}

void Report::add(const std::string& config_id, Index n, const std::string& noise,
                 const std::string& metric, std::vector<double> values) {
  Row row;
  row.config_id = config_id;
  row.n = n;
  row.noise = noise;
  row.metric = metric;
  row.reps = static_cast<int>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  row.mean = sum / static_cast<double>(values.size());
  row.q025 = empirical_quantile(values, 0.025);
  row.q975 = empirical_quantile(values, 0.975);
  row.skew = row.mean < row.q025 || row.mean > row.q975;
  row.raw = std::move(values);
  rows.push_back(std::move(row));
}

void Report::to_csv(const std::string& path, bool include_raw) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write report: " + path);
  out << "config_id,n,noise,metric,mean,q025,q975,reps,seed,skew";
  if (include_raw) out << ",raw";
  out << '\n';
  for (const auto& row : rows) {
    out << row.config_id << ',' << row.n << ',' << row.noise << ',' << row.metric
        << ',' << format_double(row.mean) << ',' << format_double(row.q025) << ','
        << format_double(row.q975) << ',' << row.reps << ',' << seed << ','
        << (row.skew ? 1 : 0);
    if (include_raw) {
      out << ',';
      for (std::size_t i = 0; i < row.raw.size(); ++i) {
        if (i) out << ';';
        out << format_double(row.raw[i]);
      }
    }
    out << '\n';
  }
}

std::string Report::to_json(bool include_raw) const {
  json j;
  j["seed"] = seed;
  json out_rows = json::array();
  for (const auto& row : rows) {
    json r;
    r["config_id"] = row.config_id;
    r["n"] = row.n;
    r["noise"] = row.noise;
    r["metric"] = row.metric;
    r["mean"] = row.mean;
    r["q025"] = row.q025;
    r["q975"] = row.q975;
    r["reps"] = row.reps;
    r["skew"] = row.skew;
    if (include_raw) r["raw"] = row.raw;
    out_rows.push_back(std::move(r));
  }
  j["rows"] = std::move(out_rows);
  return j.dump();
}

ModelParams random_sim1_params(std::uint64_t seed, Index p, Index q) {
  Rng rng(seed);
  ModelParams params;
  params.p = p;
  params.q = q;
  params.H = 2;
  params.W = random_orthonormal(p, 2, rng);
  params.V = random_orthonormal(q, 2, rng);
  params.sigma_xi_sq = Vector(2);
  params.sigma_xi_sq[0] = 24.0 + 4.0 * rng.uniform();
  params.sigma_xi_sq[1] = 18.0 + 4.0 * rng.uniform();
  params.b = Vector(2);
  params.b[0] = 2.8 + 0.4 * rng.uniform();
  params.b[1] = 1.4 + 0.2 * rng.uniform();
  params.sigma1_sq = 0.1;
  params.noise_case = NoiseCase::B;
  return params;
}

ModelParams sim2_params(std::uint64_t seed) {
  Rng rng(seed);
  ModelParams params;
  params.p = 20;
  params.q = 20;
  params.H = 3;
  params.W = random_orthonormal(20, 3, rng);
  params.V = random_orthonormal(20, 3, rng);
  params.sigma_xi_sq = (Vector(3) << 5, 3, 2).finished();
  params.b = (Vector(3) << 9, 6, 4).finished();
  params.sigma1_sq = 1.0;
  params.noise_case = NoiseCase::B;
  return params;
}

ModelParams sim3_params() {
  ModelParams params;
  params.p = 20;
  params.q = 20;
  params.H = 3;
  auto [w, v] = density_curve_loadings(20, 20, 3);
  params.W = std::move(w);
  params.V = std::move(v);
  params.sigma_xi_sq = (Vector(3) << 1.0, 0.9, 0.82).finished();
  params.b = (Vector(3) << 1.5, 1.11, 0.82).finished();
  params.noise_case = NoiseCase::B;
  return params;
}

Report run_sim1(const ExperimentConfig& cfg) {
  const int reps = cfg.reps > 0 ? cfg.reps : 50;
  std::vector<Index> ns = cfg.n_grid.empty()
                              ? std::vector<Index>{50, 200, 1000, 5000}
                              : cfg.n_grid;

  struct Cell {
    std::string id;
    NoiseSpec::LatentDist latent;
    bool inverse_wishart;
    double sigma_sq;
  };
  const std::vector<Cell> cells = {
      {"normal-0.01", NoiseSpec::LatentDist::NormalQuantile, false, 0.01},
      {"normal-2", NoiseSpec::LatentDist::NormalQuantile, false, 2.0},
      {"normal-iw", NoiseSpec::LatentDist::NormalQuantile, true, 0.3},
      {"exp-0.1", NoiseSpec::LatentDist::ExponentialCenteredRate1, false, 0.1},
  };

  Report report;
  report.seed = cfg.seed;
  std::uint64_t cell_index = 0;
  for (const auto& cell : cells) {
    for (Index n : ns) {
      std::vector<double> d1(static_cast<std::size_t>(reps));
      std::vector<double> d2(static_cast<std::size_t>(reps));
      run_reps(reps, cfg.threads, [&](int r) {
        const std::uint64_t s = cell_seed(cfg.seed, cell_index, r);
        ModelParams params = random_sim1_params(Rng::mix(s, 1));
        NoiseSpec noise;
        noise.latent = cell.latent;
        noise.sigma1_sq = params.sigma1_sq;
        if (cell.inverse_wishart) {
          noise.kind = NoiseCase::C;
          Rng mat_rng(Rng::mix(s, 2));
          const Matrix scale = cell.sigma_sq * Matrix::Identity(params.p, params.p);
          noise.Sigma_X = sample_inverse_wishart(scale, static_cast<int>(params.p) + 1, mat_rng);
          noise.Sigma_Y = noise.Sigma_X;  // response noise set equal to the predictor draw
        } else {
          noise.kind = NoiseCase::B;
          noise.sigma_x_sq = cell.sigma_sq;
          noise.sigma_y_sq = cell.sigma_sq;
        }
        auto [data, truth] = simulate_pls(params, n, noise, Rng::mix(s, 3));
        FitConfig fc;
        fc.H = 2;
        fc.variant = Variant::PlsR;
        const FitResult fit = fit_pls(data, fc);
        d1[static_cast<std::size_t>(r)] =
            loading_distance(fit.U_hat.col(0), params.W.col(0));
        d2[static_cast<std::size_t>(r)] =
            loading_distance(fit.U_hat.col(1), params.W.col(1));
      });
      report.add(cell.id, n, cell.id, "d_u1", std::move(d1));
      report.add(cell.id, n, cell.id, "d_u2", std::move(d2));
      ++cell_index;
    }
  }
  if (!cfg.out.empty()) report.to_csv(cfg.out, cfg.include_raw);
  return report;
}

Report run_sim2(const ExperimentConfig& cfg) {
  const int reps = cfg.reps > 0 ? cfg.reps : 50;
  std::vector<Index> ns = cfg.n_grid.empty()
                              ? std::vector<Index>{50, 100, 1000, 5000, 10000}
                              : cfg.n_grid;
  const std::vector<double> sigmas = {1.0, 15.0};

  Report report;
  report.seed = cfg.seed;
  std::uint64_t cell_index = 100;
  for (double sigma_sq : sigmas) {
    const std::string id = "sigma" + format_double(sigma_sq);
    for (Index n : ns) {
      std::vector<std::vector<double>> du(3), dxi(3), dv(3), domega(3);
      for (int h = 0; h < 3; ++h) {
        du[h].resize(static_cast<std::size_t>(reps));
        dxi[h].resize(static_cast<std::size_t>(reps));
        dv[h].resize(static_cast<std::size_t>(reps));
        domega[h].resize(static_cast<std::size_t>(reps));
      }
      run_reps(reps, cfg.threads, [&](int r) {
        const std::uint64_t s = cell_seed(cfg.seed, cell_index, r);
        ModelParams params = sim2_params(Rng::mix(s, 1));
        NoiseSpec noise;
        noise.kind = NoiseCase::B;
        noise.sigma_x_sq = sigma_sq;
        noise.sigma_y_sq = sigma_sq;
        noise.sigma1_sq = params.sigma1_sq;
        auto [data, truth] =
            simulate_pls(params, n, noise, Rng::mix(s, 2), Variant::PlsSvd);
        FitConfig fc;
        fc.H = 3;
        fc.variant = Variant::PlsSvd;
        const FitResult fit = fit_pls(data, fc);
        for (int h = 0; h < 3; ++h) {
          du[h][static_cast<std::size_t>(r)] = loading_distance(
              fit.U_hat.col(h), params.W.col(h), DistanceKind::MeanSquare);
          dv[h][static_cast<std::size_t>(r)] = loading_distance(
              fit.V_hat.col(h), params.V.col(h), DistanceKind::MeanSquare);
          // Scores carry the same sign ambiguity as the weights; resolve it
          // against the generating draw before taking distances.
          const double su =
              fit.xi_hat.col(h).dot(truth.xi.col(h)) < 0.0 ? -1.0 : 1.0;
          const double sv =
              fit.omega_hat.col(h).dot(truth.omega.col(h)) < 0.0 ? -1.0 : 1.0;
          dxi[h][static_cast<std::size_t>(r)] =
              (su * fit.xi_hat.col(h) - truth.xi.col(h)).squaredNorm() /
              static_cast<double>(n);
          domega[h][static_cast<std::size_t>(r)] =
              (sv * fit.omega_hat.col(h) - truth.omega.col(h)).squaredNorm() /
              static_cast<double>(n);
        }
      });
      for (int h = 0; h < 3; ++h) {
        const std::string suffix = std::to_string(h + 1);
        report.add(id, n, id, "d_u" + suffix, std::move(du[h]));
        report.add(id, n, id, "d_xi" + suffix, std::move(dxi[h]));
        report.add(id, n, id, "d_v" + suffix, std::move(dv[h]));
        report.add(id, n, id, "d_omega" + suffix, std::move(domega[h]));
      }
      ++cell_index;
    }
  }
  if (!cfg.out.empty()) report.to_csv(cfg.out, cfg.include_raw);
  return report;
}

Report run_sim3(const ExperimentConfig& cfg) {
  const int reps = cfg.reps > 0 ? cfg.reps : 100;
  std::vector<Index> ns =
      cfg.n_grid.empty() ? std::vector<Index>{50, 1000} : cfg.n_grid;
  const std::vector<double> alphas =
      cfg.alpha.empty() ? std::vector<double>{0.1, 0.5} : cfg.alpha;

  const ModelParams base = sim3_params();
  Report report;
  report.seed = cfg.seed;
  std::uint64_t cell_index = 200;

  auto record_cell = [&](const std::string& id, Index n, bool case_c, double alpha) {
    const std::size_t nr = static_cast<std::size_t>(reps);
    std::vector<double> du1(nr), sx(nr), sy(nr), s1(nr);
    std::vector<std::vector<double>> bnaive(3), bcorr(3), s2xi(3);
    for (int h = 0; h < 3; ++h) {
      bnaive[h].resize(nr);
      bcorr[h].resize(nr);
      s2xi[h].resize(nr);
    }
    run_reps(reps, cfg.threads, [&](int r) {
      const std::uint64_t s = cell_seed(cfg.seed, cell_index, r);
      NoiseSpec noise = NoiseSpec::isotropic_from_rate(base, alpha);
      if (case_c) {
        const double sigma_sq = noise.sigma_x_sq;
        Rng mat_rng(Rng::mix(s, 1));
        noise.kind = NoiseCase::C;
        noise.Sigma_X = sample_inverse_wishart(
            sigma_sq * Matrix::Identity(base.p, base.p), static_cast<int>(base.p) + 1,
            mat_rng);
        noise.Sigma_Y = sample_inverse_wishart(
            sigma_sq * Matrix::Identity(base.q, base.q), static_cast<int>(base.q) + 1,
            mat_rng);
      }
      ModelParams params = base;
      params.noise_case = noise.kind;
      params.sigma_x_sq = noise.sigma_x_sq;
      params.sigma_y_sq = noise.sigma_y_sq;
      params.Sigma_X = noise.Sigma_X;
      params.Sigma_Y = noise.Sigma_Y;
      params.sigma1_sq = noise.sigma1_sq;

      auto [data, truth] =
          simulate_pls(params, n, noise, Rng::mix(s, 2), Variant::PlsSvd);
      FitConfig fc;
      fc.H = 3;
      fc.variant = Variant::PlsSvd;
      const FitResult fit = fit_pls(data, fc);
      const CorrectedEstimates est =
          corrected_estimates(fit, case_c ? NoiseCase::C : NoiseCase::B);

      du1[static_cast<std::size_t>(r)] =
          loading_distance(fit.U_hat.col(0), base.W.col(0));
      sx[static_cast<std::size_t>(r)] = est.sigma_x_sq;
      sy[static_cast<std::size_t>(r)] = est.sigma_y_sq;
      s1[static_cast<std::size_t>(r)] = est.sigma1_sq;
      for (int h = 0; h < 3; ++h) {
        // Resolve the per-side sign ambiguity against the truth so slope
        // summaries are orientation-free.
        const double su = fit.U_hat.col(h).dot(base.W.col(h)) < 0.0 ? -1.0 : 1.0;
        const double sv = fit.V_hat.col(h).dot(base.V.col(h)) < 0.0 ? -1.0 : 1.0;
        bnaive[h][static_cast<std::size_t>(r)] = su * sv * fit.b_hat[h];
        bcorr[h][static_cast<std::size_t>(r)] = su * sv * est.b[h];
        s2xi[h][static_cast<std::size_t>(r)] = est.sigma_xi_sq[h];
      }
    });
    report.add(id, n, id, "d_u1", std::move(du1));
    report.add(id, n, id, "sigma_x_sq_corr", std::move(sx));
    report.add(id, n, id, "sigma_y_sq_corr", std::move(sy));
    report.add(id, n, id, "sigma1_sq_corr", std::move(s1));
    for (int h = 0; h < 3; ++h) {
      const std::string suffix = std::to_string(h + 1);
      report.add(id, n, id, "b" + suffix, std::move(bnaive[h]));
      report.add(id, n, id, "b_corr" + suffix, std::move(bcorr[h]));
      report.add(id, n, id, "s2_xi" + suffix, std::move(s2xi[h]));
    }
    ++cell_index;
  };

  for (double alpha : alphas) {
    for (Index n : ns) {
      record_cell("caseB-alpha" + format_double(alpha), n, false, alpha);
    }
  }
  record_cell("caseC-alpha0.5", ns.back(), true, 0.5);

  if (!cfg.out.empty()) report.to_csv(cfg.out, cfg.include_raw);
  return report;
}

Report run_sim4(const ExperimentConfig& cfg) {
  const int B = cfg.B > 0 ? cfg.B : 100;
  const Index n = cfg.n_grid.empty() ? 1000 : cfg.n_grid.front();
  const double alpha = cfg.alpha.empty() ? 0.1 : cfg.alpha.front();

  ModelParams params = sim3_params();
  NoiseSpec noise = NoiseSpec::isotropic_from_rate(params, alpha);
  params.noise_case = noise.kind;
  params.sigma_x_sq = noise.sigma_x_sq;
  params.sigma_y_sq = noise.sigma_y_sq;
  params.sigma1_sq = noise.sigma1_sq;

  auto [data, truth] =
      simulate_pls(params, n, noise, Rng::mix(cfg.seed, 11), Variant::PlsSvd);
  auto [test_data, test_truth] =
      simulate_pls(params, 10, noise, Rng::mix(cfg.seed, 12), Variant::PlsSvd);

  FitConfig fc;
  fc.H = 3;
  fc.variant = Variant::PlsSvd;
  const FitResult fit = fit_pls(data, fc);
  const BootstrapResult boot =
      residual_bootstrap(fit, B, Rng::mix(cfg.seed, 13), cfg.threads);
  const IntervalTable table = intervals(boot, 0.95);

  double u_in = 0.0;
  for (Index i = 0; i < params.p; ++i) {
    const auto* row = table.find("u", i, 0);
    if (row && row->lower <= params.W(i, 0) && params.W(i, 0) <= row->upper) u_in += 1.0;
  }
  double v_in = 0.0;
  for (Index i = 0; i < params.q; ++i) {
    const auto* row = table.find("v", i, 0);
    if (row && row->lower <= params.V(i, 0) && params.V(i, 0) <= row->upper) v_in += 1.0;
  }

  const Matrix x_new = test_data.raw_x();
  const Matrix y_new = test_data.raw_y();
  const PredictionIntervals pi = predict_interval(boot, x_new, 0.95);
  double cells_in = 0.0;
  for (Index i = 0; i < y_new.rows(); ++i) {
    for (Index j = 0; j < y_new.cols(); ++j) {
      if (pi.lower(i, j) <= y_new(i, j) && y_new(i, j) <= pi.upper(i, j)) cells_in += 1.0;
    }
  }

  Report report;
  report.seed = cfg.seed;
  report.add("sim4", n, "alpha" + format_double(alpha), "ci_coverage_u1",
             {u_in / static_cast<double>(params.p)});
  report.add("sim4", n, "alpha" + format_double(alpha), "ci_coverage_v1",
             {v_in / static_cast<double>(params.q)});
  report.add("sim4", n, "alpha" + format_double(alpha), "pi_coverage",
             {cells_in / static_cast<double>(y_new.size())});
  report.add("sim4", n, "alpha" + format_double(alpha), "bootstrap_failures",
             {static_cast<double>(boot.failed)});
  if (!cfg.out.empty()) report.to_csv(cfg.out, cfg.include_raw);
  return report;
}

Report run_corn(const ExperimentConfig& cfg) {
  if (cfg.corn_x.empty() || cfg.corn_y.empty()) {
    throw ConfigError(
        "corn: supply spectra and property CSV paths "
        "(expected 80x700 and 80x4 numeric tables with a header row)");
  }
  const CsvTable xt = load_csv_table(cfg.corn_x);
  const CsvTable yt = load_csv_table(cfg.corn_y);
  if (xt.values.rows() != yt.values.rows() || xt.values.rows() < 2) {
    throw ConfigError("corn: spectra and property files disagree on sample count "
                      "(expected 80x700 and 80x4)");
  }

  const Dataset data = Dataset::from_raw(xt.values, yt.values);
  FitConfig fc;
  fc.H = cfg.H > 0 ? cfg.H : 4;
  fc.variant = Variant::PlsR;
  const FitResult fit = fit_pls(data, fc);
  const CorrectedEstimates est = corrected_estimates(fit, NoiseCase::B);

  Report report;
  report.seed = cfg.seed;
  const double dn = static_cast<double>(data.n());
  for (Index j = 0; j < data.q(); ++j) {
    report.add("corn", j, "m5", "fit_mse" + std::to_string(j + 1),
               {fit.Y_resid.col(j).squaredNorm() / dn});
  }
  report.add("corn", 0, "m5", "sigma_x_sq_corr", {est.sigma_x_sq});
  report.add("corn", 0, "m5", "sigma_y_sq_corr", {est.sigma_y_sq});
  report.add("corn", 0, "m5", "sigma1_sq_corr", {est.sigma1_sq});
  for (Index h = 0; h < fit.H(); ++h) {
    report.add("corn", h, "m5", "s2_xi" + std::to_string(h + 1),
               {est.sigma_xi_sq[h]});
  }
  // Wavelength-indexed weight rows back the first-two-component plots.
  for (Index i = 0; i < data.p(); ++i) {
    report.add("corn-weights", i, "m5", "u1", {fit.U_hat(i, 0)});
    report.add("corn-weights", i, "m5", "u2", {fit.U_hat(i, 1)});
  }

  if (cfg.B > 0) {
    const BootstrapResult boot =
        residual_bootstrap(fit, cfg.B, Rng::mix(cfg.seed, 21), cfg.threads);
    const IntervalTable table = intervals(boot, 0.95);
    double inside = 0.0;
    for (Index i = 0; i < data.p(); ++i) {
      const auto* row = table.find("u", i, 0);
      if (!row) continue;
      if (row->lower <= fit.U_hat(i, 0) && fit.U_hat(i, 0) <= row->upper) {
        inside += 1.0;
      }
      report.add("corn-weights", i, "m5", "u1_ci_lower", {row->lower});
      report.add("corn-weights", i, "m5", "u1_ci_upper", {row->upper});
    }
    report.add("corn", 0, "m5", "u1_inside_own_band",
               {inside / static_cast<double>(data.p())});
  }

  if (!cfg.out.empty()) report.to_csv(cfg.out, cfg.include_raw);
  return report;
}

Report run_experiment(const ExperimentConfig& cfg) {
  if (cfg.kind == "sim1") return run_sim1(cfg);
  if (cfg.kind == "sim2") return run_sim2(cfg);
  if (cfg.kind == "sim3") return run_sim3(cfg);
  if (cfg.kind == "sim4") return run_sim4(cfg);
  if (cfg.kind == "corn") return run_corn(cfg);
  throw ConfigError("unknown experiment kind: " + cfg.kind);
}

}  // namespace gflsr
