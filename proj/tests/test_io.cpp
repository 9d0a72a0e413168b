#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "gflsr/csv.hpp"
#include "gflsr/experiments.hpp"
#include "gflsr/fit.hpp"
#include "gflsr/inference.hpp"
#include "gflsr/random_matrix.hpp"
#include "gflsr/serialize.hpp"
#include "gflsr/simulate.hpp"

using namespace gflsr;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("/tmp/gflsr_test_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
};

std::string read_all(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("format_double round-trips tricky values bit-exactly") {
  for (double v : {1.0 / 3.0, -0.0, 1e-300, 2.2045e-6, 0.0541, 123456.789e-12,
                   -9.87654321e100, 4.8422e-5}) {
    CHECK(parse_double(format_double(v)) == v);
  }
  CHECK_THROWS_AS(parse_double("12,3"), ConfigError);
  CHECK_THROWS_AS(parse_double("abc"), ConfigError);
}

TEST_CASE("two-by-two example loads with the header split") {
  TempFile f("small.csv");
  {
    std::ofstream out(f.path);
    out << "x1,y1\n1,2\n3,4\n";
  }
  const Dataset ds = load_dataset_csv(f.path);
  CHECK(ds.p() == 1);
  CHECK(ds.q() == 1);
  CHECK(ds.raw_x()(0, 0) == 1.0);
  CHECK(ds.raw_x()(1, 0) == 3.0);
  CHECK(ds.raw_y()(0, 0) == 2.0);
  CHECK(ds.raw_y()(1, 0) == 4.0);
}

TEST_CASE("a missing header is rejected") {
  TempFile f("noheader.csv");
  {
    std::ofstream out(f.path);
    out << "1,2\n3,4\n";
  }
  CHECK_THROWS_WITH_AS(load_csv_table(f.path),
                       doctest::Contains("header required"), ConfigError);
}

TEST_CASE("a non-numeric cell is reported with its location") {
  TempFile f("bad.csv");
  {
    std::ofstream out(f.path);
    out << "x1,y1\n1,2\n3,oops\n";
  }
  try {
    load_csv_table(f.path);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("row 3") != std::string::npos);
    CHECK(msg.find("column 2") != std::string::npos);
  }
}

TEST_CASE("dataset CSV round trip is bit-exact") {
  const ModelParams params = random_sim1_params(17);
  NoiseSpec noise;
  noise.sigma_x_sq = 0.37;
  noise.sigma_y_sq = 0.11;
  noise.sigma1_sq = params.sigma1_sq;
  auto [data, truth] = simulate_pls(params, 64, noise, 18);

  TempFile f("roundtrip.csv");
  save_dataset_csv(f.path, data);
  const CsvTable table = load_csv_table(f.path);
  CHECK((table.values.leftCols(data.p()) - data.raw_x()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((table.values.rightCols(data.q()) - data.raw_y()).cwiseAbs().maxCoeff() == 0.0);

  // Re-saving the parsed table reproduces the file byte for byte.
  TempFile g("roundtrip2.csv");
  save_csv_table(g.path, table.header, table.values);
  CHECK(read_all(f.path) == read_all(g.path));
}

TEST_CASE("fit JSON round trip preserves predictions") {
  const ModelParams params = random_sim1_params(23);
  NoiseSpec noise;
  noise.sigma_x_sq = 0.2;
  noise.sigma_y_sq = 0.2;
  noise.sigma1_sq = params.sigma1_sq;
  auto [data, truth] = simulate_pls(params, 80, noise, 24);
  FitConfig cfg;
  cfg.H = 2;
  const FitResult fit = fit_pls(data, cfg);
  const FitResult back = fit_result_from_json(fit_result_to_json(fit));
  CHECK((back.U_hat - fit.U_hat).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.theta_hat - fit.theta_hat).cwiseAbs().maxCoeff() == 0.0);
  const Matrix probe = data.raw_x().topRows(5);
  CHECK((predict(back, probe) - predict(fit, probe)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("model params JSON round trip validates") {
  const ModelParams params = sim2_params(5);
  const ModelParams back = model_params_from_json(model_params_to_json(params));
  CHECK(validate_params(back).ok());
  CHECK((back.W - params.W).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.sigma1_sq == params.sigma1_sq);
}

TEST_CASE("experiment config JSON carries grids and overrides") {
  ExperimentConfig cfg;
  cfg.kind = "sim3";
  cfg.seed = 99;
  cfg.reps = 7;
  cfg.n_grid = {50, 1000};
  cfg.alpha = {0.1};
  const ExperimentConfig back = ExperimentConfig::from_json(cfg.to_json());
  CHECK(back.kind == "sim3");
  CHECK(back.seed == 99);
  CHECK(back.reps == 7);
  REQUIRE(back.n_grid.size() == 2);
  CHECK(back.n_grid[1] == 1000);
  CHECK_THROWS_AS(ExperimentConfig::from_json("{"), ConfigError);
}

TEST_CASE("identical config and seed give a byte-identical report") {
  ExperimentConfig cfg;
  cfg.kind = "sim1";
  cfg.seed = 7;
  cfg.reps = 3;
  cfg.n_grid = {50};
  cfg.threads = 2;

  TempFile a("report_a.csv"), b("report_b.csv");
  cfg.out = a.path;
  run_experiment(cfg);
  cfg.out = b.path;
  cfg.threads = 1;  // scheduling must not matter
  run_experiment(cfg);
  const std::string ra = read_all(a.path);
  CHECK(!ra.empty());
  CHECK(ra == read_all(b.path));
}

TEST_CASE("reports carry the seed and repetition count") {
  ExperimentConfig cfg;
  cfg.kind = "sim1";
  cfg.seed = 31;
  cfg.reps = 2;
  cfg.n_grid = {50};
  const Report report = run_experiment(cfg);
  CHECK(report.seed == 31);
  REQUIRE(!report.rows.empty());
  for (const auto& row : report.rows) CHECK(row.reps == 2);
  const auto* cell = report.find("normal-0.01", "d_u1", 50);
  REQUIRE(cell != nullptr);
  CHECK(cell->mean > 0.0);
}

TEST_CASE("corn run without data fails with the expected-shape message") {
  ExperimentConfig cfg;
  cfg.kind = "corn";
  CHECK_THROWS_WITH_AS(run_corn(cfg), doctest::Contains("80x700"), ConfigError);
}

TEST_CASE("the spectra pipeline runs end to end on synthetic 80x700 data") {
  // Shape-compatible stand-in for the instrument data: 80 samples, 700
  // channels, 4 responses, four latent components.
  ModelParams params;
  params.p = 700;
  params.q = 4;
  params.H = 4;
  Rng rng(2025);
  params.W = random_orthonormal(700, 4, rng);
  params.V = random_orthonormal(4, 4, rng);
  params.sigma_xi_sq = (Vector(4) << 0.9, 0.4, 0.2, 0.1).finished();
  params.b = (Vector(4) << 2.0, 1.5, 1.2, 1.0).finished();
  params.sigma1_sq = 0.05;
  params.noise_case = NoiseCase::B;
  params.sigma_x_sq = 1e-5;
  params.sigma_y_sq = 0.02;
  auto [data, truth] = simulate_pls(params, 80, NoiseSpec::from_params(params), 33);

  TempFile x("corn_x.csv"), y("corn_y.csv"), out("corn_report.csv");
  {
    std::vector<std::string> xh, yh;
    for (Index j = 0; j < 700; ++j) xh.push_back("w" + std::to_string(1100 + 2 * j));
    for (Index j = 0; j < 4; ++j) yh.push_back("prop" + std::to_string(j + 1));
    save_csv_table(x.path, xh, data.raw_x());
    save_csv_table(y.path, yh, data.raw_y());
  }

  ExperimentConfig cfg;
  cfg.kind = "corn";
  cfg.corn_x = x.path;
  cfg.corn_y = y.path;
  cfg.B = 100;
  cfg.seed = 9;
  cfg.out = out.path;
  const Report report = run_corn(cfg);

  const auto* sx = report.find("corn", "sigma_x_sq_corr", 0);
  REQUIRE(sx != nullptr);
  CHECK(sx->mean == doctest::Approx(params.sigma_x_sq).epsilon(0.5));
  const auto* mse = report.find("corn", "fit_mse1", 0);
  REQUIRE(mse != nullptr);
  CHECK(mse->mean > 0.0);
  const auto* band = report.find("corn", "u1_inside_own_band", 0);
  REQUIRE(band != nullptr);
  CHECK(band->mean >= 0.95);
  // Wavelength-indexed weight rows back the loading plots.
  CHECK(report.find("corn-weights", "u1", 350) != nullptr);
  CHECK(!read_all(out.path).empty());
}

TEST_CASE("bootstrap results serialize to JSON") {
  const ModelParams params = random_sim1_params(3);
  NoiseSpec noise;
  noise.sigma_x_sq = 0.3;
  noise.sigma_y_sq = 0.3;
  noise.sigma1_sq = params.sigma1_sq;
  auto [data, truth] = simulate_pls(params, 60, noise, 4);
  FitConfig fc;
  fc.H = 2;
  const FitResult fit = fit_pls(data, fc);
  const BootstrapResult boot = residual_bootstrap(fit, 5, 6);
  const std::string text = bootstrap_result_to_json(boot);
  CHECK(text.find("\"B\":5") != std::string::npos);
  CHECK(text.find("replicates") != std::string::npos);

  // Reports also serialize.
  Report report;
  report.seed = 1;
  report.add("x", 10, "none", "m", {1.0, 2.0, 3.0});
  const std::string rj = report.to_json();
  CHECK(rj.find("\"metric\":\"m\"") != std::string::npos);
}

TEST_CASE("interval table CSV has the documented columns") {
  IntervalTable table;
  table.level = 0.9;
  table.rows.push_back({"u", 0, 0, -1.0, 0.0, 1.0});
  TempFile f("intervals.csv");
  interval_table_to_csv(table, f.path);
  const std::string text = read_all(f.path);
  CHECK(text.find("parameter,i,j,lower,point,upper") == 0);
  CHECK(text.find("u,0,0,-1,0,1") != std::string::npos);
}
