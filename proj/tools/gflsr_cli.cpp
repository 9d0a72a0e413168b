#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gflsr/csv.hpp"
#include "gflsr/experiments.hpp"
#include "gflsr/fit.hpp"
#include "gflsr/inference.hpp"
#include "gflsr/random_matrix.hpp"
#include "gflsr/serialize.hpp"
#include "gflsr/simulate.hpp"

namespace {

using namespace gflsr;
using nlohmann::json;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << text;
}

NoiseSpec noise_from_json(const json& j) {
  NoiseSpec noise;
  const std::string kind = j.value("case", "B");
  if (kind == "A") noise.kind = NoiseCase::A;
  else if (kind == "B") noise.kind = NoiseCase::B;
  else if (kind == "C") noise.kind = NoiseCase::C;
  else throw ConfigError("noise.case must be A, B or C");
  noise.sigma_x_sq = j.value("sigma_x_sq", 0.0);
  noise.sigma_y_sq = j.value("sigma_y_sq", 0.0);
  noise.sigma1_sq = j.value("sigma1_sq", 0.0);
  if (j.value("latent", "normal") == "exponential") {
    noise.latent = NoiseSpec::LatentDist::ExponentialCenteredRate1;
  }
  noise.shared_u = j.value("shared_u", false);
  noise.exact_latent_moments = j.value("exact_latent_moments", true);
  if (j.contains("inverse_wishart")) {
    const auto& iw = j["inverse_wishart"];
    const double scale = iw.value("scale_sigma_sq", 1.0);
    const std::uint64_t seed = iw.value("seed", 7u);
    const Index p = iw.at("p").get<Index>();
    const Index q = iw.at("q").get<Index>();
    noise.kind = NoiseCase::C;
    Rng rng(seed);
    noise.Sigma_X = sample_inverse_wishart(scale * Matrix::Identity(p, p),
                                           static_cast<int>(p) + 1, rng);
    noise.Sigma_Y = sample_inverse_wishart(scale * Matrix::Identity(q, q),
                                           static_cast<int>(q) + 1, rng);
  }
  return noise;
}

int run_simulate(const std::string& config_path, std::uint64_t seed_override,
                 bool has_seed, const std::string& out_override) {
  const json j = json::parse(slurp(config_path));
  const std::uint64_t seed = has_seed ? seed_override : j.value("seed", 1u);
  const Index n = j.at("n").get<Index>();
  std::string out = !out_override.empty() ? out_override
                                          : j.value("out", std::string("dataset.csv"));

  Dataset data;
  GroundTruth truth;
  if (j.contains("scenario")) {
    GflsrScenario scenario = GflsrScenario::from_string(j.at("scenario").get<std::string>());
    scenario.noise_scale = j.value("noise_scale", 1.0);
    std::tie(data, truth) = simulate_gflsr(scenario, n, seed);
  } else {
    ModelParams params;
    if (j.contains("params_file")) {
      params = model_params_from_json(slurp(j.at("params_file").get<std::string>()));
    } else if (j.contains("params")) {
      params = model_params_from_json(j.at("params").dump());
    } else {
      throw ConfigError("simulate: provide 'scenario', 'params' or 'params_file'");
    }
    NoiseSpec noise = j.contains("noise") ? noise_from_json(j["noise"])
                                          : NoiseSpec::from_params(params);
    const Variant variant = j.value("variant", "pls-r") == std::string("pls-svd")
                                ? Variant::PlsSvd
                                : Variant::PlsR;
    std::tie(data, truth) = simulate_pls(params, n, noise, seed, variant);
  }

  save_dataset_csv(out, data);
  if (j.value("save_truth", false)) {
    std::vector<std::string> xi_header;
    for (Index h = 0; h < truth.xi.cols(); ++h) {
      xi_header.push_back("xi" + std::to_string(h + 1));
    }
    save_csv_table(out + ".xi.csv", xi_header, truth.xi);
  }
  std::cout << "wrote " << out << " (" << data.n() << " x " << data.p() << "+"
            << data.q() << ")\n";
  return 0;
}

int run_fit(const std::string& data_path, Index p, Index H, const std::string& variant,
            const std::string& out) {
  const Dataset data = p > 0 ? load_dataset_csv(data_path, p) : load_dataset_csv(data_path);
  FitConfig cfg;
  cfg.H = H;
  cfg.variant = variant == "pls-svd" ? Variant::PlsSvd : Variant::PlsR;
  const FitResult fit = fit_pls(data, cfg);
  spit(out, fit_result_to_json(fit));
  std::cout << "wrote " << out << " (H=" << fit.H() << ", " << to_string(fit.variant)
            << ")\n";
  return 0;
}

int run_predict(const std::string& fit_path, const std::string& data_path,
                const std::string& out) {
  const FitResult fit = fit_result_from_json(slurp(fit_path));
  const CsvTable table = load_csv_table(data_path);
  Matrix x = table.values;
  if (x.cols() > fit.p()) x = x.leftCols(fit.p());  // tolerate trailing y columns
  const Matrix y = predict(fit, x);
  std::vector<std::string> header;
  for (Index j = 0; j < y.cols(); ++j) header.push_back("y" + std::to_string(j + 1));
  save_csv_table(out, header, y);
  std::cout << "wrote " << out << " (" << y.rows() << " x " << y.cols() << ")\n";
  return 0;
}

int run_bootstrap(const std::string& data_path, Index p, Index H,
                  const std::string& variant, int B, std::uint64_t seed, double level,
                  int threads, const std::string& out) {
  const Dataset data = p > 0 ? load_dataset_csv(data_path, p) : load_dataset_csv(data_path);
  FitConfig cfg;
  cfg.H = H;
  cfg.variant = variant == "pls-svd" ? Variant::PlsSvd : Variant::PlsR;
  const FitResult fit = fit_pls(data, cfg);
  const BootstrapResult boot = residual_bootstrap(fit, B, seed, threads);
  const IntervalTable table = intervals(boot, level);
  interval_table_to_csv(table, out);
  std::cout << "wrote " << out << " (B=" << boot.B << ", failed=" << boot.failed
            << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generative latent-structure regression toolkit"};
  app.require_subcommand(1);

  std::string config_path, data_path, fit_path, out, variant = "pls-r";
  std::uint64_t seed = 0;
  bool has_seed = false;
  Index p = 0, H = 1;
  int B = 100, reps = 0, threads = 0;
  double level = 0.95;

  auto* sim = app.add_subcommand("simulate", "Generate a dataset from a config");
  sim->add_option("--config", config_path, "JSON config")->required();
  sim->add_option("--seed", seed)->each([&](const std::string&) { has_seed = true; });
  sim->add_option("--out", out, "output CSV override");

  auto* fit_cmd = app.add_subcommand("fit", "Fit a PLS model to a CSV dataset");
  fit_cmd->add_option("--data", data_path, "dataset CSV (x1..xp,y1..yq header)")->required();
  fit_cmd->add_option("--p", p, "predictor count for plain numeric CSVs");
  fit_cmd->add_option("--H", H, "components")->required();
  fit_cmd->add_option("--variant", variant)->check(CLI::IsMember({"pls-r", "pls-svd"}));
  fit_cmd->add_option("--out", out, "fit JSON path")->required();

  auto* pred = app.add_subcommand("predict", "Predict responses for new rows");
  pred->add_option("--fit", fit_path, "fit JSON")->required();
  pred->add_option("--data", data_path, "CSV with predictor columns")->required();
  pred->add_option("--out", out, "prediction CSV")->required();

  auto* boot_cmd = app.add_subcommand("bootstrap", "Residual bootstrap intervals");
  boot_cmd->add_option("--data", data_path)->required();
  boot_cmd->add_option("--p", p);
  boot_cmd->add_option("--H", H)->required();
  boot_cmd->add_option("--variant", variant)->check(CLI::IsMember({"pls-r", "pls-svd"}));
  boot_cmd->add_option("--B", B, "replicates");
  boot_cmd->add_option("--seed", seed);
  boot_cmd->add_option("--level", level, "interval level");
  boot_cmd->add_option("--threads", threads);
  boot_cmd->add_option("--out", out, "interval CSV")->required();

  auto* bench = app.add_subcommand("bench", "Run a scripted benchmark study");
  std::string which;
  bench->add_option("study", which, "sim1|sim2|sim3|sim4")->required();
  bench->add_option("--config", config_path, "JSON config (optional)");
  bench->add_option("--seed", seed)->each([&](const std::string&) { has_seed = true; });
  bench->add_option("--reps", reps);
  bench->add_option("--threads", threads);
  bench->add_option("--out", out, "report CSV");

  auto* corn = app.add_subcommand("corn", "NIR corn pipeline");
  std::string corn_x, corn_y;
  corn->add_option("--x", corn_x, "spectra CSV (80x700)")->required();
  corn->add_option("--y", corn_y, "property CSV (80x4)")->required();
  corn->add_option("--H", H);
  corn->add_option("--B", B, "bootstrap replicates (0 disables)");
  corn->add_option("--seed", seed)->each([&](const std::string&) { has_seed = true; });
  corn->add_option("--threads", threads);
  corn->add_option("--out", out, "report CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) return run_simulate(config_path, seed, has_seed, out);
    if (fit_cmd->parsed()) return run_fit(data_path, p, H, variant, out);
    if (pred->parsed()) return run_predict(fit_path, data_path, out);
    if (boot_cmd->parsed()) {
      return run_bootstrap(data_path, p, H, variant, B, seed, level, threads, out);
    }
    if (bench->parsed()) {
      ExperimentConfig cfg = config_path.empty()
                                 ? ExperimentConfig{}
                                 : ExperimentConfig::from_json_file(config_path);
      cfg.kind = which;
      if (has_seed) cfg.seed = seed;
      if (reps > 0) cfg.reps = reps;
      if (threads > 0) cfg.threads = threads;
      if (!out.empty()) cfg.out = out;
      if (cfg.out.empty()) cfg.out = which + "_report.csv";
      run_experiment(cfg);
      std::cout << "wrote " << cfg.out << "\n";
      return 0;
    }
    if (corn->parsed()) {
      ExperimentConfig cfg;
      cfg.kind = "corn";
      cfg.corn_x = corn_x;
      cfg.corn_y = corn_y;
      cfg.H = H;
      cfg.B = B;
      if (has_seed) cfg.seed = seed;
      if (threads > 0) cfg.threads = threads;
      cfg.out = out.empty() ? "corn_report.csv" : out;
      run_corn(cfg);
      std::cout << "wrote " << cfg.out << "\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
