#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gflsr/inference.hpp"
#include "gflsr/model.hpp"
#include "gflsr/simulate.hpp"
#include "gflsr/types.hpp"

namespace gflsr {

/// Declarative description of one benchmark run. Missing grids fall back to
/// the per-kind defaults.
struct ExperimentConfig {
  std::string kind;  // sim1 | sim2 | sim3 | sim4 | corn
  std::uint64_t seed = 20240801;
  int reps = 0;   // 0 = kind default
  int B = 0;      // bootstrap replicates where applicable
  Index H = 0;    // 0 = kind default
  std::vector<Index> n_grid;
  std::vector<double> alpha;
  int threads = 0;
  bool include_raw = false;
  std::string out;
  std::string corn_x;
  std::string corn_y;

  static ExperimentConfig from_json(const std::string& text);
  static ExperimentConfig from_json_file(const std::string& path);
  std::string to_json() const;
};

/// Long-format result rows: one row per (cell, metric) with the replicate
/// mean and empirical 2.5/97.5% quantiles. Identical config + seed gives a
/// byte-identical report.
struct Report {
  struct Row {
    std::string config_id;
    Index n = 0;
    std::string noise;
    std::string metric;
    double mean = 0.0;
    double q025 = 0.0;
    double q975 = 0.0;
    int reps = 1;
    bool skew = false;  // mean outside the quantile band
    std::vector<double> raw;
  };

  std::uint64_t seed = 0;
  std::vector<Row> rows;

  const Row* find(const std::string& config_id, const std::string& metric,
                  Index n) const;
  void add(const std::string& config_id, Index n, const std::string& noise,
           const std::string& metric, std::vector<double> values);
  void to_csv(const std::string& path, bool include_raw = false) const;
  std::string to_json(bool include_raw = false) const;
};

/// Random generative parameters used by the first simulation: random
/// orthonormal 10x2 loadings with strongly ordered component strengths.
ModelParams random_sim1_params(std::uint64_t seed, Index p = 10, Index q = 10);

/// Random 20x20x3 parameters with latent variances (5, 3, 2) and slopes
/// (9, 6, 4).
ModelParams sim2_params(std::uint64_t seed);

/// Deterministic 20x20x3 parameters: density-curve loadings, slopes
/// (1.5, 1.11, 0.82) and latent variances (1, 0.9, 0.82).
ModelParams sim3_params();

Report run_sim1(const ExperimentConfig& cfg);
Report run_sim2(const ExperimentConfig& cfg);
Report run_sim3(const ExperimentConfig& cfg);
Report run_sim4(const ExperimentConfig& cfg);
Report run_corn(const ExperimentConfig& cfg);

/// Dispatch on cfg.kind; writes cfg.out when set.
Report run_experiment(const ExperimentConfig& cfg);

}  // namespace gflsr
