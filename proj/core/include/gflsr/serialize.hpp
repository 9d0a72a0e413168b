#pragma once

#include <string>

#include "gflsr/fit.hpp"
#include "gflsr/inference.hpp"
#include "gflsr/model.hpp"
#include "gflsr/simulate.hpp"

namespace gflsr {

// JSON bridges for the CLI. Matrices are serialized row-major with
// round-trip-exact decimals.

std::string model_params_to_json(const ModelParams& params);
ModelParams model_params_from_json(const std::string& text);

std::string fit_result_to_json(const FitResult& fit);
FitResult fit_result_from_json(const std::string& text);

std::string corrected_to_json(const CorrectedEstimates& est);

std::string bootstrap_result_to_json(const BootstrapResult& boot);

std::string interval_table_to_json(const IntervalTable& table);

/// CSV rows: parameter,i,j,lower,point,upper.
void interval_table_to_csv(const IntervalTable& table, const std::string& path);

std::string prediction_intervals_to_json(const PredictionIntervals& pi);

}  // namespace gflsr
