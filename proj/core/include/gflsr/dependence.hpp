#pragma once

#include "gflsr/types.hpp"

namespace gflsr {

enum class DependenceMeasure { Covariance, Pearson, Spearman };

const char* to_string(DependenceMeasure m);
DependenceMeasure dependence_from_string(const std::string& s);

/// Fractional ranks in [1, n], average ranks for ties.
Vector fractional_ranks(const Vector& x);

/// Empirical dependence between two n-vectors (n >= 2).
///   Covariance: (1/n) sum (x_i - xbar)(y_i - ybar)
///   Pearson:    covariance normalized by 1/n standard deviations
///   Spearman:   Pearson on fractional ranks
/// Pearson/Spearman throw "zero variance" on a constant input.
double dependence(DependenceMeasure measure, const Vector& x, const Vector& y);

}  // namespace gflsr
