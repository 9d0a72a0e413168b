#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace gflsr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Invalid arguments, malformed configuration or data. CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure (non-convergence, rank collapse, degenerate input).
/// CLI maps this to exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Variant { PlsR, PlsSvd };

/// Residual-covariance assumptions for X_H and Y_H.
///   A: zero noise, or the projected form sigma^2 (I - W W^T)
///   B: isotropic sigma^2 I
///   C: general symmetric PSD matrix
enum class NoiseCase { A, B, C };

inline const char* to_string(Variant v) {
  return v == Variant::PlsR ? "pls-r" : "pls-svd";
}

inline const char* to_string(NoiseCase c) {
  switch (c) {
    case NoiseCase::A: return "A";
    case NoiseCase::B: return "B";
    default: return "C";
  }
}

}  // namespace gflsr
