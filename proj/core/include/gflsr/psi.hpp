#pragma once

#include <vector>

#include "gflsr/types.hpp"

namespace gflsr {

/// Normalized probabilists' Hermite polynomial He_n(x) / sqrt(n!).
/// With x = Phi^{-1}(t) these form an orthonormal family on t in [0, 1].
double hermite_normalized(int n, double x);

/// Latent coupling curve Psi: (0,1) -> R.
struct PsiFamily {
  enum class Kind {
    HermiteNormal,           // He_n(Phi^{-1}(t)) / sqrt(n!)
    InverseNormalCdf,        // Phi^{-1}(t)
    ExpInverseNormalCdf,     // exp(Phi^{-1}(t))
    PolyInverseNormalCdf,    // sum_k coeffs[k] * Phi^{-1}(t)^k
  };

  Kind kind = Kind::InverseNormalCdf;
  int order = 1;                // HermiteNormal order
  std::vector<double> coeffs;   // PolyInverseNormalCdf power-basis coefficients c0..cK

  static PsiFamily hermite(int n) { return {Kind::HermiteNormal, n, {}}; }
  static PsiFamily inverse_normal() { return {Kind::InverseNormalCdf, 1, {}}; }
  static PsiFamily exp_inverse_normal() { return {Kind::ExpInverseNormalCdf, 1, {}}; }
  static PsiFamily poly(std::vector<double> c) {
    return {Kind::PolyInverseNormalCdf, 1, std::move(c)};
  }
};

/// Evaluates the family at t in the open unit interval. t in {0, 1} is a
/// quantile singularity and throws.
double psi_eval(const PsiFamily& family, double t);

}  // namespace gflsr
