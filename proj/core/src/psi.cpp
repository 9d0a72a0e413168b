#include "gflsr/psi.hpp"

#include <cmath>

#include "gflsr/normal.hpp"

namespace gflsr {

double hermite_normalized(int n, double x) {
  if (n < 0 || n > 30) throw ConfigError("hermite_normalized: order out of range");
  if (n == 0) return 1.0;
  // He recurrence with a running sqrt(n!) normalization.
  double prev = 1.0;   // He_0
  double cur = x;      // He_1
  for (int k = 1; k < n; ++k) {
    const double next = x * cur - static_cast<double>(k) * prev;
    prev = cur;
    cur = next;
  }
  double fact = 1.0;
  for (int k = 2; k <= n; ++k) fact *= static_cast<double>(k);
  return cur / std::sqrt(fact);
}

double psi_eval(const PsiFamily& family, double t) {
  if (!(t > 0.0 && t < 1.0)) {
    throw ConfigError("quantile singularity: t must lie strictly inside (0, 1)");
  }
  const double z = normal_quantile(t);
  switch (family.kind) {
    case PsiFamily::Kind::HermiteNormal:
      return hermite_normalized(family.order, z);
    case PsiFamily::Kind::InverseNormalCdf:
      return z;
    case PsiFamily::Kind::ExpInverseNormalCdf:
      return std::exp(z);
    case PsiFamily::Kind::PolyInverseNormalCdf: {
      double acc = 0.0;
      double pw = 1.0;
      for (double c : family.coeffs) {
        acc += c * pw;
        pw *= z;
      }
      return acc;
    }
  }
  throw ConfigError("psi_eval: unknown family");
}

}  // namespace gflsr
