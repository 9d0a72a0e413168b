#include "gflsr/canonical.hpp"

#include <cmath>

namespace gflsr {

Index dominant_index(const Vector& v) {
  if (v.size() == 0 || !v.allFinite()) {
    throw ConfigError("degenerate direction: empty or non-finite vector");
  }
  Index best = 0;
  double mag = -1.0;
  for (Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a > mag) {
      mag = a;
      best = i;
    }
  }
  if (mag == 0.0) throw ConfigError("degenerate direction: zero vector");
  return best;
}

bool sign_flip_needed(const Vector& v) { return v[dominant_index(v)] < 0.0; }

Vector canonicalize_sign(const Vector& v) {
  return sign_flip_needed(v) ? Vector(-v) : v;
}

void canonicalize_columns(Matrix& m) {
  for (Index j = 0; j < m.cols(); ++j) {
    if (sign_flip_needed(m.col(j))) m.col(j) = -m.col(j);
  }
}

}  // namespace gflsr
