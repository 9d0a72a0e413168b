#include "gflsr/dependence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace gflsr {

const char* to_string(DependenceMeasure m) {
  switch (m) {
    case DependenceMeasure::Covariance: return "covariance";
    case DependenceMeasure::Pearson: return "pearson";
    default: return "spearman";
  }
}

DependenceMeasure dependence_from_string(const std::string& s) {
  if (s == "covariance") return DependenceMeasure::Covariance;
  if (s == "pearson") return DependenceMeasure::Pearson;
  if (s == "spearman") return DependenceMeasure::Spearman;
  throw ConfigError("unknown dependence measure: " + s);
}

Vector fractional_ranks(const Vector& x) {
  const Index n = x.size();
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::sort(idx.begin(), idx.end(),
            [&](Index a, Index b) { return x[a] < x[b]; });

  Vector ranks(n);
  Index i = 0;
  while (i < n) {
    Index j = i;
    while (j + 1 < n && x[idx[static_cast<std::size_t>(j + 1)]] ==
                            x[idx[static_cast<std::size_t>(i)]]) {
      ++j;
    }
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (Index k = i; k <= j; ++k) ranks[idx[static_cast<std::size_t>(k)]] = avg;
    i = j + 1;
  }
  return ranks;
}

namespace {

double pearson(const Vector& x, const Vector& y) {
  const double n = static_cast<double>(x.size());
  const Vector xc = x.array() - x.mean();
  const Vector yc = y.array() - y.mean();
  const double vx = xc.squaredNorm() / n;
  const double vy = yc.squaredNorm() / n;
  if (vx == 0.0 || vy == 0.0) {
    throw ConfigError("zero variance: constant input to a correlation measure");
  }
  return xc.dot(yc) / n / std::sqrt(vx * vy);
}

}  // namespace

double dependence(DependenceMeasure measure, const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw ConfigError("dependence: length mismatch");
  if (x.size() < 2) throw ConfigError("dependence: need at least two samples");
  if (!x.allFinite() || !y.allFinite()) {
    throw ConfigError("dependence: non-finite entries");
  }
  switch (measure) {
    case DependenceMeasure::Covariance: {
      const double n = static_cast<double>(x.size());
      return (x.array() - x.mean()).matrix().dot((y.array() - y.mean()).matrix()) / n;
    }
    case DependenceMeasure::Pearson:
      return pearson(x, y);
    case DependenceMeasure::Spearman:
      return pearson(fractional_ranks(x), fractional_ranks(y));
  }
  throw ConfigError("dependence: unknown measure");
}

}  // namespace gflsr
