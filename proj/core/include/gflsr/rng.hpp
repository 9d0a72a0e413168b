#pragma once

#include <cstdint>
#include <random>

namespace gflsr {

/// Seeded random stream. All simulators and the bootstrap take an explicit
/// seed; there is no global generator state.
///
/// Continuous draws are derived from uniforms by inverse-CDF transforms, so a
/// given seed produces the same sequence on every platform (only the mt19937-64
/// bit stream and our own quantile code are involved).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform draw strictly inside (0, 1).
  double uniform() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via the inverse CDF.
  double normal();

  /// Exponential with rate 1.
  double exponential();

  /// Gamma(shape, 1) by Marsaglia-Tsang squeeze, shape > 0.
  double gamma(double shape);

  double chi_squared(double dof) { return 2.0 * gamma(0.5 * dof); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
  }

  /// Derive a substream seed. Replicate r of an experiment seeded with s uses
  /// Rng(mix(s, r)), which makes parallel schedules reproducible.
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace gflsr
