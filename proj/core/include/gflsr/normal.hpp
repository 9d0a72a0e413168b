#pragma once

namespace gflsr {

/// Standard normal density.
double normal_pdf(double x);

/// Standard normal CDF, computed through erfc for tail accuracy.
double normal_cdf(double x);

/// Inverse standard normal CDF on (0, 1).
///
/// Rational approximation (|error| < 1.2e-9) followed by one Halley
/// refinement step against normal_cdf, giving close to full double
/// precision. Throws ConfigError for p outside the open interval.
double normal_quantile(double p);

}  // namespace gflsr
