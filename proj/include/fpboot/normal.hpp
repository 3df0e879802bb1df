#pragma once

namespace fpboot {

// Standard normal CDF, erfc-based.
double normal_cdf(double x) noexcept;

// Inverse of normal_cdf on (0, 1); absolute error below 1e-12 after one
// Halley step on top of Acklam's rational approximation.
double normal_quantile(double p);

}  // namespace fpboot
