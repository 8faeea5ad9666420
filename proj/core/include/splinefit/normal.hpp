#pragma once

namespace splinefit {

// Standard normal CDF.
double normal_cdf(double x);

// Inverse standard normal CDF for p in (0, 1). Acklam's rational approximation
// followed by one Halley step; absolute error below 1e-12 over (1e-300, 1 - 1e-16).
double normal_quantile(double p);

}  // namespace splinefit
