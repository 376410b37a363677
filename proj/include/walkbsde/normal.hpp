#pragma once

namespace walkbsde {

/// Standard normal density.
double normal_pdf(double x);

/// Standard normal CDF, evaluated through erfc so the tails keep full
/// relative accuracy.
double normal_cdf(double x);

/// Inverse standard normal CDF on (0,1). Rational initial guess polished
/// by one Halley step; relative accuracy ~1e-15 on (1e-300, 1-1e-16).
double inverse_normal_cdf(double p);

}  // namespace walkbsde
