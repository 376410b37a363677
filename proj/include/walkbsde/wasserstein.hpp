#pragma once

#include <functional>
#include <vector>

#include "walkbsde/distribution.hpp"

namespace walkbsde {

/// Exact L^r-Wasserstein distance between two one-dimensional laws through
/// the monotone (quantile) coupling:
///   W_r = ( int_0^1 |F_a^{-1}(q) - F_b^{-1}(q)|^r dq )^{1/r},
/// evaluated by merging the two CDF breakpoint sequences and summing over
/// constant-quantile segments. Quantile samples enter as uniform atoms of
/// weight 1/M.
double wasserstein_r(const Distribution1D& a, const Distribution1D& b, double r);

/// Kantorovich-Rubinstein lower bound: max over the supplied 1-Lipschitz
/// test functions of |E_a f - E_b f| <= W_1(a,b).
double w1_dual_lower_bound(const Distribution1D& a, const Distribution1D& b,
                           const std::vector<std::function<double(double)>>& test_fns);

}  // namespace walkbsde
