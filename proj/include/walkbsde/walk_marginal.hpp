#pragma once

#include <Eigen/Dense>

#include "walkbsde/time_grid.hpp"

namespace walkbsde {

/// Exact law of a scaled-random-walk increment B^n_s - B^n_t: k symmetric
/// Bernoulli steps of size sqrt(h), so support sqrt(h)*(2m-k) with binomial
/// weights C(k,m) 2^{-k}, m = 0..k.
struct WalkMarginal {
    Eigen::ArrayXd support;  // sorted ascending
    Eigen::ArrayXd probs;
    long steps = 0;

    double mean() const { return (support * probs).sum(); }
    double variance() const { return (support.square() * probs).sum() - mean() * mean(); }
};

/// Binomial weights C(k,m) 2^{-k} for m = 0..k. Evaluated through the
/// log-domain recurrence log p_{m+1} = log p_m + log(k-m) - log(m+1);
/// factorial products overflow past k ~ 170, the recurrence does not.
Eigen::ArrayXd binomial_weights(long k);

/// Law of B^n_s - B^n_t on the grid; the step count is n_s - n_t, zero when
/// both times fall in the same mesh cell.
WalkMarginal walk_marginal(const TimeGrid& grid, double t, double s);

}  // namespace walkbsde
