#pragma once

#include <Eigen/Dense>
#include <functional>

#include "walkbsde/walk_marginal.hpp"

namespace walkbsde {

/// One-dimensional law, either an exact finite-support measure or an
/// M-point quantile sample v_i = F^{-1}((i-1/2)/M) of a continuous law.
class Distribution1D {
public:
    enum class Kind { Finite, QuantileSampled };

    static Distribution1D finite(Eigen::ArrayXd points, Eigen::ArrayXd probs);
    static Distribution1D point_mass(double value);
    static Distribution1D quantile_sampled(Eigen::ArrayXd values);
    static Distribution1D from_marginal(const WalkMarginal& law, double shift = 0.0);

    Kind kind() const { return kind_; }
    const Eigen::ArrayXd& values() const { return values_; }
    /// Finite variant only.
    const Eigen::ArrayXd& probs() const { return probs_; }
    Eigen::Index size() const { return values_.size(); }

    double mean() const;
    double expectation(const std::function<double(double)>& f) const;

private:
    Distribution1D(Kind kind, Eigen::ArrayXd values, Eigen::ArrayXd probs)
        : kind_(kind), values_(std::move(values)), probs_(std::move(probs)) {}

    Kind kind_;
    Eigen::ArrayXd values_;
    Eigen::ArrayXd probs_;
};

/// Quantile sample of N(mean, variance); the degenerate variance-0 law is a
/// repeated point. Symmetry of the sample around the mean is exact by
/// construction (lower half mirrored).
Distribution1D gaussian_quantiles(double mean, double variance, Eigen::Index count);

/// Image law under a pointwise map. Finite supports are re-sorted and atoms
/// closer than 1e-12 merged; quantile samples are re-sorted, which preserves
/// the law.
Distribution1D pushforward(const Distribution1D& d, const std::function<double(double)>& map);

}  // namespace walkbsde
