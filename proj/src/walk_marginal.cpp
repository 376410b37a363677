#include "walkbsde/walk_marginal.hpp"

#include <cmath>
#include <stdexcept>

namespace walkbsde {

Eigen::ArrayXd binomial_weights(long k) {
    if (k < 0) throw std::invalid_argument("negative step count");
    Eigen::ArrayXd logp(k + 1);
    const double log_half = -std::log(2.0);
    logp[0] = static_cast<double>(k) * log_half;
    for (long m = 0; m + 1 <= k; ++m)
        logp[m + 1] = logp[m] + std::log(static_cast<double>(k - m)) -
                      std::log(static_cast<double>(m + 1));
    // Symmetrize: C(k,m) = C(k,k-m), so average the two recurrence passes
    // to keep the weights exactly mirror-symmetric. Scalar std::exp: the
    // vectorized path rounds subnormal tails differently per lane.
    for (long m = 0; 2 * m < k; ++m) {
        double avg = 0.5 * (logp[m] + logp[k - m]);
        logp[m] = avg;
        logp[k - m] = avg;
    }
    Eigen::ArrayXd weights(k + 1);
    long double total = 0.0L;
    for (long m = 0; m <= k; ++m) {
        weights[m] = std::exp(logp[m]);
        total += weights[m];
    }
    // Exp rounding leaves the mass ~1e-11 off at k ~ 4096; rescale so
    // downstream laws stay normalized. Mirror symmetry survives the common
    // factor.
    const double scale = static_cast<double>(1.0L / total);
    for (long m = 0; m <= k; ++m) weights[m] *= scale;
    return weights;
}

WalkMarginal walk_marginal(const TimeGrid& grid, double t, double s) {
    if (t > s) throw std::invalid_argument("walk marginal needs t <= s");
    const long k = grid.floor_index(s) - grid.floor_index(t);
    const double root_h = grid.sqrt_step();

    WalkMarginal law;
    law.steps = k;
    law.support.resize(k + 1);
    for (long m = 0; m <= k; ++m)
        law.support[m] = root_h * static_cast<double>(2 * m - k);
    law.probs = binomial_weights(k);
    return law;
}

}  // namespace walkbsde
