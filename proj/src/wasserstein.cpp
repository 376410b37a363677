#include "walkbsde/wasserstein.hpp"

#include <cmath>
#include <stdexcept>

namespace walkbsde {

namespace {

// Weight of atom i, treating a quantile sample as M uniform atoms.
inline double atom_weight(const Distribution1D& d, Eigen::Index i) {
    return d.kind() == Distribution1D::Kind::Finite
               ? d.probs()[i]
               : 1.0 / static_cast<double>(d.size());
}

}  // namespace

double wasserstein_r(const Distribution1D& a, const Distribution1D& b, double r) {
    if (!(r >= 1.0)) throw std::invalid_argument("wasserstein order must be >= 1");
    if (a.size() == 0 || b.size() == 0) throw std::invalid_argument("empty distribution");

    Eigen::Index i = 0;
    Eigen::Index j = 0;
    long double cum_a = atom_weight(a, 0);
    long double cum_b = atom_weight(b, 0);
    long double q_prev = 0.0L;
    long double acc = 0.0L;

    const bool linear = (r == 1.0);
    const bool quadratic = (r == 2.0);

    while (true) {
        long double q = std::min(cum_a, cum_b);
        long double seg = q - q_prev;
        if (seg > 0.0L) {
            double diff = std::abs(a.values()[i] - b.values()[j]);
            double cost;
            if (linear)
                cost = diff;
            else if (quadratic)
                cost = diff * diff;
            else
                cost = std::pow(diff, r);
            acc += seg * static_cast<long double>(cost);
        }
        q_prev = q;
        bool advance_a = cum_a <= cum_b;
        bool advance_b = cum_b <= cum_a;
        if (advance_a) {
            if (++i >= a.size()) break;
            cum_a += atom_weight(a, i);
        }
        if (advance_b) {
            if (++j >= b.size()) break;
            cum_b += atom_weight(b, j);
        }
    }

    double integral = static_cast<double>(acc);
    if (linear) return integral;
    if (quadratic) return std::sqrt(integral);
    return std::pow(integral, 1.0 / r);
}

double w1_dual_lower_bound(const Distribution1D& a, const Distribution1D& b,
                           const std::vector<std::function<double(double)>>& test_fns) {
    double best = 0.0;
    for (const auto& f : test_fns)
        best = std::max(best, std::abs(a.expectation(f) - b.expectation(f)));
    return best;
}

}  // namespace walkbsde
