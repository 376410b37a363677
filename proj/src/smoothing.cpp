#include "walkbsde/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "walkbsde/errors.hpp"

namespace walkbsde {

namespace {

constexpr double kGolden = 0.6180339887498949;

// Golden-section minimization of a unimodal-ish section; callers run it from
// several coarse cells since f need not be unimodal.
template <class F>
double golden_min(F&& fn, double a, double b, double width_tol, int max_iter) {
    double x1 = b - kGolden * (b - a);
    double x2 = a + kGolden * (b - a);
    double f1 = fn(x1);
    double f2 = fn(x2);
    for (int it = 0; it < max_iter && (b - a) > width_tol; ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kGolden * (b - a);
            f1 = fn(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kGolden * (b - a);
            f2 = fn(x2);
        }
    }
    return std::min(f1, f2);
}

}  // namespace

double smoothing_bound_constant(double eps, double norm_x) {
    if (eps >= 1.0) return 0.0;
    return std::pow(eps * norm_x, eps / (1.0 - eps)) * norm_x * (1.0 - eps);
}

Generator inf_convolve(const Generator& f, const SmoothingParams& params) {
    if (!(params.eta > 0.0)) throw std::invalid_argument("eta must be positive");
    if (params.coarse_grid_points < 17)
        throw std::invalid_argument("coarse grid needs at least 17 points");
    if (!(params.search_radius_factor >= 1.0))
        throw std::invalid_argument("search radius factor must be >= 1");

    if (f.eps >= 1.0) {
        if (params.eta >= f.norm_x) return f;  // penalty dominates, inf at p = x
        throw DegenerateSmoothingError(
            "eta below the Lipschitz norm of an eps = 1 generator");
    }
    if (f.norm_x == 0.0) return f;  // constant in x

    // Any minimizer p satisfies eta |x-p| <= f(x) - f(p) <= ||f_x|| |x-p|^eps,
    // so |x-p| <= (||f_x||/eta)^{1/(1-eps)}.
    const double eta = params.eta;
    const double radius = params.search_radius_factor *
                          std::pow(f.norm_x / eta, 1.0 / (1.0 - f.eps));
    const int coarse = params.coarse_grid_points;
    const int refine_iters = params.refine_iterations;
    auto base = f.eval;

    Generator smoothed = f;
    smoothed.eps = 1.0;
    smoothed.norm_x = eta;
    smoothed.k_f = f.k_f + smoothing_bound_constant(f.eps, f.norm_x) *
                               std::pow(eta, -f.eps / (1.0 - f.eps));
    smoothed.is_zero = false;
    const double eps = f.eps;
    const double norm_x = f.norm_x;
    smoothed.eval = [base, eta, radius, coarse, refine_iters, eps,
                     norm_x](double t, double x, double y, double z) {
        auto section = [&](double p) { return base(t, p, y, z) + eta * std::abs(x - p); };

        const double lo = x - radius;
        const double step = 2.0 * radius / (coarse - 1);
        double best = section(x);  // p = x is always admissible
        std::vector<double> vals(coarse);
        for (int i = 0; i < coarse; ++i) {
            vals[i] = section(lo + i * step);
            best = std::min(best, vals[i]);
        }

        // Within a cell the section can undercut its endpoint samples by at
        // most the Holder modulus over a half cell plus the penalty slope, so
        // cells outside that slack cannot contain the minimizer. Holder
        // sections dip in narrow cusps, which sampled ranking alone misses.
        const double slack =
            norm_x * std::pow(0.5 * step, eps) + 0.5 * eta * step + 1e-12;
        const double width_tol = 1e-16 * std::max(1.0, radius);
        std::vector<int> order(coarse);
        for (int i = 0; i < coarse; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](int a, int b) { return vals[a] < vals[b]; });
        int refined = 0;
        for (int c = 0; c < coarse; ++c) {
            int i = order[c];
            if (refined >= 3 && vals[i] > best + slack) break;
            double a = lo + std::max(0, i - 1) * step;
            double b = lo + std::min(coarse - 1, i + 1) * step;
            best = std::min(best, golden_min(section, a, b, width_tol, refine_iters));
            ++refined;
        }
        return best;
    };
    return smoothed;
}

double smoothing_gap(const Generator& f, const Generator& f_eta, double lo, double hi,
                     int count, double t, double y, double z) {
    if (count < 2) throw std::invalid_argument("gap grid needs at least 2 points");
    double gap = 0.0;
    for (int i = 0; i < count; ++i) {
        double x = lo + (hi - lo) * i / (count - 1);
        double d = f.eval(t, x, y, z) - f_eta.eval(t, x, y, z);
        if (d < -1e-10)
            throw std::logic_error("smoothed generator exceeds the original at x = " +
                                   std::to_string(x));
        gap = std::max(gap, d);
    }
    double bound = smoothing_bound_constant(f.eps, f.norm_x) *
                   std::pow(f_eta.norm_x, -f.eps / (1.0 - f.eps));
    if (f.eps < 1.0 && gap > bound + 1e-9)
        throw std::runtime_error("smoothing gap " + std::to_string(gap) +
                                 " exceeds the uniform bound " + std::to_string(bound));
    return gap;
}

}  // namespace walkbsde
