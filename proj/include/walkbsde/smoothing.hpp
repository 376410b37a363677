#pragma once

#include "walkbsde/problem.hpp"

namespace walkbsde {

struct SmoothingParams {
    double eta = 1.0;                 // target Lipschitz level
    double search_radius_factor = 2.0;
    int coarse_grid_points = 33;
    int refine_iterations = 96;
};

/// Infimal convolution f^eta(t,x,y,z) = inf_p { f(t,p,y,z) + eta |x-p| }.
/// The inf localizes to |p-x| <= (||f_x||_eps / eta)^{1/(1-eps)}, which the
/// search radius scales by a safety factor; minimization is a coarse grid
/// followed by golden-section refinement of the best cells. The result is an
/// eta-Lipschitz-in-x minorant of f within c(||f_x||_eps) eta^{-eps/(1-eps)}.
///
/// For eps = 1 the generator is already Lipschitz: returned unchanged when
/// eta >= ||f_x||_1, DegenerateSmoothingError otherwise.
Generator inf_convolve(const Generator& f, const SmoothingParams& params);

/// c(t) = (eps t)^{eps/(1-eps)} t (1-eps): the constant in the uniform bound
/// sup (f - f^eta) <= c(||f_x||_eps) eta^{-eps/(1-eps)}.
double smoothing_bound_constant(double eps, double norm_x);

/// Max of f - f^eta over a uniform x-grid at fixed (t,y,z). Throws logic_error
/// when the gap dips below -1e-10 (f^eta must minorize f) and runtime_error
/// when it exceeds the uniform bound by more than 1e-9.
double smoothing_gap(const Generator& f, const Generator& f_eta, double lo, double hi,
                     int count, double t = 0.0, double y = 0.0, double z = 0.0);

}  // namespace walkbsde
