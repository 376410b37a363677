#pragma once

#include "walkbsde/continuous_solution.hpp"
#include "walkbsde/problem.hpp"

namespace walkbsde {

/// Oracle for the zero-generator case:
///   u(t,x)      = E[ g(x + sqrt(T-t) Z) ],
///   grad u(t,x) = E[ g(x + sqrt(T-t) Z) Z ] / sqrt(T-t).
/// Smooth g uses a Gauss-Hermite rule of the requested order; g with declared
/// kinks switches to the truncated rule graded at the kink preimages.
/// Accuracy is recorded by node-doubling at fixed probe points.
ContinuousSolution heat_solution(const TerminalCondition& g, double horizon,
                                 int quad_nodes = 200);

struct MeshSpec {
    double lo = -6.0;
    double hi = 6.0;
    int count = 65;
};

/// Fixed-point iteration of the representation formulas
///   u      <- E[g] + int_t^T E[ f(r, X_r, u, grad u) ] dr,
///   grad u <- E[g Z]/sqrt(T-t) + int_t^T E[ f(r, X_r, u, grad u) Z ]/sqrt(r-t) dr,
/// tabulated on a (time levels) x (space grid) table with the singular time
/// kernels integrated on a mesh graded toward both endpoints. Stops when the
/// successive sup-difference on the table falls below tol; non-convergence
/// raises OracleAccuracyError carrying the last residual.
ContinuousSolution picard_solution(const ProblemSpec& problem, int time_levels,
                                   const MeshSpec& space_grid, int max_iter, double tol);

/// High-resolution lattice solve used as an oracle of last resort; accuracy
/// estimated by Richardson comparison of n_ref against n_ref/2.
ContinuousSolution self_refined(const ProblemSpec& problem, long n_ref);

}  // namespace walkbsde
