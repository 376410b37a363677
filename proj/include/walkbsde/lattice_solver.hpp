#pragma once

#include <Eigen/Dense>
#include <memory>
#include <utility>

#include "walkbsde/distribution.hpp"
#include "walkbsde/problem.hpp"
#include "walkbsde/time_grid.hpp"

namespace walkbsde {

/// Triangular array of the backward-induction values on the recombining
/// lattice rooted at (0, x0): node (k,m) sits at x0 + sqrt(h) (2m-k).
///
/// The stored triangle only reaches positions whose offset from the root has
/// the parity of the layer. Queries anchored at intermediate times can need
/// the complementary parity; those are answered from a second triangle rooted
/// at x0 - sqrt(h), built lazily from the same data. Both triangles are
/// immutable once built, so sharing across threads is safe.
class LatticeSolution {
public:
    const TimeGrid& grid() const { return grid_; }
    double root() const { return root_; }

    /// Node value V[layer][index], index in 0..layer.
    double value(long layer, long index) const;

    /// Value at layer `layer` and position x (any parity reachable from the
    /// root); throws invalid_argument when x is not a lattice point of that
    /// layer.
    double value_at(long layer, double x) const;

    /// Discrete gradient at layer <= n-1: h^{-1/2} D^n_- of the layer above.
    double gradient(long layer, long index) const;
    double gradient_at(long layer, double x) const;

    /// Per-layer max absolute residual of the implicit node equation,
    /// indexed by layer 0..n-1.
    const Eigen::ArrayXd& fixed_point_residuals() const { return residuals_; }

    long memory_nodes() const { return static_cast<long>(main_.size()); }

private:
    friend LatticeSolution solve_backward(const ProblemSpec&, const TimeGrid&, double);

    LatticeSolution(TimeGrid grid, double root, TerminalCondition terminal, Generator generator);

    const Eigen::ArrayXd& shadow() const;

    TimeGrid grid_;
    double root_;
    TerminalCondition terminal_;
    Generator generator_;
    Eigen::ArrayXd main_;
    Eigen::ArrayXd residuals_;

    struct Lazy;
    std::shared_ptr<Lazy> lazy_;
};

/// Backward induction for the implicit finite-difference system. Requires
/// the contraction condition h ||f_y||_Lip <= 1/2 and solves every interior
/// node equation by fixed-point iteration to ~machine accuracy (contract:
/// residual <= 1e-13).
LatticeSolution solve_backward(const ProblemSpec& problem, const TimeGrid& grid, double x0);

/// U^n(t, x) is piecewise constant in time: reads layer floor(t/h).
double u_n(const LatticeSolution& sol, double t, long node_index);

/// Discrete gradient Delta^n(t,.) = h^{-1/2} D^n_- U^n(floor(t)+h, .); t < T.
double delta_n(const LatticeSolution& sol, double t, long node_index);

/// Exact law of U^n(s, x0 + B^n_s - B^n_t), t <= s <= T.
Distribution1D y_law(const LatticeSolution& sol, const TimeGrid& grid, double t, double s);

/// Exact law of Delta^n(s, x0 + B^n_s - B^n_t); s must avoid grid times,
/// where Z^n is a left limit instead (GridPointEvaluationError).
Distribution1D z_law(const LatticeSolution& sol, const TimeGrid& grid, double t, double s);

/// Delta^n(t,x) through the expectation representation
///   E[ g(B^{n,t,x}_T) (B^{n,t,x}_T - x)/(T - t_floor) ]
///   + E[ int f(s_ceil, Theta_s) (B^{n,t,x}_s - x)/(s_floor - t_floor) ds ],
/// reduced to finite sums over the walk marginals. Agrees with delta_n up to
/// the solver tolerance; kept as an independent route for cross-checks.
double delta_n_by_representation(const ProblemSpec& problem, const LatticeSolution& sol,
                                 const TimeGrid& grid, double t, double x);

/// (sup-norm of the value difference, probability-weighted square sum of the
/// gradient difference), the discrete analogue of the a-priori estimate's
/// left-hand side.
std::pair<double, double> solution_distance(const LatticeSolution& a, const LatticeSolution& b);

}  // namespace walkbsde
