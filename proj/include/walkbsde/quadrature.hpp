#pragma once

#include <Eigen/Dense>
#include <vector>

namespace walkbsde {

/// Nodes/weights approximating a standard normal expectation:
/// E[f(Z)] ~ sum_i w_i f(z_i).
struct NormalRule {
    Eigen::ArrayXd nodes;
    Eigen::ArrayXd weights;

    template <class F>
    double expect(F&& f) const {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
        return acc;
    }
};

/// Gauss-Hermite rule (probabilists' weight), exact for polynomials of
/// degree 2m-1 under the standard normal. Nodes via the Golub-Welsch
/// tridiagonal eigenproblem.
NormalRule gauss_hermite(int m);

/// Gauss-Legendre nodes/weights on [-1,1].
void gauss_legendre(int m, Eigen::ArrayXd& nodes, Eigen::ArrayXd& weights);

/// Composite Gauss-Legendre rule for E[f(Z)] truncated to [-8,8], with the
/// panel sequence graded geometrically toward each cut point. Cuts are where
/// the integrand loses smoothness (kink preimages of a Holder terminal
/// condition); cuts outside the truncation window are ignored.
///
/// `level` 0 is the base rule; each extra level doubles the panel density,
/// which is what the node-doubling accuracy estimate varies.
NormalRule truncated_normal_rule(const std::vector<double>& cuts, int level = 0);

}  // namespace walkbsde
