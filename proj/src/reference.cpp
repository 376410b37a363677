#include "walkbsde/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <vector>

#include "walkbsde/errors.hpp"
#include "walkbsde/lattice_solver.hpp"
#include "walkbsde/quadrature.hpp"

namespace walkbsde {

namespace {

// Expectation core shared by u and grad u. Level selects the node-doubling
// refinement of the kink-graded rule.
struct HeatKernel {
    TerminalCondition g;
    double horizon;
    int nodes;
    int level;
    std::shared_ptr<NormalRule> hermite;  // smooth path only

    double expect(double t, double x, bool weighted, int extra_level) const {
        if (t > horizon) throw std::invalid_argument("time beyond the horizon");
        double sigma = std::sqrt(horizon - t);
        if (sigma == 0.0) {
            if (weighted) throw std::invalid_argument("gradient undefined at the horizon");
            return g.eval(x);
        }
        auto body = [&](const NormalRule& rule) {
            double acc = 0.0;
            for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
                double z = rule.nodes[i];
                double v = g.eval(x + sigma * z);
                acc += rule.weights[i] * (weighted ? v * z : v);
            }
            return weighted ? acc / sigma : acc;
        };
        if (g.kinks.empty()) return body(*hermite);
        std::vector<double> cuts;
        cuts.reserve(g.kinks.size());
        for (double kappa : g.kinks) cuts.push_back((kappa - x) / sigma);
        return body(truncated_normal_rule(cuts, level + extra_level));
    }
};

}  // namespace

ContinuousSolution heat_solution(const TerminalCondition& g, double horizon, int quad_nodes) {
    if (quad_nodes < 32) throw std::invalid_argument("heat oracle needs quad_nodes >= 32");
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");

    auto kernel = std::make_shared<HeatKernel>();
    kernel->g = g;
    kernel->horizon = horizon;
    kernel->nodes = quad_nodes;
    kernel->level = std::max(0, static_cast<int>(std::lround(std::log2(quad_nodes / 200.0))));
    kernel->hermite = std::make_shared<NormalRule>(gauss_hermite(quad_nodes));
    auto refined = std::make_shared<HeatKernel>(*kernel);
    refined->hermite = std::make_shared<NormalRule>(gauss_hermite(2 * quad_nodes));

    ContinuousSolution sol;
    sol.method = ContinuousSolution::Method::HeatQuadrature;
    sol.u = [kernel](double t, double x) { return kernel->expect(t, x, false, 0); };
    sol.grad_u = [kernel](double t, double x) { return kernel->expect(t, x, true, 0); };

    // Node-doubling accuracy estimate over fixed probes, including points
    // next to a kink and times close to the horizon.
    std::vector<double> xs = {-2.0, -1.0, -0.5, 0.0, 1e-3, 0.5, 1.0, 2.0};
    std::vector<double> ts;
    for (double frac : {0.0, 0.5, 0.75, 0.9375, 63.0 / 64.0}) ts.push_back(horizon * frac);
    double worst = 0.0;
    for (double t : ts)
        for (double x : xs) {
            worst = std::max(worst, std::abs(kernel->expect(t, x, false, 0) -
                                             refined->expect(t, x, false, 1)));
            worst = std::max(worst, std::abs(kernel->expect(t, x, true, 0) -
                                             refined->expect(t, x, true, 1)));
        }
    sol.accuracy = worst;
    return sol;
}

namespace {

// Table of u / grad u on time levels x space grid with linear interpolation;
// levels are clustered toward the horizon, ends clamp.
struct Table {
    std::vector<double> times;
    Eigen::ArrayXd xs;
    Eigen::MatrixXd u;      // levels x space
    Eigen::MatrixXd grad;   // levels x space (last row clamped copy)

    double interp(const Eigen::MatrixXd& field, double t, double x) const {
        const auto hi_it = std::upper_bound(times.begin(), times.end(), t);
        long hi = std::clamp<long>(hi_it - times.begin(), 1, static_cast<long>(times.size()) - 1);
        long lo = hi - 1;
        double wt = (t - times[lo]) / (times[hi] - times[lo]);
        wt = std::clamp(wt, 0.0, 1.0);

        double step = xs[1] - xs[0];
        double pos = (x - xs[0]) / step;
        long j = std::clamp<long>(static_cast<long>(std::floor(pos)), 0, xs.size() - 2);
        double wx = std::clamp(pos - static_cast<double>(j), 0.0, 1.0);

        double lo_val = (1.0 - wx) * field(lo, j) + wx * field(lo, j + 1);
        double hi_val = (1.0 - wx) * field(hi, j) + wx * field(hi, j + 1);
        return (1.0 - wt) * lo_val + wt * hi_val;
    }
};

// Time mesh on [a,b] graded geometrically toward both endpoints (the kernels
// are integrable but singular there) with the interior capped at (b-a)/16.
// Integration uses 3-point Gauss-Legendre per cell, so no endpoint is ever
// evaluated.
void graded_edges(double a, double b, std::vector<double>& edges) {
    edges.clear();
    if (!(b > a)) return;
    const double span = b - a;
    const double cap = span / 16.0;
    edges.push_back(a);
    for (int j = 26; j >= 4; --j) {
        edges.push_back(a + span * std::ldexp(1.0, -j));
        edges.push_back(b - span * std::ldexp(1.0, -j));
    }
    for (int i = 1; i < 16; ++i) edges.push_back(a + cap * i);
    edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
}

struct TimeRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit TimeRule(double a, double b) {
        static const double gl_nodes[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
        static const double gl_weights[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
        std::vector<double> edges;
        graded_edges(a, b, edges);
        for (size_t i = 0; i + 1 < edges.size(); ++i) {
            double mid = 0.5 * (edges[i] + edges[i + 1]);
            double half = 0.5 * (edges[i + 1] - edges[i]);
            for (int q = 0; q < 3; ++q) {
                nodes.push_back(mid + half * gl_nodes[q]);
                weights.push_back(half * gl_weights[q]);
            }
        }
    }
};

}  // namespace

ContinuousSolution picard_solution(const ProblemSpec& problem, int time_levels,
                                   const MeshSpec& space_grid, int max_iter, double tol) {
    if (time_levels < 64) throw std::invalid_argument("picard oracle needs time_levels >= 64");
    if (space_grid.count < 2 || !(space_grid.hi > space_grid.lo))
        throw std::invalid_argument("bad space grid");
    if (!std::isfinite(problem.generator.norm_y) || !std::isfinite(problem.generator.norm_z))
        throw std::invalid_argument("picard oracle needs finite Lipschitz moduli");

    const double T = problem.horizon;
    const auto& f = problem.generator;

    auto table = std::make_shared<Table>();
    table->times.resize(time_levels + 1);
    for (int i = 0; i <= time_levels; ++i) {
        double frac = static_cast<double>(time_levels - i) / time_levels;
        table->times[i] = T * (1.0 - frac * frac);  // clustered toward T
    }
    table->xs = Eigen::ArrayXd::LinSpaced(space_grid.count, space_grid.lo, space_grid.hi);

    // Zero-generator part of both representations, fixed across iterations.
    ContinuousSolution heat = heat_solution(problem.terminal, T, 200);
    const long levels = time_levels + 1;
    const long nx = space_grid.count;
    Eigen::MatrixXd heat_u(levels, nx), heat_grad(levels, nx);
    for (long i = 0; i < levels; ++i)
        for (long j = 0; j < nx; ++j) {
            double t = table->times[i];
            heat_u(i, j) = heat.u(t, table->xs[j]);
            heat_grad(i, j) = t < T ? heat.grad_u(t, table->xs[j]) : 0.0;
        }

    table->u = heat_u;
    table->grad = heat_grad;

    const NormalRule rule = gauss_hermite(32);

    // Source terms of both representations through the current tables.
    auto update_at = [&](double t, double x, double& out_u, double& out_grad) {
        out_u = 0.0;
        out_grad = 0.0;
        if (f.is_zero || !(t < T)) return;
        TimeRule cells(t, T);
        for (size_t c = 0; c < cells.nodes.size(); ++c) {
            double r = cells.nodes[c];
            double width = cells.weights[c];
            double sig = std::sqrt(r - t);
            double eu = 0.0, eg = 0.0;
            for (Eigen::Index q = 0; q < rule.nodes.size(); ++q) {
                double z = rule.nodes[q];
                double pos = x + sig * z;
                double fv = f.eval(r, pos, table->interp(table->u, r, pos),
                                   table->interp(table->grad, r, pos));
                eu += rule.weights[q] * fv;
                eg += rule.weights[q] * fv * z;
            }
            out_u += width * eu;
            if (sig > 0.0) out_grad += width * eg / sig;
        }
    };

    double residual = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < max_iter; ++iter) {
        if (f.is_zero) {  // first iterate is already the fixed point
            residual = 0.0;
            break;
        }
        Eigen::MatrixXd next_u = heat_u;
        Eigen::MatrixXd next_grad = heat_grad;
        for (long i = 0; i < levels; ++i)
            for (long j = 0; j < nx; ++j) {
                double du, dg;
                update_at(table->times[i], table->xs[j], du, dg);
                next_u(i, j) += du;
                next_grad(i, j) += dg;
            }
        // horizon row of grad clamps to the last interior level
        next_grad.row(levels - 1) = next_grad.row(levels - 2);

        residual = (next_u - table->u).cwiseAbs().maxCoeff() +
                   (next_grad - table->grad).cwiseAbs().maxCoeff();
        table->u.swap(next_u);
        table->grad.swap(next_grad);
        if (residual < tol) break;
    }
    if (!(residual < tol) && !f.is_zero)
        throw OracleAccuracyError("picard iteration did not reach tolerance", residual);

    // Discretization probe: the converged table should reproduce its own
    // update at off-table points; the gap measures interpolation error.
    double probe_err = 0.0;
    if (!f.is_zero) {
        const double span = space_grid.hi - space_grid.lo;
        for (double frac : {0.013, 0.21, 0.47}) {
            double t = T * frac;
            for (double xf : {0.31, 0.57}) {
                double x = space_grid.lo + xf * span;
                double du, dg;
                update_at(t, x, du, dg);
                double direct = heat.u(t, x) + du;
                probe_err = std::max(probe_err, std::abs(direct - table->interp(table->u, t, x)));
            }
        }
    }

    ContinuousSolution sol;
    sol.method = ContinuousSolution::Method::Picard;
    sol.accuracy = std::max({residual, heat.accuracy, probe_err});
    sol.u = [table, T, g = problem.terminal.eval](double t, double x) {
        if (t >= T) return g(x);
        return table->interp(table->u, t, x);
    };
    sol.grad_u = [table, T](double t, double x) {
        if (!(t < T)) throw std::invalid_argument("gradient undefined at the horizon");
        return table->interp(table->grad, t, x);
    };
    return sol;
}

ContinuousSolution self_refined(const ProblemSpec& problem, long n_ref) {
    if (n_ref > 16384)
        throw std::invalid_argument("self-refined oracle beyond the n_ref <= 16384 memory guard");
    if (n_ref < 2 || n_ref % 2 != 0)
        throw std::invalid_argument("self-refined oracle needs even n_ref >= 2");

    const double T = problem.horizon;
    const double x0 = problem.start_x;
    auto fine = std::make_shared<LatticeSolution>(
        solve_backward(problem, make_grid(T, n_ref), x0));
    LatticeSolution half = solve_backward(problem, make_grid(T, n_ref / 2), x0);

    auto eval_u = [](const LatticeSolution& sol, double t, double x) {
        const TimeGrid& grid = sol.grid();
        long layer = grid.floor_index(t);
        if (layer == 0) return sol.value(0, 0);
        // interpolate between same-parity nodes (spacing 2 sqrt(h)), clamped
        double spacing = 2.0 * grid.sqrt_step();
        double lo_pos = sol.root() - grid.sqrt_step() * static_cast<double>(layer);
        double pos = (x - lo_pos) / spacing;
        long idx = std::clamp<long>(static_cast<long>(std::floor(pos)), 0, layer - 1);
        double w = std::clamp(pos - static_cast<double>(idx), 0.0, 1.0);
        return (1.0 - w) * sol.value(layer, idx) + w * sol.value(layer, idx + 1);
    };
    auto eval_grad = [](const LatticeSolution& sol, double t, double x) {
        const TimeGrid& grid = sol.grid();
        long layer = grid.floor_index(t);
        if (layer >= grid.steps())
            throw std::invalid_argument("gradient undefined at the horizon");
        if (layer == 0) return sol.gradient(0, 0);
        double spacing = 2.0 * grid.sqrt_step();
        double lo_pos = sol.root() - grid.sqrt_step() * static_cast<double>(layer);
        double pos = (x - lo_pos) / spacing;
        long idx = std::clamp<long>(static_cast<long>(std::floor(pos)), 0, layer - 1);
        double w = std::clamp(pos - static_cast<double>(idx), 0.0, 1.0);
        return (1.0 - w) * sol.gradient(layer, idx) + w * sol.gradient(layer, idx + 1);
    };

    // Richardson accuracy: the scheme error scales like n^{-rho}
    double rho = std::min(problem.generator.alpha, 0.5 * problem.terminal.eps);
    double factor = 1.0 / (std::pow(2.0, rho) - 1.0);
    double worst = 0.0;
    for (double frac : {0.0, 0.25, 0.5, 0.75})
        for (double dx : {-1.0, -0.25, 0.0, 0.25, 1.0}) {
            double t = T * frac;
            double x = x0 + dx;
            worst = std::max(worst, std::abs(eval_u(*fine, t, x) - eval_u(half, t, x)));
        }

    ContinuousSolution sol;
    sol.method = ContinuousSolution::Method::SelfRefined;
    sol.accuracy = factor * worst;
    sol.u = [fine, eval_u](double t, double x) { return eval_u(*fine, t, x); };
    sol.grad_u = [fine, eval_grad](double t, double x) { return eval_grad(*fine, t, x); };
    return sol;
}

}  // namespace walkbsde
