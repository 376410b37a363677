#include "walkbsde/lattice_solver.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>

#include "walkbsde/errors.hpp"
#include "walkbsde/parallel.hpp"

namespace walkbsde {

namespace {

constexpr long kMaxSteps = 16384;  // ~1 GB of 8-byte nodes at the cap
constexpr int kMaxFixedPointIters = 60;

inline long layer_offset(long k) { return k * (k + 1) / 2; }

// Backward sweep over the triangle rooted at (0, anchor). Residuals (max per
// layer) are written only when `residuals` is non-null.
Eigen::ArrayXd sweep(const TerminalCondition& g, const Generator& f, const TimeGrid& grid,
                     double anchor, Eigen::ArrayXd* residuals) {
    const long n = grid.steps();
    const double h = grid.step();
    const double root_h = grid.sqrt_step();

    Eigen::ArrayXd values(layer_offset(n + 1));
    if (residuals) residuals->setZero(n);

    for (long m = 0; m <= n; ++m) {
        double x = anchor + root_h * static_cast<double>(2 * m - n);
        double v = g.eval(x);
        if (!std::isfinite(v))
            throw EvaluationError("terminal condition returned a non-finite value",
                                  grid.horizon(), x);
        values[layer_offset(n) + m] = v;
    }

    for (long k = n - 1; k >= 0; --k) {
        const long lo = layer_offset(k);
        const long up = layer_offset(k + 1);
        auto dst = values.segment(lo, k + 1);
        auto upper = values.segment(up, k + 2);

        if (f.is_zero) {
            dst = 0.5 * (upper.head(k + 1) + upper.tail(k + 1));
            continue;
        }

        const double t_next = grid.time_at(k + 1);
        const double contraction = h * f.norm_y;
        double layer_residual = 0.0;
        std::mutex residual_mutex;

        auto solve_nodes = [&](long m_lo, long m_hi) {
            double local_residual = 0.0;
            for (long m = m_lo; m < m_hi; ++m) {
                double x = anchor + root_h * static_cast<double>(2 * m - k);
                double vu = values[up + m + 1];
                double vd = values[up + m];
                double avg = 0.5 * (vu + vd);
                double z = (vu - vd) / (2.0 * root_h);

                double y = avg + h * f.eval(t_next, x, avg, z);
                for (int it = 0; it < kMaxFixedPointIters; ++it) {
                    double next = avg + h * f.eval(t_next, x, y, z);
                    double move = std::abs(next - y);
                    y = next;
                    if (move <= 4e-16 * (1.0 + std::abs(next))) break;
                    if (contraction == 0.0) break;  // f independent of y
                }
                if (!std::isfinite(y))
                    throw EvaluationError("generator produced a non-finite value", t_next, x);
                values[lo + m] = y;
                if (residuals) {
                    double res = std::abs(y - avg - h * f.eval(t_next, x, y, z));
                    local_residual = std::max(local_residual, res);
                }
            }
            if (residuals) {
                std::lock_guard<std::mutex> hold(residual_mutex);
                layer_residual = std::max(layer_residual, local_residual);
            }
        };

        parallel_for(k + 1, solve_nodes, 2048);
        if (residuals) (*residuals)[k] = layer_residual;
    }
    return values;
}

}  // namespace

struct LatticeSolution::Lazy {
    std::mutex mutex;
    Eigen::ArrayXd shadow;  // triangle rooted at x0 - sqrt(h); empty until needed
    bool built = false;
};

LatticeSolution::LatticeSolution(TimeGrid grid, double root, TerminalCondition terminal,
                                 Generator generator)
    : grid_(grid), root_(root), terminal_(std::move(terminal)),
      generator_(std::move(generator)), lazy_(std::make_shared<Lazy>()) {}

double LatticeSolution::value(long layer, long index) const {
    if (layer < 0 || layer > grid_.steps() || index < 0 || index > layer)
        throw std::invalid_argument("lattice node (" + std::to_string(layer) + "," +
                                    std::to_string(index) + ") out of range");
    return main_[layer_offset(layer) + index];
}

const Eigen::ArrayXd& LatticeSolution::shadow() const {
    std::lock_guard<std::mutex> hold(lazy_->mutex);
    if (!lazy_->built) {
        lazy_->shadow = sweep(terminal_, generator_, grid_, root_ - grid_.sqrt_step(), nullptr);
        lazy_->built = true;
    }
    return lazy_->shadow;
}

double LatticeSolution::value_at(long layer, double x) const {
    if (layer < 0 || layer > grid_.steps())
        throw std::invalid_argument("lattice layer out of range");
    const double root_h = grid_.sqrt_step();
    double offset_real = (x - root_) / root_h;
    long j = static_cast<long>(std::llround(offset_real));
    if (std::abs(offset_real - static_cast<double>(j)) > 1e-6)
        throw std::invalid_argument("position is not a lattice point");

    if (((j + layer) & 1L) == 0) {
        long index = (j + layer) / 2;
        if (index < 0 || index > layer)
            throw std::invalid_argument("lattice position out of layer range");
        return main_[layer_offset(layer) + index];
    }
    long index = (j + layer + 1) / 2;  // shadow triangle, anchored one step left
    if (index < 0 || index > layer)
        throw std::invalid_argument("lattice position out of layer range");
    return shadow()[layer_offset(layer) + index];
}

double LatticeSolution::gradient(long layer, long index) const {
    if (layer < 0 || layer >= grid_.steps() || index < 0 || index > layer)
        throw std::invalid_argument("gradient node out of range");
    double vu = main_[layer_offset(layer + 1) + index + 1];
    double vd = main_[layer_offset(layer + 1) + index];
    return (vu - vd) / (2.0 * grid_.sqrt_step());
}

double LatticeSolution::gradient_at(long layer, double x) const {
    const double root_h = grid_.sqrt_step();
    double vu = value_at(layer + 1, x + root_h);
    double vd = value_at(layer + 1, x - root_h);
    return (vu - vd) / (2.0 * root_h);
}

LatticeSolution solve_backward(const ProblemSpec& problem, const TimeGrid& grid, double x0) {
    const long n = grid.steps();
    if (n > kMaxSteps)
        throw std::invalid_argument("lattice with n = " + std::to_string(n) +
                                    " exceeds the memory guard (n <= " +
                                    std::to_string(kMaxSteps) + ")");
    const double h = grid.step();
    const double lip_y = problem.generator.norm_y;
    if (h * lip_y > 0.5 + 1e-12) {
        long minimal = static_cast<long>(std::ceil(2.0 * grid.horizon() * lip_y - 1e-9));
        throw SchemeUnstableError(
            "scheme unstable: h ||f_y||_Lip = " + std::to_string(h * lip_y) +
                " > 1/2; need n >= " + std::to_string(minimal),
            minimal);
    }

    LatticeSolution sol(grid, x0, problem.terminal, problem.generator);
    sol.main_ = sweep(problem.terminal, problem.generator, grid, x0, &sol.residuals_);
    return sol;
}

double u_n(const LatticeSolution& sol, double t, long node_index) {
    long layer = sol.grid().floor_index(t);
    return sol.value(layer, node_index);
}

double delta_n(const LatticeSolution& sol, double t, long node_index) {
    long layer = sol.grid().floor_index(t);
    if (layer >= sol.grid().steps())
        throw std::invalid_argument("discrete gradient undefined at the horizon");
    return sol.gradient(layer, node_index);
}

Distribution1D y_law(const LatticeSolution& sol, const TimeGrid& grid, double t, double s) {
    if (t > s) throw std::invalid_argument("y law needs t <= s");
    WalkMarginal increment = walk_marginal(grid, t, s);
    long layer = grid.floor_index(s);
    Distribution1D walk = Distribution1D::from_marginal(increment, sol.root());
    return pushforward(walk, [&](double x) { return sol.value_at(layer, x); });
}

Distribution1D z_law(const LatticeSolution& sol, const TimeGrid& grid, double t, double s) {
    if (!(t < s) || !(s < grid.horizon()))
        throw std::invalid_argument("z law needs t < s < T");
    double ratio = s / grid.step();
    if (std::abs(ratio - std::round(ratio)) < 1e-9)
        throw GridPointEvaluationError(
            "Z^n at a grid time is the left limit, not Delta^n; evaluate at an offset "
            "time such as s - h/2");
    WalkMarginal increment = walk_marginal(grid, t, s);
    long layer = grid.floor_index(s);
    Distribution1D walk = Distribution1D::from_marginal(increment, sol.root());
    return pushforward(walk, [&](double x) { return sol.gradient_at(layer, x); });
}

double delta_n_by_representation(const ProblemSpec& problem, const LatticeSolution& sol,
                                 const TimeGrid& grid, double t, double x) {
    if (!(t < grid.horizon()))
        throw std::invalid_argument("discrete gradient undefined at the horizon");
    const long n = grid.steps();
    const long nt = grid.floor_index(t);
    const double h = grid.step();
    const double root_h = grid.sqrt_step();

    // Terminal part: E[ g(x + W_K) W_K ] / (T - t_floor), W_K the K-step
    // increment.
    const long K = n - nt;
    Eigen::ArrayXd weights = binomial_weights(K);
    double g_term = 0.0;
    for (long m = 0; m <= K; ++m) {
        double w = root_h * static_cast<double>(2 * m - K);
        g_term += weights[m] * problem.terminal.eval(x + w) * w;
    }
    g_term /= static_cast<double>(K) * h;

    // Generator part: the integrand is constant on each mesh cell, so the
    // time integral is a finite sum of h-length pieces.
    double f_term = 0.0;
    if (!problem.generator.is_zero) {
        for (long j = nt + 1; j <= n - 1; ++j) {
            const long k = j - nt;
            Eigen::ArrayXd pk = binomial_weights(k);
            const double t_eval = grid.time_at(j + 1);  // s_ceil on this cell
            double cell = 0.0;
            for (long m = 0; m <= k; ++m) {
                double w = root_h * static_cast<double>(2 * m - k);
                double pos = x + w;
                double y = sol.value_at(j, pos);
                double z = sol.gradient_at(j, pos);
                cell += pk[m] * problem.generator.eval(t_eval, pos, y, z) * w;
            }
            f_term += cell / static_cast<double>(k);  // h / (k h)
        }
    }
    return g_term + f_term;
}

std::pair<double, double> solution_distance(const LatticeSolution& a, const LatticeSolution& b) {
    const TimeGrid& grid = a.grid();
    if (grid.steps() != b.grid().steps() ||
        std::abs(grid.horizon() - b.grid().horizon()) > 1e-12 * grid.horizon() ||
        a.root() != b.root())
        throw std::invalid_argument("solution distance needs matching grids and roots");

    const long n = grid.steps();
    const double h = grid.step();

    double sup_y = 0.0;
    for (long k = 0; k <= n; ++k)
        for (long m = 0; m <= k; ++m)
            sup_y = std::max(sup_y, std::abs(a.value(k, m) - b.value(k, m)));

    double z_norm = 0.0;
    for (long k = 0; k < n; ++k) {
        Eigen::ArrayXd weights = binomial_weights(k);
        double layer = 0.0;
        for (long m = 0; m <= k; ++m) {
            double diff = a.gradient(k, m) - b.gradient(k, m);
            layer += weights[m] * diff * diff;
        }
        z_norm += h * layer;
    }
    return {sup_y, z_norm};
}

}  // namespace walkbsde
