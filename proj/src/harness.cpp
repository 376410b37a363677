#include "walkbsde/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "walkbsde/distribution.hpp"
#include "walkbsde/errors.hpp"
#include "walkbsde/lattice_solver.hpp"
#include "walkbsde/parallel.hpp"
#include "walkbsde/reference.hpp"
#include "walkbsde/wasserstein.hpp"

namespace walkbsde {

namespace {

// Measurements at or below this floor count as scheme-exact and are kept out
// of the log-log fits.
constexpr double kZeroFloor = 1e-12;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fit_key(const std::string& target, double s, double r) {
    if (r == 0.0) return target;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%s@s=%g,r=%g", target.c_str(), s, r);
    return buf;
}

}  // namespace

RateFit fit_rate(const std::vector<std::pair<double, double>>& points) {
    std::vector<std::pair<double, double>> usable;
    RateFit fit;
    for (const auto& [n, err] : points) {
        if (err > kZeroFloor)
            usable.push_back({n, err});
        else
            fit.exact_ns.push_back(static_cast<long>(std::llround(n)));
    }
    if (usable.size() < 3)
        throw std::invalid_argument("rate fit needs at least 3 points with positive errors");

    const Eigen::Index m = static_cast<Eigen::Index>(usable.size());
    Eigen::MatrixXd design(m, 2);
    Eigen::VectorXd logs(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        design(i, 0) = std::log(usable[static_cast<size_t>(i)].first);
        design(i, 1) = 1.0;
        logs[i] = std::log(usable[static_cast<size_t>(i)].second);
    }
    Eigen::Vector2d coeff = (design.transpose() * design).ldlt().solve(design.transpose() * logs);

    Eigen::VectorXd residual = logs - design * coeff;
    double ss_res = residual.squaredNorm();
    double ss_tot = (logs.array() - logs.mean()).square().sum();

    fit.slope = coeff[0];
    fit.intercept = coeff[1];
    fit.r_squared = ss_tot < 1e-30 ? 1.0 : 1.0 - ss_res / ss_tot;
    fit.points = std::move(usable);
    fit.fitted = true;
    return fit;
}

double expected_rate(const ProblemSpec& problem) {
    return std::min(problem.generator.alpha, 0.5 * problem.terminal.eps);
}

bool fit_passes(const RateFit& fit, double rate_bound) {
    if (!fit.fitted) return !fit.exact_ns.empty();
    return fit.slope <= -rate_bound + kSlopeTolerance && fit.r_squared >= kMinRSquared;
}

// --------------------------------------------------------------------------
// Law oracles: quantile samples of N(mean, var) mapped through u(s,.) or
// grad u(s,.). Expensive oracles are tabulated on a uniform grid and the
// samples evaluated by 4-point interpolation, with the interpolation error
// probed against direct evaluation and charged to the oracle accuracy.
namespace {

struct MappedLaw {
    Distribution1D law;
    double accuracy = 0.0;
};

class GaussianMap {
public:
    GaussianMap(std::function<double(double)> fn, double mean, double variance, bool tabulate)
        : fn_(std::move(fn)), mean_(mean), variance_(variance) {
        if (!tabulate || variance_ == 0.0) return;
        const double sigma = std::sqrt(variance_);
        lo_ = mean_ - 5.5 * sigma;
        step_ = 11.0 * sigma / static_cast<double>(kTableSize - 1);
        table_.resize(kTableSize);
        parallel_for(kTableSize, [&](long a, long b) {
            for (long i = a; i < b; ++i)
                table_[i] = fn_(lo_ + step_ * static_cast<double>(i));
        }, 256);
        tabulated_ = true;
    }

    MappedLaw sample(long count) const {
        Distribution1D quantiles = gaussian_quantiles(mean_, variance_, count);
        if (!tabulated_) {
            MappedLaw out{pushforward(quantiles, fn_), 0.0};
            return out;
        }
        Eigen::ArrayXd mapped(count);
        const auto& src = quantiles.values();
        parallel_for(count, [&](long a, long b) {
            for (long i = a; i < b; ++i) mapped[i] = interpolate(src[i]);
        });
        double worst = 0.0;
        const long stride = std::max<long>(1, count / 257);
        for (long i = 0; i < count; i += stride)
            worst = std::max(worst, std::abs(fn_(src[i]) - interpolate(src[i])));
        std::sort(mapped.data(), mapped.data() + mapped.size());
        return {Distribution1D::quantile_sampled(std::move(mapped)), worst};
    }

private:
    static constexpr long kTableSize = 4097;

    double interpolate(double x) const {
        double pos = (x - lo_) / step_;
        long j = std::clamp<long>(static_cast<long>(std::floor(pos)), 1, kTableSize - 3);
        double t = pos - static_cast<double>(j);
        double wm = -t * (t - 1.0) * (t - 2.0) / 6.0;
        double w0 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
        double w1 = -(t + 1.0) * t * (t - 2.0) / 2.0;
        double w2 = (t + 1.0) * t * (t - 1.0) / 6.0;
        return wm * table_[j - 1] + w0 * table_[j] + w1 * table_[j + 1] + w2 * table_[j + 2];
    }

    std::function<double(double)> fn_;
    double mean_;
    double variance_;
    double lo_ = 0.0;
    double step_ = 1.0;
    Eigen::ArrayXd table_;
    bool tabulated_ = false;
};

bool oracle_is_cheap(const ContinuousSolution& oracle) {
    return oracle.method == ContinuousSolution::Method::ClosedForm ||
           oracle.method == ContinuousSolution::Method::Manufactured;
}

}  // namespace

ContinuousSolution select_oracle(const ProblemSpec& problem, const StudySpec& spec) {
    const std::string& policy = spec.oracle_policy;
    if (policy == "auto") {
        if (problem.exact) return *problem.exact;
        if (problem.generator.is_zero)
            return heat_solution(problem.terminal, problem.horizon, spec.quad_nodes);
        try {
            return picard_solution(problem, 64, MeshSpec{-8.0, 8.0, 129}, 60, 1e-5);
        } catch (const OracleAccuracyError&) {
            return self_refined(problem, spec.self_refine_n);
        }
    }
    if (policy == "closed-form") {
        if (!problem.exact)
            throw std::invalid_argument("no closed-form oracle for problem " + problem.id);
        return *problem.exact;
    }
    if (policy == "heat") {
        if (!problem.generator.is_zero)
            throw std::invalid_argument("heat oracle requires a zero generator");
        return heat_solution(problem.terminal, problem.horizon, spec.quad_nodes);
    }
    if (policy == "picard") return picard_solution(problem, 64, MeshSpec{-8.0, 8.0, 129}, 60, 1e-5);
    if (policy == "self-refined") return self_refined(problem, spec.self_refine_n);
    throw std::invalid_argument("unknown oracle policy '" + policy + "'");
}

ConvergenceResult run_convergence(const StudySpec& spec) {
    if (spec.n_list.empty()) throw std::invalid_argument("empty n list");
    for (size_t i = 1; i < spec.n_list.size(); ++i)
        if (spec.n_list[i] <= spec.n_list[i - 1])
            throw std::invalid_argument("n list must be strictly increasing");

    static const std::set<std::string> known = {"pointwise_u", "pointwise_grad", "law_Y",
                                                "law_Z"};
    for (const auto& t : spec.targets)
        if (!known.count(t)) throw std::invalid_argument("unknown study target '" + t + "'");

    ProblemSpec problem = make_problem(spec.problem_id, spec.params);
    for (long n : spec.n_list) {
        double h = problem.horizon / static_cast<double>(n);
        if (h * problem.generator.norm_y > 0.5 + 1e-12) {
            long minimal = static_cast<long>(
                std::ceil(2.0 * problem.horizon * problem.generator.norm_y - 1e-9));
            throw SchemeUnstableError("study n = " + std::to_string(n) +
                                          " violates h ||f_y|| <= 1/2; need n >= " +
                                          std::to_string(minimal),
                                      minimal);
        }
    }
    ContinuousSolution oracle = select_oracle(problem, spec);
    if (oracle.method == ContinuousSolution::Method::SelfRefined &&
        spec.self_refine_n < 16 * spec.n_list.back())
        throw std::invalid_argument("self-refined oracle needs n_ref >= 16x the largest study n");
    const bool cheap = oracle_is_cheap(oracle);
    const double T = problem.horizon;
    const double t0 = problem.start_time;
    const double x0 = problem.start_x;
    const long M = spec.quantile_count;

    bool want_law = false;
    for (const auto& t : spec.targets) want_law |= (t == "law_Y" || t == "law_Z");
    if (want_law && spec.eval_times.empty())
        throw std::invalid_argument("law targets need eval_times");

    ConvergenceResult result;
    result.rate_bound = expected_rate(problem);
    result.oracle_method = method_name(oracle.method);
    result.oracle_accuracy = oracle.accuracy;

    const bool has_y = std::count(spec.targets.begin(), spec.targets.end(), "law_Y") > 0;
    std::map<double, GaussianMap> y_maps;  // keyed by s; reused across n
    if (has_y)
        for (double s : spec.eval_times)
            y_maps.emplace(s, GaussianMap([&oracle, s](double x) { return oracle.u(s, x); }, x0,
                                          s - t0, !cheap));

    std::map<std::string, std::vector<std::pair<double, double>>> groups;
    auto record = [&](long n, const std::string& target, double s, double r, double error,
                      double oracle_acc) {
        result.rows.push_back({n, target, t0, s, r, error, oracle_acc});
        groups[fit_key(target, s, r)].push_back({static_cast<double>(n), error});
    };

    for (long n : spec.n_list) {
        TimeGrid grid = make_grid(T, n);
        LatticeSolution sol = solve_backward(problem, grid, x0);
        const long layer0 = grid.floor_index(t0);
        const bool last = (n == spec.n_list.back());

        for (const auto& target : spec.targets) {
            if (target == "pointwise_u") {
                double err = std::abs(oracle.u(t0, x0) - sol.value_at(layer0, x0));
                record(n, target, t0, 0.0, err, oracle.accuracy);
            } else if (target == "pointwise_grad") {
                double err = std::abs(oracle.grad_u(t0, x0) - sol.gradient_at(layer0, x0));
                record(n, target, t0, 0.0, err, oracle.accuracy);
            } else if (target == "law_Y") {
                for (double s : spec.eval_times) {
                    Distribution1D scheme = y_law(sol, grid, t0, s);
                    MappedLaw ref = y_maps.at(s).sample(M);
                    for (double r : spec.r_list) {
                        double err = wasserstein_r(scheme, ref.law, r);
                        if (last && err > kZeroFloor) {
                            double err2 =
                                wasserstein_r(scheme, y_maps.at(s).sample(2 * M).law, r);
                            if (std::abs(err - err2) > err / 10.0)
                                throw OracleTooCoarseError(
                                    "quantile sample too coarse for law_Y",
                                    std::abs(err - err2) / err);
                        }
                        record(n, target, s, r, err, oracle.accuracy + ref.accuracy);
                    }
                }
            } else if (target == "law_Z") {
                for (double s : spec.eval_times) {
                    double s_mid = (static_cast<double>(grid.floor_index(s)) + 0.5) * grid.step();
                    if (!(s_mid > t0) || !(s_mid < T)) continue;
                    GaussianMap zmap([&oracle, s_mid](double x) { return oracle.grad_u(s_mid, x); },
                                     x0, s_mid - t0, !cheap);
                    Distribution1D scheme = z_law(sol, grid, t0, s_mid);
                    MappedLaw ref = zmap.sample(M);
                    for (double r : spec.r_list) {
                        double err = wasserstein_r(scheme, ref.law, r);
                        if (last && err > kZeroFloor) {
                            double err2 = wasserstein_r(scheme, zmap.sample(2 * M).law, r);
                            if (std::abs(err - err2) > err / 10.0)
                                throw OracleTooCoarseError(
                                    "quantile sample too coarse for law_Z",
                                    std::abs(err - err2) / err);
                        }
                        record(n, target, s, r, err, oracle.accuracy + ref.accuracy);
                    }
                }
            }
        }
    }

    bool all_pass = true;
    for (auto& [key, points] : groups) {
        long positives = 0;
        for (const auto& [n, err] : points) positives += err > kZeroFloor;
        RateFit fit;
        if (positives >= 3) {
            fit = fit_rate(points);
        } else {
            for (const auto& [n, err] : points)
                if (err <= kZeroFloor) fit.exact_ns.push_back(static_cast<long>(std::llround(n)));
        }
        // Oracle error must stay an order of magnitude under the smallest
        // measured error in every fitted group.
        if (fit.fitted) {
            double min_err = std::numeric_limits<double>::infinity();
            double worst_acc = 0.0;
            for (const auto& row : result.rows)
                if (fit_key(row.target, row.s, row.r) == key && row.error > kZeroFloor) {
                    min_err = std::min(min_err, row.error);
                    worst_acc = std::max(worst_acc, row.oracle_accuracy);
                }
            if (worst_acc > min_err / 10.0)
                throw OracleTooCoarseError("oracle too coarse for study target " + key,
                                           worst_acc / min_err);
        }
        all_pass = all_pass && fit_passes(fit, result.rate_bound);
        result.fits.emplace(key, std::move(fit));
    }
    result.pass = all_pass;
    return result;
}

RioResult rio_study(const std::vector<long>& n_list, double r, long quantile_count,
                    double horizon) {
    if (quantile_count < 1000000)
        throw std::invalid_argument("rio study needs at least 10^6 quantile points");
    Distribution1D gauss = gaussian_quantiles(0.0, horizon, quantile_count);
    RioResult out;
    std::vector<std::pair<double, double>> points;
    for (long n : n_list) {
        TimeGrid grid = make_grid(horizon, n);
        Distribution1D walk = Distribution1D::from_marginal(walk_marginal(grid, 0.0, horizon));
        double err = wasserstein_r(walk, gauss, r);
        out.rows.push_back({n, "rio", 0.0, horizon, r, err, 0.0});
        points.push_back({static_cast<double>(n), err});
    }
    if (points.size() >= 3) {
        out.fit = fit_rate(points);
        out.pass = out.fit.slope >= -0.6 && out.fit.slope <= -0.45 && out.fit.r_squared >= 0.98;
    }
    return out;
}

HolderStudyResult holder_expectation_study(const TerminalCondition& g,
                                           const std::vector<long>& n_list, double horizon) {
    ContinuousSolution heat = heat_solution(g, horizon, 400);
    const double plain_ref = heat.u(0.0, 0.0);                 // E g(B_T)
    const double weighted_ref = horizon * heat.grad_u(0.0, 0.0);  // E g(B_T) B_T

    HolderStudyResult out;
    std::vector<std::pair<double, double>> plain_pts, weighted_pts;
    for (long n : n_list) {
        TimeGrid grid = make_grid(horizon, n);
        WalkMarginal walk = walk_marginal(grid, 0.0, horizon);
        double plain = 0.0, weighted = 0.0;
        for (long m = 0; m <= walk.steps; ++m) {
            double v = g.eval(walk.support[m]);
            plain += walk.probs[m] * v;
            weighted += walk.probs[m] * v * walk.support[m];
        }
        double err_plain = std::abs(plain - plain_ref);
        double err_weighted = std::abs(weighted - weighted_ref);
        out.rows.push_back({n, "holder_E", 0.0, horizon, 0.0, err_plain, heat.accuracy});
        out.rows.push_back({n, "holder_weighted", 0.0, horizon, 0.0, err_weighted, heat.accuracy});
        plain_pts.push_back({static_cast<double>(n), err_plain});
        weighted_pts.push_back({static_cast<double>(n), err_weighted});
    }
    auto fit_or_exact = [](const std::vector<std::pair<double, double>>& pts) {
        long positives = 0;
        for (const auto& [n, e] : pts) positives += e > kZeroFloor;
        if (positives >= 3) return fit_rate(pts);
        RateFit fit;
        for (const auto& [n, e] : pts)
            if (e <= kZeroFloor) fit.exact_ns.push_back(static_cast<long>(std::llround(n)));
        return fit;
    };
    out.plain = fit_or_exact(plain_pts);
    out.weighted = fit_or_exact(weighted_pts);
    double bound = 0.5 * g.eps;
    out.pass = fit_passes(out.plain, bound) && fit_passes(out.weighted, bound);
    return out;
}

std::vector<StabilityRow> stability_study(const ProblemSpec& problem,
                                          const std::vector<Perturbation>& perturbations,
                                          long n) {
    TimeGrid grid = make_grid(problem.horizon, n);
    LatticeSolution base = solve_backward(problem, grid, problem.start_x);

    std::vector<StabilityRow> rows;
    for (const auto& pert : perturbations) {
        ProblemSpec shifted = problem;
        if (pert.dg) {
            auto g = problem.terminal.eval;
            auto dg = pert.dg;
            shifted.terminal.eval = [g, dg](double x) { return g(x) + dg(x); };
        }
        if (pert.df) {
            auto f = problem.generator.eval;
            auto df = pert.df;
            shifted.generator.eval = [f, df](double t, double x, double y, double z) {
                return f(t, x, y, z) + df(t, x, y, z);
            };
            shifted.generator.is_zero = false;
        }
        LatticeSolution other = solve_backward(shifted, grid, problem.start_x);
        auto [sup_y, z_norm] = solution_distance(base, other);
        rows.push_back({pert.label, pert.size, sup_y, z_norm});
    }
    return rows;
}

namespace {

double lattice_growth(const LatticeSolution& sol, double eps) {
    const TimeGrid& grid = sol.grid();
    double worst = 0.0;
    for (long k = 0; k <= grid.steps(); ++k)
        for (long m = 0; m <= k; ++m) {
            double x = sol.root() + grid.sqrt_step() * static_cast<double>(2 * m - k);
            worst = std::max(worst,
                             std::abs(sol.value(k, m)) / std::pow(1.0 + std::abs(x), eps));
        }
    return worst;
}

double lattice_gradient_scaled(const LatticeSolution& sol, double eps) {
    const TimeGrid& grid = sol.grid();
    const double T = grid.horizon();
    double worst = 0.0;
    for (long k = 0; k < grid.steps(); ++k) {
        double factor = std::pow(T - grid.time_at(k), 0.5 * (1.0 - eps));
        for (long m = 0; m <= k; ++m)
            worst = std::max(worst, factor * std::abs(sol.gradient(k, m)));
    }
    return worst;
}

}  // namespace

RegularityReport regularity_suite(const ProblemSpec& problem, const ContinuousSolution& oracle) {
    const double T = problem.horizon;
    const double eps = problem.terminal.eps;

    ContinuousSolution refined = oracle;
    if (oracle.method == ContinuousSolution::Method::HeatQuadrature)
        refined = heat_solution(problem.terminal, T, 800);

    const std::vector<double> xs = {-2.0, -1.5, -1.0, -0.5, -0.1, 0.1, 0.5, 1.0, 1.5, 2.0};
    const std::vector<double> wide_xs = {-8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0};

    auto grad_blowup = [&](const ContinuousSolution& s) {
        double worst = 0.0;
        for (int j = 1; j <= 12; ++j) {
            double t = T * (1.0 - std::ldexp(1.0, -j));
            double factor = std::pow(T - t, 0.5 * (1.0 - eps));
            for (double x : xs) worst = std::max(worst, factor * std::abs(s.grad_u(t, x)));
        }
        return worst;
    };
    auto grad_space_holder = [&](const ContinuousSolution& s) {
        double worst = 0.0;
        for (int j = 1; j <= 8; ++j) {
            double t = T * (1.0 - std::ldexp(1.0, -j));
            double factor = std::sqrt(T - t);
            for (size_t a = 0; a < xs.size(); ++a)
                for (size_t b = a + 1; b < xs.size(); ++b) {
                    double q = std::abs(s.grad_u(t, xs[a]) - s.grad_u(t, xs[b])) /
                               std::pow(std::abs(xs[a] - xs[b]), eps);
                    worst = std::max(worst, factor * q);
                }
        }
        return worst;
    };
    auto grad_time_holder = [&](const ContinuousSolution& s) {
        double worst = 0.0;
        for (int j = 1; j <= 8; ++j) {
            double t = T * (1.0 - std::ldexp(1.0, -j));
            for (int l = 1; l <= 4; ++l) {
                double r = t * (1.0 - std::ldexp(1.0, -l));
                if (!(r < t)) continue;
                for (double x : xs) {
                    double q = std::abs(s.grad_u(t, x) - s.grad_u(r, x)) * std::sqrt(T - t) /
                               std::pow(t - r, 0.5 * eps);
                    worst = std::max(worst, q);
                }
            }
        }
        return worst;
    };
    auto u_growth = [&](const ContinuousSolution& s) {
        double worst = 0.0;
        for (double frac : {0.0, 0.25, 0.5, 0.75, 63.0 / 64.0}) {
            double t = T * frac;
            for (double x : wide_xs)
                worst = std::max(worst, std::abs(s.u(t, x)) / std::pow(1.0 + std::abs(x), eps));
        }
        return worst;
    };
    auto u_space_holder = [&](const ContinuousSolution& s) {
        double worst = 0.0;
        for (double frac : {0.0, 0.25, 0.5, 0.75, 63.0 / 64.0}) {
            double t = T * frac;
            for (size_t a = 0; a < xs.size(); ++a)
                for (size_t b = a + 1; b < xs.size(); ++b)
                    worst = std::max(worst, std::abs(s.u(t, xs[a]) - s.u(t, xs[b])) /
                                                std::pow(std::abs(xs[a] - xs[b]), eps));
        }
        return worst;
    };
    auto grad_fd_agreement = [&](const ContinuousSolution& s) {
        const double delta = 1e-4;
        double worst = 0.0;
        for (double frac : {0.25, 0.5, 0.75}) {
            double t = T * frac;
            for (double x : xs) {
                double fd = (s.u(t, x + delta) - s.u(t, x - delta)) / (2.0 * delta);
                double g = s.grad_u(t, x);
                worst = std::max(worst, std::abs(g - fd) / std::max(1.0, std::abs(g)));
            }
        }
        return worst;
    };

    RegularityReport report;
    auto add_pair = [&](const std::string& name, double a, double b) {
        ScaledQuantity q;
        q.name = name;
        q.base = a;
        q.refined = b;
        q.finite = std::isfinite(a) && std::isfinite(b);
        double scale = std::max(std::abs(a), std::abs(b));
        q.variation = scale > 0.0 ? std::abs(a - b) / scale : 0.0;
        report.quantities.push_back(q);
    };

    add_pair("grad_blowup_scaled", grad_blowup(oracle), grad_blowup(refined));
    add_pair("grad_space_holder_scaled", grad_space_holder(oracle), grad_space_holder(refined));
    add_pair("grad_time_holder_scaled", grad_time_holder(oracle), grad_time_holder(refined));
    add_pair("u_growth", u_growth(oracle), u_growth(refined));
    add_pair("u_space_holder", u_space_holder(oracle), u_space_holder(refined));

    // FD agreement is already a discrepancy; require it small instead of
    // merely stable.
    double fd_a = grad_fd_agreement(oracle);
    double fd_b = grad_fd_agreement(refined);
    ScaledQuantity fd;
    fd.name = "grad_fd_agreement";
    fd.base = fd_a;
    fd.refined = fd_b;
    fd.finite = std::isfinite(fd_a) && std::isfinite(fd_b);
    fd.variation = std::max(fd_a, fd_b) <= 1e-3 ? 0.0 : 1.0;
    report.quantities.push_back(fd);

    // Discrete counterparts: refinement in n.
    auto solve_at = [&](long n) {
        return solve_backward(problem, make_grid(T, n), problem.start_x);
    };
    LatticeSolution l64 = solve_at(64);
    LatticeSolution l256 = solve_at(256);
    LatticeSolution l1024 = solve_at(1024);
    add_pair("lattice_u_growth", std::max(lattice_growth(l64, eps), lattice_growth(l256, eps)),
             std::max(lattice_growth(l256, eps), lattice_growth(l1024, eps)));
    add_pair("lattice_grad_scaled",
             std::max(lattice_gradient_scaled(l64, eps), lattice_gradient_scaled(l256, eps)),
             std::max(lattice_gradient_scaled(l256, eps), lattice_gradient_scaled(l1024, eps)));

    report.pass = true;
    for (const auto& q : report.quantities)
        report.pass = report.pass && q.finite && q.variation <= 0.20;
    return report;
}

std::vector<ZSweepRow> near_horizon_z_sweep(const ProblemSpec& problem, long n, int j_max,
                                            long quantile_count) {
    StudySpec defaults;
    ContinuousSolution oracle = select_oracle(problem, defaults);
    const bool cheap = oracle_is_cheap(oracle);
    const double T = problem.horizon;
    const double t0 = problem.start_time;
    const double x0 = problem.start_x;

    TimeGrid grid = make_grid(T, n);
    LatticeSolution sol = solve_backward(problem, grid, x0);

    std::vector<ZSweepRow> rows;
    for (int j = 1; j <= j_max; ++j) {
        double s = T * (1.0 - std::ldexp(1.0, -j));
        double s_mid = (static_cast<double>(grid.floor_index(s)) + 0.5) * grid.step();
        if (!(s_mid > t0) || !(s_mid < T)) break;
        GaussianMap zmap([&oracle, s_mid](double x) { return oracle.grad_u(s_mid, x); }, x0,
                         s_mid - t0, !cheap);
        double err = wasserstein_r(z_law(sol, grid, t0, s_mid), zmap.sample(quantile_count).law,
                                   1.0);
        rows.push_back({s_mid, err, std::sqrt(T - s_mid) * err});
    }
    return rows;
}

std::string to_csv(const std::vector<ErrorRow>& rows) {
    std::string out = "n,target,t,s,r,error,oracle_accuracy\n";
    for (const auto& row : rows) {
        out += std::to_string(row.n);
        out += ',';
        out += row.target;
        out += ',';
        out += format_double(row.t);
        out += ',';
        out += format_double(row.s);
        out += ',';
        out += format_double(row.r);
        out += ',';
        out += format_double(row.error);
        out += ',';
        out += format_double(row.oracle_accuracy);
        out += '\n';
    }
    return out;
}

std::string summary_json(const ConvergenceResult& result, const std::string& study_name) {
    nlohmann::ordered_json root;
    root["study"] = study_name;
    root["oracle"] = {{"method", result.oracle_method}, {"accuracy", result.oracle_accuracy}};
    root["rate_bound"] = result.rate_bound;
    root["slope_tolerance"] = kSlopeTolerance;
    root["min_r_squared"] = kMinRSquared;
    root["pass"] = result.pass;

    nlohmann::ordered_json targets = nlohmann::ordered_json::object();
    nlohmann::ordered_json failures = nlohmann::ordered_json::array();
    for (const auto& [key, fit] : result.fits) {
        nlohmann::ordered_json entry;
        entry["fitted"] = fit.fitted;
        if (fit.fitted) {
            entry["slope"] = fit.slope;
            entry["intercept"] = fit.intercept;
            entry["r_squared"] = fit.r_squared;
            nlohmann::ordered_json pts = nlohmann::ordered_json::array();
            for (const auto& [n, e] : fit.points) pts.push_back({n, e});
            entry["points"] = pts;
        }
        entry["exact_n"] = fit.exact_ns;
        bool ok = fit_passes(fit, result.rate_bound);
        entry["pass"] = ok;
        if (!ok) failures.push_back(key);
        targets[key] = entry;
    }
    root["targets"] = targets;
    root["failures"] = failures;
    return root.dump(2) + "\n";
}

}  // namespace walkbsde
