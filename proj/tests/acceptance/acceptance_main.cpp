// Acceptance suite: runs every gate criterion at its stated tolerance and
// prints one pass/fail line each. Exit code 0 only when all criteria hold.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "walkbsde/harness.hpp"
#include "walkbsde/lattice_solver.hpp"
#include "walkbsde/reference.hpp"
#include "walkbsde/smoothing.hpp"

using namespace walkbsde;

namespace {

struct Criterion {
    int number;
    std::string label;
    double budget_seconds;
    std::function<bool(std::string&)> run;
};

bool check(bool condition, std::string& note, const std::string& message) {
    if (!condition && note.empty()) note = message;
    return condition;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// ---------------------------------------------------------------- criterion 1
bool exactness_suite(std::string& note) {
    ProblemParams params;
    params.intercept = 0.3;
    params.slope = 1.7;
    ProblemSpec problem = make_problem("affine", params);
    bool ok = true;
    for (long n : {4L, 64L, 1024L}) {
        TimeGrid grid = make_grid(1.0, n);
        LatticeSolution sol = solve_backward(problem, grid, 0.0);
        double value_err = 0.0;
        double grad_err = 0.0;
        for (long k = 0; k <= n; ++k)
            for (long m = 0; m <= k; ++m) {
                double x = grid.sqrt_step() * static_cast<double>(2 * m - k);
                value_err = std::max(value_err, std::abs(sol.value(k, m) - (0.3 + 1.7 * x)));
                if (k < n) grad_err = std::max(grad_err, std::abs(sol.gradient(k, m) - 1.7));
            }
        ok &= check(value_err <= 1e-12, note,
                    "n=" + std::to_string(n) + " value error " + fmt(value_err));
        ok &= check(grad_err <= 1e-12, note,
                    "n=" + std::to_string(n) + " gradient error " + fmt(grad_err));
    }
    return ok;
}

// ---------------------------------------------------------------- criterion 2
bool closed_form_recursion(std::string& note) {
    ProblemSpec problem = linear_generator_problem(1.0, 1.0);
    bool ok = true;
    auto solve_root = [&](long n) {
        return solve_backward(problem, make_grid(1.0, n), 0.0).value(0, 0);
    };
    for (long n : {4L, 16L, 64L}) {
        double expected = std::pow(1.0 - 1.0 / static_cast<double>(n), -static_cast<double>(n));
        double err = std::abs(solve_root(n) - expected);
        ok &= check(err <= 1e-12, note,
                    "n=" + std::to_string(n) + " closed-form deviation " + fmt(err));
    }
    const double e = std::exp(1.0);
    for (long n : {64L, 128L}) {
        double err_n = std::abs(solve_root(n) - e);
        double err_2n = std::abs(solve_root(2 * n) - e);
        double ratio = err_n / err_2n;
        ok &= check(ratio >= 1.8 && ratio <= 2.2, note,
                    "halving ratio at n=" + std::to_string(n) + " is " + fmt(ratio));
    }
    return ok;
}

// ---------------------------------------------------------------- criterion 3
bool representation_identity(std::string& note) {
    struct Config {
        std::string id;
        ProblemParams params;
    };
    std::vector<Config> configs;
    for (double eps : {0.25, 0.5, 1.0}) {
        ProblemParams p;
        p.eps = eps;
        configs.push_back({"holder-g", p});
    }
    {
        ProblemParams p;
        p.lambda = 1.0;
        configs.push_back({"linear", p});
    }
    for (auto [lambda, mu] : {std::pair{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}}) {
        ProblemParams p;
        p.lambda = lambda;
        p.mu = mu;
        configs.push_back({"manufactured", p});
    }
    for (double alpha : {0.25, 0.5}) {
        ProblemParams p;
        p.alpha = alpha;
        configs.push_back({"time-rough", p});
    }

    bool ok = true;
    for (const auto& config : configs) {
        ProblemSpec problem = make_problem(config.id, config.params);
        for (long n : {2L, 8L, 32L, 64L}) {
            TimeGrid grid = make_grid(problem.horizon, n);
            LatticeSolution sol = solve_backward(problem, grid, problem.start_x);
            int used = 0;
            for (double frac : {0.07, 0.23, 0.41, 0.59, 0.77, 0.93}) {
                double t = frac * problem.horizon;
                long nt = grid.floor_index(t);
                for (long j = -2; j <= 2 && used < 20; ++j) {
                    if (std::abs(j) > nt) continue;
                    double x = problem.start_x + grid.sqrt_step() * static_cast<double>(j);
                    double direct = sol.gradient_at(nt, x);
                    double rep = delta_n_by_representation(problem, sol, grid, t, x);
                    ++used;
                    if (std::abs(direct - rep) > 1e-9) {
                        ok = check(false, note,
                                   config.id + " n=" + std::to_string(n) + " deviation " +
                                       fmt(std::abs(direct - rep)));
                    }
                }
            }
        }
    }
    return ok;
}

// ---------------------------------------------------------------- criterion 4
bool rio_rate(std::string& note) {
    RioResult single = rio_study({1, 2, 4}, 2.0, 1000000);
    bool ok = check(std::abs(single.rows[0].error - 0.6357916) <= 1e-4, note,
                    "n=1 distance " + fmt(single.rows[0].error));
    RioResult swept = rio_study({4, 16, 64, 256, 1024}, 2.0, 1000000);
    ok &= check(swept.fit.fitted, note, "rio fit missing");
    ok &= check(swept.fit.slope >= -0.6 && swept.fit.slope <= -0.45, note,
                "rio slope " + fmt(swept.fit.slope));
    ok &= check(swept.fit.r_squared >= 0.98, note, "rio r^2 " + fmt(swept.fit.r_squared));
    return ok;
}

// ---------------------------------------------------------------- criterion 5
bool theorem_rates(std::string& note) {
    struct Config {
        std::string id;
        ProblemParams params;
        std::string tag;
    };
    std::vector<Config> configs;
    {
        ProblemParams p;
        p.eps = 0.5;
        configs.push_back({"holder-g", p, "holder eps=0.5"});
        p.eps = 1.0;
        configs.push_back({"holder-g", p, "holder eps=1"});
        ProblemParams m;
        m.lambda = 1.0;
        m.mu = 1.0;
        configs.push_back({"manufactured", m, "manufactured (1,1)"});
    }
    bool ok = true;
    for (const auto& config : configs) {
        StudySpec spec;
        spec.problem_id = config.id;
        spec.params = config.params;
        spec.n_list = {16, 64, 256, 1024, 4096};
        spec.eval_times = {0.5};
        spec.r_list = {1.0};
        spec.targets = {"pointwise_u", "law_Y", "law_Z"};
        ConvergenceResult result = run_convergence(spec);
        for (const auto& [key, fit] : result.fits) {
            bool fit_ok = fit_passes(fit, result.rate_bound);
            if (!fit_ok) {
                std::string detail = config.tag + " " + key;
                if (fit.fitted)
                    detail += " slope " + fmt(fit.slope) + " r2 " + fmt(fit.r_squared) +
                              " (bound " + fmt(-result.rate_bound + kSlopeTolerance) + ")";
                ok = check(false, note, detail);
            }
        }
    }
    return ok;
}

// ---------------------------------------------------------------- criterion 6
bool time_rough_rate(std::string& note) {
    StudySpec spec;
    spec.problem_id = "time-rough";
    spec.params.alpha = 0.25;
    spec.n_list = {16, 64, 256, 1024};
    spec.targets = {"pointwise_u"};
    ConvergenceResult result = run_convergence(spec);
    const RateFit& fit = result.fits.at("pointwise_u");
    bool ok = check(fit.fitted, note, "time-rough fit missing");
    if (fit.fitted) {
        ok &= check(fit.slope <= -0.25 + kSlopeTolerance, note,
                    "time-rough slope " + fmt(fit.slope));
        ok &= check(fit.r_squared >= kMinRSquared, note,
                    "time-rough r^2 " + fmt(fit.r_squared));
    }
    return ok;
}

// ---------------------------------------------------------------- criterion 7
bool z_prefactor(std::string& note) {
    ProblemParams params;
    params.eps = 0.5;
    ProblemSpec problem = make_problem("holder-g", params);
    auto rows = near_horizon_z_sweep(problem, 1024, 6, 1000000);
    bool ok = check(rows.size() == 6, note, "sweep produced " + std::to_string(rows.size()) +
                                                " points");
    if (!rows.empty()) {
        double lo = rows[0].scaled, hi = rows[0].scaled;
        for (const auto& row : rows) {
            lo = std::min(lo, row.scaled);
            hi = std::max(hi, row.scaled);
        }
        ok &= check(hi <= 3.0 * lo, note,
                    "scaled z-error spread " + fmt(hi / lo) + " exceeds 3");
    }
    return ok;
}

// ---------------------------------------------------------------- criterion 8
bool regularity_criterion(std::string& note) {
    bool ok = true;
    StudySpec defaults;
    {
        ProblemParams params;
        params.eps = 0.5;
        ProblemSpec problem = make_problem("holder-g", params);
        RegularityReport report =
            regularity_suite(problem, select_oracle(problem, defaults));
        for (const auto& q : report.quantities)
            ok &= check(q.finite && q.variation <= 0.20, note,
                        "holder eps=0.5 " + q.name + " variation " + fmt(q.variation));
    }
    {
        ProblemParams params;
        params.lambda = 1.0;
        params.mu = 1.0;
        ProblemSpec problem = make_problem("manufactured", params);
        RegularityReport report =
            regularity_suite(problem, select_oracle(problem, defaults));
        for (const auto& q : report.quantities)
            ok &= check(q.finite && q.variation <= 0.20, note,
                        "manufactured " + q.name + " variation " + fmt(q.variation));
    }
    return ok;
}

// ---------------------------------------------------------------- criterion 9
bool smoothing_bound(std::string& note) {
    Generator f;
    f.eval = [](double, double x, double, double) { return std::sqrt(std::abs(x)); };
    f.eps = 0.5;
    f.norm_x = 1.0;
    bool ok = true;
    for (double eta : {1.0, 10.0, 100.0}) {
        SmoothingParams params;
        params.eta = eta;
        Generator smoothed = inf_convolve(f, params);
        const int count = 10000;
        double gap = 0.0;
        double prev = smoothed.eval(0.0, -2.0, 0.0, 0.0);
        const double step = 4.0 / (count - 1);
        for (int i = 0; i < count; ++i) {
            double x = -2.0 + step * i;
            double fv = f.eval(0.0, x, 0.0, 0.0);
            double sv = smoothed.eval(0.0, x, 0.0, 0.0);
            ok &= check(sv <= fv + 1e-10, note, "minorant violated at x=" + fmt(x));
            if (i > 0)
                ok &= check(std::abs(sv - prev) <= eta * step + 1e-8, note,
                            "Lipschitz level exceeded at x=" + fmt(x));
            gap = std::max(gap, fv - sv);
            prev = sv;
        }
        ok &= check(gap <= 0.25 / eta + 1e-9, note,
                    "eta=" + fmt(eta) + " gap " + fmt(gap) + " above bound " + fmt(0.25 / eta));
        if (!ok) break;
    }
    return ok;
}

// --------------------------------------------------------------- criterion 10
bool stability_criterion(std::string& note) {
    bool ok = true;
    {
        ProblemSpec problem = linear_generator_problem(1.0, 1.0);
        std::vector<Perturbation> perturbations;
        for (double size : {1e-3, 1e-2, 1e-1}) {
            Perturbation p;
            p.label = "dg";
            p.size = size;
            p.dg = [size](double) { return size; };
            perturbations.push_back(std::move(p));
        }
        auto rows = stability_study(problem, perturbations, 64);
        for (size_t i = 1; i < rows.size(); ++i) {
            double ratio = rows[i].sup_y / rows[i - 1].sup_y;
            ok &= check(ratio >= 9.0 && ratio <= 11.0, note,
                        "perturbation ratio " + fmt(ratio));
        }
    }
    {
        ProblemParams params;
        params.eps = 1.0;
        ProblemSpec problem = make_problem("holder-g", params);
        Perturbation p;
        p.label = "dg";
        p.size = 0.01;
        p.dg = [](double) { return 0.01; };
        auto rows = stability_study(problem, {p}, 64);
        ok &= check(std::abs(rows[0].sup_y - 0.01) <= 1e-12, note,
                    "constant shift sup_y " + fmt(rows[0].sup_y));
        ok &= check(rows[0].z_norm <= 1e-20, note, "constant shift z_norm " +
                                                        fmt(rows[0].z_norm));
    }
    return ok;
}

// --------------------------------------------------------------- criterion 11
bool determinism(std::string& note) {
    StudySpec spec;
    spec.problem_id = "holder-g";
    spec.params.eps = 0.5;
    spec.n_list = {8, 16, 32, 64};
    spec.eval_times = {0.5};
    spec.targets = {"pointwise_u", "law_Y", "law_Z"};
    spec.quantile_count = 200000;
    ConvergenceResult first = run_convergence(spec);
    ConvergenceResult second = run_convergence(spec);
    bool ok = check(to_csv(first.rows) == to_csv(second.rows), note, "CSV outputs differ");
    ok &= check(summary_json(first, "det") == summary_json(second, "det"), note,
                "JSON summaries differ");
    RioResult rio_a = rio_study({4, 16, 64}, 1.0, 1000000);
    RioResult rio_b = rio_study({4, 16, 64}, 1.0, 1000000);
    ok &= check(to_csv(rio_a.rows) == to_csv(rio_b.rows), note, "rio CSV outputs differ");
    return ok;
}

}  // namespace

int main() {
    std::vector<Criterion> criteria = {
        {1, "exactness on affine data", 1.0, exactness_suite},
        {2, "closed-form linear recursion", 1.0, closed_form_recursion},
        {3, "gradient representation identity", 10.0, representation_identity},
        {4, "walk vs normal W2 rate", 60.0, rio_rate},
        {5, "Wasserstein convergence rates", 300.0, theorem_rates},
        {6, "time-rough generator rate", 120.0, time_rough_rate},
        {7, "near-horizon Z prefactor", 60.0, z_prefactor},
        {8, "regularity suite", 120.0, regularity_criterion},
        {9, "smoothing uniform bound", 10.0, smoothing_bound},
        {10, "a-priori stability scaling", 30.0, stability_criterion},
        {11, "byte-identical reruns", 120.0, determinism},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        std::string detail;
        auto start = std::chrono::steady_clock::now();
        bool ok = false;
        try {
            ok = criterion.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (elapsed > criterion.budget_seconds) {
            ok = false;
            if (detail.empty())
                detail = "runtime " + fmt(elapsed) + "s over budget " +
                         fmt(criterion.budget_seconds) + "s";
        }
        std::printf("criterion %2d: %s  %-36s (%.2fs)%s%s\n", criterion.number,
                    ok ? "PASS" : "FAIL", criterion.label.c_str(), elapsed,
                    detail.empty() ? "" : "  -- ", detail.c_str());
        std::fflush(stdout);
        failures += ok ? 0 : 1;
    }
    if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
