#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "walkbsde/harness.hpp"

using namespace walkbsde;

TEST_CASE("rate fit on exact power laws") {
    std::vector<std::pair<double, double>> half_law;
    std::vector<std::pair<double, double>> flat;
    for (long n : {4L, 16L, 64L, 256L}) {
        half_law.push_back({static_cast<double>(n), 3.0 * std::pow(n, -0.5)});
        flat.push_back({static_cast<double>(n), 0.7});
    }
    RateFit fit = fit_rate(half_law);
    CHECK(fit.slope == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-10));

    RateFit constant = fit_rate(flat);
    CHECK(constant.slope == doctest::Approx(0.0).epsilon(1e-12));

    CHECK_THROWS_AS(fit_rate({{4.0, 0.1}, {8.0, 0.05}}), std::invalid_argument);
}

TEST_CASE("rate fit of the linear-generator recursion errors") {
    const double e = std::exp(1.0);
    std::vector<std::pair<double, double>> points;
    for (long n : {4L, 8L, 16L, 32L}) {
        double v = std::pow(1.0 - 1.0 / static_cast<double>(n), -static_cast<double>(n));
        points.push_back({static_cast<double>(n), std::abs(v - e)});
    }
    CHECK(points[0].second == doctest::Approx(0.442211998701).epsilon(1e-9));
    CHECK(points[1].second == doctest::Approx(0.192003539587).epsilon(1e-9));
    RateFit fit = fit_rate(points);
    CHECK(std::abs(fit.slope - (-1.0)) <= 0.15);
}

TEST_CASE("convergence study on the linear generator") {
    StudySpec spec;
    spec.problem_id = "linear";
    spec.params.lambda = 1.0;
    spec.params.horizon = 1.0;
    spec.n_list = {4, 8, 16, 32};
    spec.targets = {"pointwise_u"};
    ConvergenceResult result = run_convergence(spec);
    REQUIRE(result.rows.size() == 4);
    const double e = std::exp(1.0);
    for (size_t i = 0; i < result.rows.size(); ++i) {
        long n = spec.n_list[i];
        double expected =
            std::abs(std::pow(1.0 - 1.0 / static_cast<double>(n), -static_cast<double>(n)) - e);
        CHECK(result.rows[i].error == doctest::Approx(expected).epsilon(1e-9));
    }
    const RateFit& fit = result.fits.at("pointwise_u");
    CHECK(std::abs(fit.slope - (-1.0)) <= 0.15);
    CHECK(result.pass);
}

TEST_CASE("affine study is scheme-exact") {
    StudySpec spec;
    spec.problem_id = "affine";
    spec.params.intercept = 0.2;
    spec.params.slope = 1.4;
    spec.n_list = {4, 16, 64};
    spec.targets = {"pointwise_u", "pointwise_grad"};
    ConvergenceResult result = run_convergence(spec);
    for (const auto& row : result.rows) CHECK(row.error <= 1e-12);
    CHECK(result.pass);
    CHECK(result.fits.at("pointwise_u").exact_ns.size() == 3);
    CHECK_FALSE(result.fits.at("pointwise_u").fitted);
}

TEST_CASE("study results are deterministic") {
    StudySpec spec;
    spec.problem_id = "holder-g";
    spec.params.eps = 0.5;
    spec.n_list = {8, 16, 32, 64};
    spec.targets = {"pointwise_u", "law_Y"};
    spec.eval_times = {0.5};
    spec.quantile_count = 100000;
    ConvergenceResult first = run_convergence(spec);
    ConvergenceResult second = run_convergence(spec);
    CHECK(to_csv(first.rows) == to_csv(second.rows));
    CHECK(summary_json(first, "study") == summary_json(second, "study"));
}

TEST_CASE("unknown targets and bad n lists are rejected") {
    StudySpec spec;
    spec.problem_id = "affine";
    spec.n_list = {8, 8};
    CHECK_THROWS_AS(run_convergence(spec), std::invalid_argument);
    spec.n_list = {8, 16};
    spec.targets = {"bogus"};
    CHECK_THROWS_AS(run_convergence(spec), std::invalid_argument);
}

TEST_CASE("rio study anchors") {
    RioResult result = rio_study({1, 4, 16}, 2.0, 1000000);
    CHECK(result.rows[0].error == doctest::Approx(0.63579153690047596).epsilon(2e-4));
    CHECK(result.rows[1].error < result.rows[0].error);
    CHECK(result.rows[2].error < result.rows[1].error);
    CHECK(result.fit.fitted);
    CHECK_THROWS_AS(rio_study({1, 4}, 2.0, 1000), std::invalid_argument);
}

TEST_CASE("holder expectation study") {
    TerminalCondition affine;
    affine.eval = [](double x) { return 0.3 + 2.0 * x; };
    affine.eps = 1.0;
    affine.holder_norm = 2.0;
    HolderStudyResult exact = holder_expectation_study(affine, {4, 16, 64}, 1.0);
    for (const auto& row : exact.rows) CHECK(row.error <= 1e-12);
    CHECK(exact.pass);

    TerminalCondition square;
    square.eval = [](double x) { return x * x; };
    square.eps = 1.0;
    square.holder_norm = 2.0;
    HolderStudyResult moments = holder_expectation_study(square, {4, 16, 64}, 1.0);
    for (const auto& row : moments.rows) CHECK(row.error <= 1e-10);

    HolderStudyResult root =
        holder_expectation_study(holder_terminal(0.5, 1.0), {16, 64, 256, 1024}, 1.0);
    CHECK(root.plain.fitted);
    CHECK(root.plain.slope <= -0.25 + kSlopeTolerance);
    CHECK(root.pass);
}

TEST_CASE("stability study ratios") {
    ProblemSpec problem = linear_generator_problem(1.0, 1.0);
    std::vector<Perturbation> perturbations;
    perturbations.push_back({"zero", 0.0, nullptr, nullptr});
    for (double size : {1e-3, 1e-2, 1e-1}) {
        Perturbation p;
        p.label = "dg";
        p.size = size;
        p.dg = [size](double) { return size; };
        perturbations.push_back(std::move(p));
    }
    auto rows = stability_study(problem, perturbations, 64);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].sup_y == 0.0);
    CHECK(rows[0].z_norm == 0.0);
    for (size_t i = 2; i < rows.size(); ++i) {
        double ratio = rows[i].sup_y / rows[i - 1].sup_y;
        CHECK(ratio >= 9.0);
        CHECK(ratio <= 11.0);
    }

    // the stability constant does not grow with n: sup_y/delta stays inside
    // a fixed window ((1-h)^{-n} decreases toward e)
    Perturbation fixed;
    fixed.label = "dg";
    fixed.size = 0.01;
    fixed.dg = [](double) { return 0.01; };
    for (long n : {16L, 64L, 256L}) {
        auto row = stability_study(problem, {fixed}, n);
        double scale = row[0].sup_y / 0.01;
        CHECK(scale >= std::exp(1.0) - 1e-9);
        CHECK(scale <= 2.0 * std::exp(1.0));
    }
}

TEST_CASE("z-law slope bound survives the sqrt(T-s) prefactor") {
    StudySpec spec;
    spec.problem_id = "holder-g";
    spec.params.eps = 1.0;
    spec.n_list = {16, 64, 256, 1024};
    spec.eval_times = {0.5};
    spec.targets = {"law_Z"};
    spec.quantile_count = 200000;
    ConvergenceResult result = run_convergence(spec);
    std::vector<std::pair<double, double>> scaled;
    for (const auto& row : result.rows)
        scaled.push_back({static_cast<double>(row.n),
                          row.error * std::sqrt(1.0 - row.s)});
    RateFit fit = fit_rate(scaled);
    CHECK(fit.slope <= -result.rate_bound + kSlopeTolerance);
    CHECK(fit.r_squared >= kMinRSquared);
}

TEST_CASE("regularity suite on a closed-form problem") {
    ProblemParams params;
    params.eps = 1.0;
    ProblemSpec problem = make_problem("holder-g", params);
    StudySpec defaults;
    ContinuousSolution oracle = select_oracle(problem, defaults);
    RegularityReport report = regularity_suite(problem, oracle);
    CHECK(report.pass);
    for (const auto& q : report.quantities) {
        CHECK(q.finite);
        CHECK(q.variation <= 0.20);
    }
}

TEST_CASE("csv layout") {
    std::vector<ErrorRow> rows = {{8, "pointwise_u", 0.0, 0.0, 0.0, 0.125, 1e-9}};
    std::string csv = to_csv(rows);
    CHECK(csv == "n,target,t,s,r,error,oracle_accuracy\n8,pointwise_u,0,0,0,0.125,"
                 "1.0000000000000001e-09\n");
}
