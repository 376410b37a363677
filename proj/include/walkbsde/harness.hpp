#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "walkbsde/continuous_solution.hpp"
#include "walkbsde/problem.hpp"

namespace walkbsde {

// Pinned acceptance policy: proven rates are upper bounds, so a fitted slope
// passes when it is at least as steep as the bound minus the tolerance.
constexpr double kSlopeTolerance = 0.07;
constexpr double kMinRSquared = 0.9;

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::vector<std::pair<double, double>> points;  // (n, error), positive errors only
    std::vector<long> exact_ns;                     // n with error at the zero floor
    bool fitted = false;
};

/// Least squares of log(error) on log(n); needs >= 3 positive points.
RateFit fit_rate(const std::vector<std::pair<double, double>>& points);

/// alpha ∧ eps/2, the proven convergence exponent for the problem.
double expected_rate(const ProblemSpec& problem);

/// slope <= -rate_bound + kSlopeTolerance with r_squared >= kMinRSquared;
/// a study whose errors all sit at the zero floor passes as exact.
bool fit_passes(const RateFit& fit, double rate_bound);

struct StudySpec {
    std::string problem_id = "holder-g";
    ProblemParams params;
    std::vector<long> n_list;
    std::vector<double> eval_times;  // law evaluation times s
    std::vector<double> r_list = {1.0};
    std::vector<std::string> targets = {"pointwise_u"};
    std::string oracle_policy = "auto";  // auto|closed-form|heat|picard|self-refined
    int quad_nodes = 400;
    long quantile_count = 1000000;
    long self_refine_n = 8192;
};

struct ErrorRow {
    long n = 0;
    std::string target;
    double t = 0.0;  // anchor time
    double s = 0.0;  // evaluation time actually used
    double r = 0.0;  // Wasserstein order, 0 for pointwise targets
    double error = 0.0;
    double oracle_accuracy = 0.0;
};

struct ConvergenceResult {
    std::vector<ErrorRow> rows;
    std::map<std::string, RateFit> fits;  // "target" or "target@s=..,r=.."
    double rate_bound = 0.0;
    std::string oracle_method;
    double oracle_accuracy = 0.0;
    bool pass = false;
};

/// Per-n error table for the requested targets, with log-log fits per
/// (target, time, order). Aborts with OracleTooCoarseError when the oracle
/// accuracy is not <= 1/10 of the smallest measured error.
ConvergenceResult run_convergence(const StudySpec& spec);

/// Resolves the oracle for a problem following the precedence
/// closed-form/manufactured > heat-quadrature > picard > self-refined.
ContinuousSolution select_oracle(const ProblemSpec& problem, const StudySpec& spec);

struct RioResult {
    std::vector<ErrorRow> rows;
    RateFit fit;
    bool pass = false;
};

/// W_r between the n-step walk at the horizon and a Gaussian quantile
/// sample; the fitted slope tracks the n^{-1/2} law.
RioResult rio_study(const std::vector<long>& n_list, double r, long quantile_count,
                    double horizon = 1.0);

struct HolderStudyResult {
    std::vector<ErrorRow> rows;  // targets holder_E and holder_weighted
    RateFit plain;
    RateFit weighted;
    bool pass = false;
};

/// |E g(B^n_T) - E g(B_T)| and the (B^n_T - x)-weighted variant, walk side
/// summed exactly, Brownian side by quadrature.
HolderStudyResult holder_expectation_study(const TerminalCondition& g,
                                           const std::vector<long>& n_list, double horizon);

struct Perturbation {
    std::string label;
    double size = 0.0;
    std::function<double(double)> dg;                                  // added to g
    std::function<double(double, double, double, double)> df;         // added to f, optional
};

struct StabilityRow {
    std::string label;
    double size = 0.0;
    double sup_y = 0.0;
    double z_norm = 0.0;
};

/// solution_distance between the base problem and each perturbed copy at a
/// fixed n; ratios between consecutive sizes certify the linear scaling of
/// the a-priori estimate.
std::vector<StabilityRow> stability_study(const ProblemSpec& problem,
                                          const std::vector<Perturbation>& perturbations,
                                          long n);

struct ScaledQuantity {
    std::string name;
    double base = 0.0;
    double refined = 0.0;
    double variation = 0.0;  // |base-refined| / max(|base|,|refined|)
    bool finite = false;
};

struct RegularityReport {
    std::vector<ScaledQuantity> quantities;
    bool pass = false;  // all finite, variation <= 20%
};

/// Scaled regularity quantities of u, grad u, U^n and Delta^n (blow-up
/// factors divided out), each evaluated at a base and a refined level.
RegularityReport regularity_suite(const ProblemSpec& problem, const ContinuousSolution& oracle);

struct ZSweepRow {
    double s = 0.0;
    double error = 0.0;
    double scaled = 0.0;  // sqrt(T-s) * error
};

/// Near-horizon sweep s = T(1-2^{-j}) at fixed n; the scaled column should
/// stay within a constant factor when the 1/sqrt(T-s) prefactor is genuine.
std::vector<ZSweepRow> near_horizon_z_sweep(const ProblemSpec& problem, long n, int j_max,
                                            long quantile_count);

/// CSV with one row per (n,target,t,s,r): deterministic order and 17
/// significant digits.
std::string to_csv(const std::vector<ErrorRow>& rows);

/// JSON summary with one RateFit per target plus pass/fail flags.
std::string summary_json(const ConvergenceResult& result, const std::string& study_name);

}  // namespace walkbsde
