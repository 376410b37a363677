#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "walkbsde/continuous_solution.hpp"

namespace walkbsde {

/// Terminal condition g with its declared Holder regularity. Kink locations
/// steer the quadrature oracles; they are hints, not part of the contract.
struct TerminalCondition {
    std::function<double(double)> eval;
    double eps = 1.0;         // Holder exponent in (0,1]
    double holder_norm = 0.0; // ||g||_eps
    std::string label;
    std::vector<double> kinks;
};

/// Generator f(t,x,y,z) with the declared regularity moduli. The norms are
/// declared by the problem author and validated by sampling, not derived.
struct Generator {
    std::function<double(double, double, double, double)> eval;
    double alpha = 1.0;   // time-Holder exponent in (0,1]
    double eps = 1.0;     // space-Holder exponent in (0,1]
    double norm_t = 0.0;  // ||f_t||_alpha
    double norm_x = 0.0;  // ||f_x||_eps
    double norm_y = 0.0;  // ||f_y||_Lip
    double norm_z = 0.0;  // ||f_z||_Lip
    double k_f = 0.0;     // sup_t |f(t,0,0,0)|
    bool is_zero = false;

    double lip() const { return norm_y > norm_z ? norm_y : norm_z; }

    static Generator zero();
};

struct ProblemSpec {
    std::string id;
    TerminalCondition terminal;
    Generator generator;
    double horizon = 1.0;
    double start_time = 0.0;
    double start_x = 0.0;
    std::optional<ContinuousSolution> exact;
};

/// g(x) = scale * |x|^eps with ||g||_eps = scale.
TerminalCondition holder_terminal(double eps, double scale);

/// Smooth field with the derivatives needed to reverse-engineer a generator.
struct SmoothField {
    std::function<double(double, double)> value;  // (t,x)
    std::function<double(double, double)> dt;
    std::function<double(double, double)> dx;
    std::function<double(double, double)> dxx;
};

/// Builds the problem whose exact solution is u_star:
///   f(t,x,y,z) = -dt u* - 1/2 dxx u* + lambda (y - u*) + mu (z - dx u*),
/// terminal g = u*(T,.). Space/time moduli of f are estimated by sampling
/// unless the caller overrides them afterwards.
ProblemSpec manufactured_problem(const SmoothField& u_star, double lambda, double mu,
                                 double horizon);

/// g == 1, f = lambda*y; exact u(t,x) = exp(lambda (T-t)), grad u == 0.
ProblemSpec linear_generator_problem(double lambda, double horizon);

// Built-in library -----------------------------------------------------------

struct ProblemParams {
    double eps = 0.5;
    double scale = 1.0;
    double lambda = 1.0;
    double mu = 0.0;
    double alpha = 0.25;
    double horizon = 1.0;
    double x0 = 0.0;         // study anchor point
    double intercept = 0.0;  // affine terminal a + b x
    double slope = 1.0;
};

/// Instantiates a library problem by identifier: affine | holder-g | linear |
/// manufactured | time-rough. Unknown ids raise invalid_argument listing the
/// available ones.
ProblemSpec make_problem(const std::string& id, const ProblemParams& params = {});

/// Library identifiers with their parameter hints, for CLI listing.
std::vector<std::pair<std::string, std::string>> list_problems();

/// Deterministic spot check of the declared Holder/Lipschitz moduli on a
/// sampled pair grid; returns the largest violation (negative when all
/// inequalities hold with slack).
double holder_violation(const TerminalCondition& g, double lo, double hi, int pairs);
double generator_violation(const Generator& f, double horizon, double lo, double hi, int pairs);

}  // namespace walkbsde
