#include "walkbsde/problem.hpp"

#include <cmath>
#include <stdexcept>

#include "walkbsde/normal.hpp"

namespace walkbsde {

namespace {

// Deterministic 64-bit LCG mapped to [0,1); sampling helpers must be
// reproducible run to run.
struct Lcg {
    unsigned long long state;
    explicit Lcg(unsigned long long seed) : state(seed) {}
    double next() {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        return static_cast<double>(state >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * next(); }
};

}  // namespace

Generator Generator::zero() {
    Generator f;
    f.eval = [](double, double, double, double) { return 0.0; };
    f.is_zero = true;
    return f;
}

TerminalCondition holder_terminal(double eps, double scale) {
    if (!(eps > 0.0) || !(eps <= 1.0))
        throw std::invalid_argument("holder exponent must lie in (0,1]");
    TerminalCondition g;
    g.eps = eps;
    g.holder_norm = std::abs(scale);
    g.label = "holder|x|^" + std::to_string(eps);
    g.kinks = {0.0};
    if (eps == 1.0) {
        g.eval = [scale](double x) { return scale * std::abs(x); };
    } else {
        g.eval = [scale, eps](double x) { return scale * std::pow(std::abs(x), eps); };
    }
    return g;
}

ProblemSpec manufactured_problem(const SmoothField& u_star, double lambda, double mu,
                                 double horizon) {
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");

    auto value = u_star.value;
    auto dt = u_star.dt;
    auto dx = u_star.dx;
    auto dxx = u_star.dxx;

    ProblemSpec spec;
    spec.id = "manufactured";
    spec.horizon = horizon;

    spec.terminal.eval = [value, horizon](double x) { return value(horizon, x); };
    spec.terminal.eps = 1.0;
    spec.terminal.label = "u*(T,.)";

    Generator f;
    f.eval = [value, dt, dx, dxx, lambda, mu](double t, double x, double y, double z) {
        double sol = value(t, x);
        double grad = dx(t, x);
        return -dt(t, x) - 0.5 * dxx(t, x) + lambda * (y - sol) + mu * (z - grad);
    };
    f.norm_y = std::abs(lambda);
    f.norm_z = std::abs(mu);
    f.alpha = 1.0;
    f.eps = 1.0;

    // Sampled estimates of the x/t moduli and of K_f; exact values can be
    // written over these by library constructors that know them.
    const double x_lo = -6.0, x_hi = 6.0;
    const double delta = 1e-5;
    double fx = 0.0, ft = 0.0, kf = 0.0, gnorm = 0.0;
    for (int i = 0; i <= 48; ++i) {
        double t = horizon * i / 48.0;
        kf = std::max(kf, std::abs(f.eval(t, 0.0, 0.0, 0.0)));
        for (int j = 0; j <= 96; ++j) {
            double x = x_lo + (x_hi - x_lo) * j / 96.0;
            double base = f.eval(t, x, 0.0, 0.0);
            fx = std::max(fx, std::abs(f.eval(t, x + delta, 0.0, 0.0) - base) / delta);
            if (t + delta <= horizon)
                ft = std::max(ft, std::abs(f.eval(t + delta, x, 0.0, 0.0) - base) / delta);
            if (i == 48)
                gnorm = std::max(gnorm, std::abs(dx(horizon, x)));
        }
    }
    f.norm_x = 1.1 * fx;
    f.norm_t = 1.1 * ft;
    f.k_f = kf;
    spec.terminal.holder_norm = 1.1 * gnorm;
    spec.generator = std::move(f);

    ContinuousSolution exact;
    exact.u = value;
    exact.grad_u = dx;
    exact.method = ContinuousSolution::Method::Manufactured;
    exact.accuracy = 0.0;
    spec.exact = std::move(exact);
    return spec;
}

ProblemSpec linear_generator_problem(double lambda, double horizon) {
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
    ProblemSpec spec;
    spec.id = "linear";
    spec.horizon = horizon;

    spec.terminal.eval = [](double) { return 1.0; };
    spec.terminal.eps = 1.0;
    spec.terminal.holder_norm = 0.0;
    spec.terminal.label = "one";

    Generator f;
    f.eval = [lambda](double, double, double y, double) { return lambda * y; };
    f.norm_y = std::abs(lambda);
    spec.generator = std::move(f);

    ContinuousSolution exact;
    exact.u = [lambda, horizon](double t, double) { return std::exp(lambda * (horizon - t)); };
    exact.grad_u = [](double, double) { return 0.0; };
    exact.method = ContinuousSolution::Method::ClosedForm;
    spec.exact = std::move(exact);
    return spec;
}

namespace {

ProblemSpec affine_problem(double intercept, double slope, double horizon) {
    ProblemSpec spec;
    spec.id = "affine";
    spec.horizon = horizon;
    spec.terminal.eval = [intercept, slope](double x) { return intercept + slope * x; };
    spec.terminal.eps = 1.0;
    spec.terminal.holder_norm = std::abs(slope);
    spec.terminal.label = "affine";
    spec.generator = Generator::zero();

    ContinuousSolution exact;
    exact.u = [intercept, slope](double, double x) { return intercept + slope * x; };
    exact.grad_u = [slope](double, double) { return slope; };
    exact.method = ContinuousSolution::Method::ClosedForm;
    spec.exact = std::move(exact);
    return spec;
}

ProblemSpec holder_problem(double eps, double scale, double horizon) {
    ProblemSpec spec;
    spec.id = "holder-g";
    spec.horizon = horizon;
    spec.terminal = holder_terminal(eps, scale);
    spec.generator = Generator::zero();

    if (eps == 1.0) {
        // E|x + sigma G| has a closed form; the eps < 1 members rely on the
        // quadrature oracle instead.
        ContinuousSolution exact;
        exact.u = [scale, horizon](double t, double x) {
            double sigma = std::sqrt(horizon - t);
            if (sigma == 0.0) return scale * std::abs(x);
            double a = x / sigma;
            return scale * (x * (2.0 * normal_cdf(a) - 1.0) + 2.0 * sigma * normal_pdf(a));
        };
        exact.grad_u = [scale, horizon](double t, double x) {
            double sigma = std::sqrt(horizon - t);
            return scale * (2.0 * normal_cdf(x / sigma) - 1.0);
        };
        exact.method = ContinuousSolution::Method::ClosedForm;
        spec.exact = std::move(exact);
    }
    return spec;
}

ProblemSpec manufactured_sine_problem(double lambda, double mu, double horizon) {
    SmoothField field;
    field.value = [horizon](double t, double x) {
        return std::sin(x) * std::exp(-0.5 * (horizon - t));
    };
    field.dt = [horizon](double t, double x) {
        return 0.5 * std::sin(x) * std::exp(-0.5 * (horizon - t));
    };
    field.dx = [horizon](double t, double x) {
        return std::cos(x) * std::exp(-0.5 * (horizon - t));
    };
    field.dxx = [horizon](double t, double x) {
        return -std::sin(x) * std::exp(-0.5 * (horizon - t));
    };
    ProblemSpec spec = manufactured_problem(field, lambda, mu, horizon);
    // -dt u* - 1/2 dxx u* vanishes for this field, so the moduli are exact.
    spec.generator.norm_x = std::hypot(lambda, mu);
    spec.generator.norm_t = 0.5 * std::hypot(lambda, mu);
    spec.generator.k_f = std::abs(mu);
    spec.terminal.holder_norm = 1.0;
    spec.terminal.label = "sin";
    return spec;
}

// Exact solution sin(x) e^{-(T-t)/2} + c(t) cos(x) with c(t) = (T-t)^{1+a}/(1+a);
// the generator it manufactures is ((T-t)^a + c(t)/2) cos(x), whose leading
// term is only alpha-Holder in time.
ProblemSpec time_rough_problem(double alpha, double horizon) {
    if (!(alpha > 0.0) || !(alpha > 0.0 && alpha <= 1.0))
        throw std::invalid_argument("time exponent must lie in (0,1]");
    const double T = horizon;
    auto c = [alpha, T](double t) { return std::pow(T - t, 1.0 + alpha) / (1.0 + alpha); };

    ProblemSpec spec;
    spec.id = "time-rough";
    spec.horizon = T;
    spec.terminal.eval = [](double x) { return std::sin(x); };
    spec.terminal.eps = 1.0;
    spec.terminal.holder_norm = 1.0;
    spec.terminal.label = "sin";

    Generator f;
    f.eval = [alpha, T, c](double t, double x, double, double) {
        double tau = std::max(T - t, 0.0);
        return (std::pow(tau, alpha) + 0.5 * c(t)) * std::cos(x);
    };
    f.alpha = alpha;
    f.eps = 1.0;
    f.norm_t = 1.0 + 0.5 * T;
    f.norm_x = std::pow(T, alpha) + std::pow(T, 1.0 + alpha) / (2.0 * (1.0 + alpha));
    f.k_f = f.norm_x;
    spec.generator = std::move(f);

    ContinuousSolution exact;
    exact.u = [T, c](double t, double x) {
        return std::sin(x) * std::exp(-0.5 * (T - t)) + c(t) * std::cos(x);
    };
    exact.grad_u = [T, c](double t, double x) {
        return std::cos(x) * std::exp(-0.5 * (T - t)) - c(t) * std::sin(x);
    };
    exact.method = ContinuousSolution::Method::Manufactured;
    spec.exact = std::move(exact);
    return spec;
}

}  // namespace

ProblemSpec make_problem(const std::string& id, const ProblemParams& params) {
    ProblemSpec spec;
    if (id == "affine")
        spec = affine_problem(params.intercept, params.slope, params.horizon);
    else if (id == "holder-g")
        spec = holder_problem(params.eps, params.scale, params.horizon);
    else if (id == "linear")
        spec = linear_generator_problem(params.lambda, params.horizon);
    else if (id == "manufactured")
        spec = manufactured_sine_problem(params.lambda, params.mu, params.horizon);
    else if (id == "time-rough")
        spec = time_rough_problem(params.alpha, params.horizon);
    else {
        std::string msg = "unknown problem id '" + id + "'; available:";
        for (const auto& [name, hint] : list_problems()) msg += " " + name;
        throw std::invalid_argument(msg);
    }
    spec.start_x = params.x0;
    return spec;
}

std::vector<std::pair<std::string, std::string>> list_problems() {
    return {
        {"affine", "g = a + b x, f = 0 (scheme-exact case); params: intercept, slope"},
        {"holder-g", "g = scale |x|^eps, f = 0; params: eps in (0,1], scale"},
        {"linear", "g = 1, f = lambda y; exact u = exp(lambda (T-t))"},
        {"manufactured", "u* = sin(x) exp(-(T-t)/2); params: lambda, mu"},
        {"time-rough", "generator with a |T-t|^alpha cos(x) term; params: alpha"},
    };
}

double holder_violation(const TerminalCondition& g, double lo, double hi, int pairs) {
    Lcg rng(0x5eedULL);
    double worst = -1.0;
    for (int i = 0; i < pairs; ++i) {
        double x = rng.uniform(lo, hi);
        double xp = rng.uniform(lo, hi);
        double bound = g.holder_norm * std::pow(std::abs(x - xp), g.eps);
        double diff = std::abs(g.eval(x) - g.eval(xp));
        worst = std::max(worst, (diff - bound) / std::max(1.0, bound));
    }
    return worst;
}

double generator_violation(const Generator& f, double horizon, double lo, double hi, int pairs) {
    Lcg rng(0xfeedULL);
    double worst = -1.0;
    for (int i = 0; i < pairs; ++i) {
        double t = rng.uniform(0.0, horizon);
        double tp = rng.uniform(0.0, horizon);
        double x = rng.uniform(lo, hi);
        double xp = rng.uniform(lo, hi);
        double y = rng.uniform(-3.0, 3.0);
        double yp = rng.uniform(-3.0, 3.0);
        double z = rng.uniform(-3.0, 3.0);
        double zp = rng.uniform(-3.0, 3.0);
        double bound = f.norm_t * std::pow(std::abs(t - tp), f.alpha) +
                       f.norm_x * std::pow(std::abs(x - xp), f.eps) +
                       f.norm_y * std::abs(y - yp) + f.norm_z * std::abs(z - zp);
        double diff = std::abs(f.eval(t, x, y, z) - f.eval(tp, xp, yp, zp));
        worst = std::max(worst, (diff - bound) / std::max(1.0, bound));
    }
    return worst;
}

}  // namespace walkbsde
