#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "walkbsde/quadrature.hpp"
#include "walkbsde/reference.hpp"

using namespace walkbsde;

TEST_CASE("heat oracle on affine data") {
    TerminalCondition g;
    g.eval = [](double x) { return x; };
    g.eps = 1.0;
    g.holder_norm = 1.0;
    ContinuousSolution sol = heat_solution(g, 1.0, 64);
    for (double t : {0.0, 0.5, 0.99})
        for (double x : {-1.0, 0.0, 2.0}) {
            CHECK(sol.u(t, x) == doctest::Approx(x).epsilon(1e-12));
            CHECK(sol.grad_u(t, x) == doctest::Approx(1.0).epsilon(1e-12));
        }
    CHECK(sol.u(1.0, 0.7) == 0.7);
    CHECK_THROWS_AS(sol.grad_u(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(sol.u(1.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(heat_solution(g, 1.0, 16), std::invalid_argument);
}

TEST_CASE("heat oracle second moment") {
    TerminalCondition g;
    g.eval = [](double x) { return x * x; };
    g.eps = 1.0;
    g.holder_norm = 1.0;
    ContinuousSolution sol = heat_solution(g, 1.0, 200);
    CHECK(sol.u(0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-11));  // E B_1^2
    CHECK(sol.u(0.5, 0.3) == doctest::Approx(0.3 * 0.3 + 0.5).epsilon(1e-11));
}

TEST_CASE("heat oracle for the square-root terminal") {
    ContinuousSolution sol = heat_solution(holder_terminal(0.5, 1.0), 1.0, 200);
    // E |B_1|^{1/2} and E |0.7 + B_1|^{1/2} from a 40-digit quadrature
    CHECK(sol.u(0.0, 0.0) == doctest::Approx(0.82217895866245855).epsilon(1e-9));
    CHECK(sol.u(0.0, 0.7) == doctest::Approx(0.91706332343494322).epsilon(1e-8));
    CHECK(sol.grad_u(0.3, 0.0) == doctest::Approx(0.0).epsilon(1e-12));  // odd integrand
    CHECK(sol.accuracy <= 1e-6);
}

TEST_CASE("heat oracle mean-value property") {
    ContinuousSolution sol = heat_solution(holder_terminal(0.5, 1.0), 1.0, 200);
    NormalRule rule = gauss_hermite(48);
    for (double t : {0.0, 0.25}) {
        double s = t + 0.375;
        for (double x : {-0.8, 0.4}) {
            double nested = rule.expect(
                [&](double z) { return sol.u(s, x + std::sqrt(s - t) * z); });
            CHECK(sol.u(t, x) == doctest::Approx(nested).epsilon(5e-7));
        }
    }
}

TEST_CASE("heat oracle gradient against finite differences") {
    TerminalCondition smooth;
    smooth.eval = [](double x) { return x * x; };
    smooth.eps = 1.0;
    smooth.holder_norm = 1.0;
    ContinuousSolution quadratic = heat_solution(smooth, 1.0, 200);
    for (double t : {0.25, 0.75})
        for (double x : {-1.0, 0.5}) {
            double fd = (quadratic.u(t, x + 1e-5) - quadratic.u(t, x - 1e-5)) / 2e-5;
            CHECK(quadratic.grad_u(t, x) == doctest::Approx(fd).epsilon(1e-6));
        }

    ContinuousSolution rooted = heat_solution(holder_terminal(0.5, 1.0), 1.0, 200);
    for (double x : {-1.0, 0.5, 1.5}) {  // away from the kink preimage
        double fd = (rooted.u(0.5, x + 1e-4) - rooted.u(0.5, x - 1e-4)) / 2e-4;
        double grad = rooted.grad_u(0.5, x);
        CHECK(std::abs(grad - fd) / std::max(1.0, std::abs(grad)) <= 1e-3);
    }
}

TEST_CASE("scaled gradient stays bounded toward the horizon") {
    ContinuousSolution sol = heat_solution(holder_terminal(0.5, 1.0), 1.0, 200);
    for (int j = 1; j <= 12; ++j) {
        double t = 1.0 - std::ldexp(1.0, -j);
        double worst = 0.0;
        for (double x : {-1.0, -0.3, 0.1, 0.7, 2.0})
            worst = std::max(worst, std::abs(sol.grad_u(t, x)));
        double scaled = std::pow(1.0 - t, 0.25) * worst;
        CHECK(std::isfinite(scaled));
        CHECK(scaled <= 2.0);  // E|Z|^{3/2} bounds the constant for ||g|| = 1
    }
}

TEST_CASE("picard with zero generator reproduces the heat oracle") {
    ProblemParams params;
    params.eps = 0.5;
    ProblemSpec problem = make_problem("holder-g", params);
    ContinuousSolution picard = picard_solution(problem, 64, MeshSpec{-6.0, 6.0, 193}, 10, 1e-8);
    ContinuousSolution heat = heat_solution(problem.terminal, 1.0, 200);
    for (double t : {0.0, 0.4})
        for (double x : {-1.0, 0.5})
            CHECK(picard.u(t, x) == doctest::Approx(heat.u(t, x)).epsilon(5e-4));
}

TEST_CASE("picard solves the linear generator") {
    // the time tables interpolate linearly, which floors the reachable
    // accuracy around 3e-4 at 64 levels; tol below that only tightens the
    // fixed-point part
    ProblemSpec problem = linear_generator_problem(1.0, 1.0);
    ContinuousSolution sol = picard_solution(problem, 64, MeshSpec{-2.0, 2.0, 9}, 40, 1e-4);
    CHECK(sol.u(0.0, 0.0) == doctest::Approx(std::exp(1.0)).epsilon(5e-4));
    CHECK(std::abs(sol.u(0.0, 0.0) - std::exp(1.0)) <= 5.0 * std::max(1e-4, sol.accuracy));
    CHECK(sol.accuracy <= 5e-3);
}

TEST_CASE("picard matches a manufactured solution with source") {
    ProblemParams params;
    params.lambda = 1.0;
    params.mu = 0.0;
    ProblemSpec problem = make_problem("manufactured", params);
    ContinuousSolution sol = picard_solution(problem, 64, MeshSpec{-8.0, 8.0, 257}, 40, 1e-3);
    for (double t : {0.0, 0.5})
        for (double x : {-0.9, 0.0, 1.2})
            CHECK(sol.u(t, x) == doctest::Approx(problem.exact->u(t, x)).epsilon(5e-3));
    CHECK(sol.grad_u(0.0, 0.3) ==
          doctest::Approx(problem.exact->grad_u(0.0, 0.3)).epsilon(2e-2));
}

TEST_CASE("picard rejects too few time levels") {
    ProblemSpec problem = linear_generator_problem(1.0, 1.0);
    CHECK_THROWS_AS(picard_solution(problem, 32, MeshSpec{}, 10, 1e-6), std::invalid_argument);
}

TEST_CASE("self-refined oracle") {
    ProblemParams affine;
    affine.intercept = 0.4;
    affine.slope = 1.3;
    ProblemSpec exact_problem = make_problem("affine", affine);
    ContinuousSolution refined = self_refined(exact_problem, 64);
    CHECK(refined.u(0.37, 0.3) == doctest::Approx(0.4 + 1.3 * 0.3).epsilon(1e-12));

    ProblemSpec linear = linear_generator_problem(1.0, 1.0);
    ContinuousSolution from_lattice = self_refined(linear, 4096);
    double err = std::abs(from_lattice.u(0.0, 0.0) - std::exp(1.0));
    CHECK(err < 5e-4);
    CHECK(err <= 4.0 * from_lattice.accuracy);

    CHECK_THROWS_AS(self_refined(linear, 32768), std::invalid_argument);
}
