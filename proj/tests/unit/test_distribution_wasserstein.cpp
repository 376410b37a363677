#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "walkbsde/distribution.hpp"
#include "walkbsde/wasserstein.hpp"

using namespace walkbsde;

namespace {

Distribution1D rademacher() {
    Eigen::ArrayXd pts(2), probs(2);
    pts << -1.0, 1.0;
    probs << 0.5, 0.5;
    return Distribution1D::finite(pts, probs);
}

// deterministic small finite laws for property checks
Distribution1D small_law(unsigned long long seed, int atoms) {
    auto next = [&seed]() {
        seed = seed * 6364136223846793005ULL + 1442695040888963407ULL;
        return static_cast<double>(seed >> 11) * 0x1.0p-53;
    };
    Eigen::ArrayXd pts(atoms), probs(atoms);
    double prev = -5.0;
    double total = 0.0;
    for (int i = 0; i < atoms; ++i) {
        prev += 0.05 + 2.0 * next();
        pts[i] = prev;
        probs[i] = 0.1 + next();
        total += probs[i];
    }
    probs /= total;
    probs[atoms - 1] += 1.0 - probs.sum();  // exact normalization
    return Distribution1D::finite(pts, probs);
}

}  // namespace

TEST_CASE("gaussian quantile construction") {
    Distribution1D degenerate = gaussian_quantiles(3.0, 0.0, 5);
    CHECK((degenerate.values() == 3.0).all());

    Distribution1D two = gaussian_quantiles(0.0, 1.0, 2);
    CHECK(two.values()[0] == doctest::Approx(-0.6744897501960817).epsilon(1e-12));
    CHECK(two.values()[1] == doctest::Approx(0.6744897501960817).epsilon(1e-12));

    Distribution1D sample = gaussian_quantiles(0.0, 1.0, 101);
    for (Eigen::Index i = 0; i < sample.size(); ++i)
        CHECK(sample.values()[i] == -sample.values()[sample.size() - 1 - i]);  // exact mirror

    CHECK_THROWS_AS(gaussian_quantiles(0.0, -1.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(gaussian_quantiles(0.0, 1.0, 1), std::invalid_argument);
}

TEST_CASE("pushforward basics") {
    Distribution1D law = rademacher();
    Distribution1D same = pushforward(law, [](double x) { return x; });
    CHECK(same.values()[0] == -1.0);
    CHECK(same.values()[1] == 1.0);

    Distribution1D constant = pushforward(law, [](double) { return 2.5; });
    REQUIRE(constant.size() == 1);
    CHECK(constant.values()[0] == 2.5);
    CHECK(constant.probs()[0] == 1.0);

    Distribution1D squared = pushforward(law, [](double x) { return x * x; });
    REQUIRE(squared.size() == 1);
    CHECK(squared.values()[0] == 1.0);
    CHECK(squared.probs()[0] == doctest::Approx(1.0));
}

TEST_CASE("wasserstein atoms and identity") {
    Distribution1D a = Distribution1D::point_mass(1.25);
    Distribution1D b = Distribution1D::point_mass(-0.5);
    for (double r : {1.0, 2.0, 3.5}) {
        CHECK(wasserstein_r(a, a, r) == 0.0);
        CHECK(wasserstein_r(a, b, r) == doctest::Approx(1.75).epsilon(1e-14));
    }
    CHECK_THROWS_AS(wasserstein_r(a, b, 0.5), std::invalid_argument);
}

TEST_CASE("rademacher against the normal") {
    Distribution1D gauss = gaussian_quantiles(0.0, 1.0, 1000000);
    double w2 = wasserstein_r(rademacher(), gauss, 2.0);
    CHECK(w2 == doctest::Approx(0.63579153690047596).epsilon(2e-4));
    double w1 = wasserstein_r(rademacher(), gauss, 1.0);
    CHECK(w1 == doctest::Approx(0.53537732154787984).epsilon(2e-4));

    std::vector<std::function<double(double)>> fns = {
        [](double x) { return x; },
        [](double x) { return std::abs(x); },
    };
    double lower = w1_dual_lower_bound(rademacher(), gauss, fns);
    CHECK(lower == doctest::Approx(0.20211543919713464).epsilon(2e-4));
    CHECK(lower <= w1 + 1e-10);
}

TEST_CASE("dual bound sandwiched by W1") {
    std::vector<std::function<double(double)>> fns = {
        [](double x) { return x; },
        [](double x) { return std::abs(x); },
        [](double x) { return std::min(x, 0.0); },
        [](double x) { return std::max(-1.0, std::min(1.0, x)); },
    };
    for (unsigned long long seed = 1; seed <= 24; ++seed) {
        Distribution1D a = small_law(seed, 5);
        Distribution1D b = small_law(seed + 1000, 7);
        double w1 = wasserstein_r(a, b, 1.0);
        CHECK(w1_dual_lower_bound(a, b, fns) <= w1 + 1e-10);
        CHECK(w1_dual_lower_bound(a, a, fns) == 0.0);
    }
}

TEST_CASE("order monotonicity and triangle inequality") {
    for (unsigned long long seed = 1; seed <= 16; ++seed) {
        Distribution1D a = small_law(seed, 6);
        Distribution1D b = small_law(seed + 100, 4);
        Distribution1D c = small_law(seed + 200, 5);
        double w1 = wasserstein_r(a, b, 1.0);
        double w2 = wasserstein_r(a, b, 2.0);
        double w4 = wasserstein_r(a, b, 4.0);
        CHECK(w1 <= w2 + 1e-12);
        CHECK(w2 <= w4 + 1e-12);
        for (double r : {1.0, 2.0})
            CHECK(wasserstein_r(a, c, r) <=
                  wasserstein_r(a, b, r) + wasserstein_r(b, c, r) + 1e-12);
    }
}

TEST_CASE("translation behavior") {
    Distribution1D a = small_law(7, 6);
    Distribution1D b = small_law(77, 5);
    const double shift = 0.7331;
    auto move = [shift](double x) { return x + shift; };
    Distribution1D am = pushforward(a, move);
    Distribution1D bm = pushforward(b, move);
    for (double r : {1.0, 2.0})
        CHECK(wasserstein_r(am, bm, r) ==
              doctest::Approx(wasserstein_r(a, b, r)).epsilon(1e-12));
    double moved_one = wasserstein_r(am, b, 1.0);
    CHECK(std::abs(moved_one - wasserstein_r(a, b, 1.0)) <= shift + 1e-12);
}

TEST_CASE("quantile refinement converges") {
    double prev = 1.0;
    for (long m : {10000L, 40000L, 160000L}) {
        double gap = wasserstein_r(gaussian_quantiles(0.0, 1.0, m),
                                   gaussian_quantiles(0.0, 1.0, 4 * m), 1.0);
        CHECK(gap <= 5.0 / static_cast<double>(m));
        CHECK(gap < prev);
        prev = gap;
    }
}
