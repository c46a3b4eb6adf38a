#include <doctest.h>

#include <limits>
#include <stdexcept>

#include "qadist/bound.hpp"
#include "qadist/rng.hpp"

using namespace qadist;

TEST_SUITE("bound") {

TEST_CASE("the hundred-sample error rate stays below five percent") {
    BoundParams params;  // n = 100, k = 8, eps = 0.2
    CHECK(kl_tail_bound(params) < 0.05);
}

TEST_CASE("the bound vanishes as epsilon grows") {
    BoundParams params;
    params.epsilon = 50.0;
    CHECK(kl_tail_bound(params) < 1e-300);
}

TEST_CASE("monotone decreasing in n past the documented knee") {
    BoundParams params;
    const int knee = bound_monotone_from(params.k, params.epsilon);
    CHECK(knee == 15);
    double previous = std::numeric_limits<double>::infinity();
    for (int n = knee; n <= 500; ++n) {
        params.n = n;
        const double value = kl_tail_bound(params);
        CHECK(value < previous);
        previous = value;
    }
}

TEST_CASE("monte carlo tail estimate") {
    CategoricalDistribution uniform8;
    for (int i = 0; i < 8; ++i) {
        uniform8.labels.push_back("c" + std::to_string(i));
        uniform8.probs.push_back(1.0 / 8.0);
    }
    auto rng = seeded_rng(77);

    SUBCASE("epsilon zero is always exceeded") {
        const auto estimate = kl_tail_monte_carlo(uniform8, 50, 0.0, 1000, rng);
        CHECK(estimate.estimate == doctest::Approx(1.0));
    }
    SUBCASE("estimate is dominated by the analytic bound") {
        const auto estimate = kl_tail_monte_carlo(uniform8, 100, 0.2, 10000, rng);
        BoundParams params;
        CHECK(estimate.estimate <= kl_tail_bound(params) + 3.0 * estimate.std_error);
    }
    SUBCASE("large n concentrates the empirical distribution") {
        const auto estimate = kl_tail_monte_carlo(uniform8, 10000, 0.2, 1000, rng);
        CHECK(estimate.estimate == doctest::Approx(0.0));
    }
    SUBCASE("skewed distributions are also dominated by the bound") {
        CategoricalDistribution skewed;
        skewed.labels = {"a", "b", "c", "d"};
        skewed.probs = {0.7, 0.15, 0.1, 0.05};
        for (int n : {10, 30, 100}) {
            const auto estimate = kl_tail_monte_carlo(skewed, n, 0.15, 4000, rng);
            BoundParams params;
            params.n = n;
            params.k = 4;
            params.epsilon = 0.15;
            CHECK(estimate.estimate <= kl_tail_bound(params) + 3.0 * estimate.std_error);
        }
    }
}

TEST_CASE("min_samples finds the smallest satisfying n") {
    SUBCASE("the default setting needs at most one hundred answers") {
        const int n = min_samples(8, 0.2, 0.05);
        CHECK(n <= 100);
        BoundParams params;
        params.n = n;
        CHECK(kl_tail_bound(params) <= 0.05);
        params.n = n - 1;
        CHECK(kl_tail_bound(params) > 0.05);
    }
    SUBCASE("a vacuous target is satisfied by a single sample") {
        CHECK(min_samples(8, 0.2, 1.0) == 1);
    }
    SUBCASE("tighter targets need more samples") {
        CHECK(min_samples(8, 0.2, 0.01) > min_samples(8, 0.2, 0.2));
    }
}

TEST_CASE("parameter validation") {
    BoundParams params;
    params.k = 1;
    CHECK_THROWS_AS(kl_tail_bound(params), std::invalid_argument);
    CHECK_THROWS_AS(min_samples(8, 0.2, 0.0), std::invalid_argument);
}

}  // TEST_SUITE
