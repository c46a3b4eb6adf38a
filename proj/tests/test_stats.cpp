#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "qadist/rng.hpp"
#include "qadist/stats.hpp"
#include "support/oracles.hpp"

using namespace qadist;
using testsupport::spearman_oracle;

TEST_SUITE("stats") {

TEST_CASE("fractional ranks average over ties") {
    const std::vector<double> values{3.0, 1.0, 3.0, 2.0};
    const auto ranks = fractional_ranks(values);
    CHECK(ranks == std::vector<double>{3.5, 1.0, 3.5, 2.0});
}

TEST_CASE("spearman endpoints and frozen example") {
    const std::vector<double> xs{1, 2, 3, 4};
    CHECK(*spearman(xs, std::vector<double>{10, 20, 30, 40}) == doctest::Approx(1.0));
    CHECK(*spearman(xs, std::vector<double>{9, 7, 2, 1}) == doctest::Approx(-1.0));
    CHECK(*spearman(xs, std::vector<double>{1, 3, 2, 4}) == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("spearman is undefined under zero rank variance") {
    const std::vector<double> xs{1, 2, 3};
    CHECK(!spearman(xs, std::vector<double>{5, 5, 5}).has_value());
    CHECK(!spearman(std::vector<double>{2, 2, 2}, xs).has_value());
}

TEST_CASE("spearman equals the brute-force oracle on every short permutation") {
    for (int n = 2; n <= 6; ++n) {
        std::vector<double> ys(static_cast<size_t>(n));
        std::iota(ys.begin(), ys.end(), 1.0);
        std::vector<double> xs = ys;
        do {
            const auto got = spearman(xs, ys);
            REQUIRE(got.has_value());
            CHECK(*got == spearman_oracle(xs, ys));
        } while (std::next_permutation(ys.begin(), ys.end()));
    }
}

TEST_CASE("spearman matches the oracle on tie-heavy tuples") {
    // every length-4 sequence over {1, 2, 3} against a fixed x
    const std::vector<double> xs{1, 2, 2, 3};
    for (int code = 0; code < 81; ++code) {
        int c = code;
        std::vector<double> ys(4);
        for (auto& y : ys) {
            y = 1.0 + c % 3;
            c /= 3;
        }
        const auto got = spearman(xs, ys);
        if (std::all_of(ys.begin(), ys.end(), [&](double v) { return v == ys[0]; })) {
            CHECK(!got.has_value());
            continue;
        }
        REQUIRE(got.has_value());
        CHECK(*got == doctest::Approx(spearman_oracle(xs, ys)).epsilon(1e-14));
    }
}

TEST_CASE("spearman is invariant under strictly monotone transforms") {
    auto rng = seeded_rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> xs(20), ys(20);
        for (size_t i = 0; i < xs.size(); ++i) {
            xs[i] = unit(rng);
            ys[i] = unit(rng);
        }
        const double base = *spearman(xs, ys);
        std::vector<double> exp_xs = xs;
        for (double& v : exp_xs) v = std::exp(3.0 * v);
        std::vector<double> cub_ys = ys;
        for (double& v : cub_ys) v = v * v * v + 2.0;
        CHECK(*spearman(exp_xs, ys) == doctest::Approx(base).epsilon(1e-12));
        CHECK(*spearman(xs, cub_ys) == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("anderson-darling separates gaussian from bimodal samples") {
    auto rng = seeded_rng(21);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> normal_sample(400);
    for (auto& v : normal_sample) v = gauss(rng);
    const auto a2_normal = anderson_darling_normal(normal_sample);
    REQUIRE(a2_normal.has_value());
    CHECK(*a2_normal < anderson_darling_critical(0.05));

    std::vector<double> bimodal(400);
    for (size_t i = 0; i < bimodal.size(); ++i) {
        bimodal[i] = gauss(rng) * 0.3 + (i % 2 == 0 ? -3.0 : 3.0);
    }
    const auto a2_bimodal = anderson_darling_normal(bimodal);
    REQUIRE(a2_bimodal.has_value());
    CHECK(*a2_bimodal > anderson_darling_critical(0.05));
}

TEST_CASE("anderson-darling critical values pick the nearest level") {
    CHECK(anderson_darling_critical(0.05) == doctest::Approx(0.787));
    CHECK(anderson_darling_critical(0.01) == doctest::Approx(1.092));
    CHECK(anderson_darling_critical(0.049) == doctest::Approx(0.787));
}

}  // TEST_SUITE
