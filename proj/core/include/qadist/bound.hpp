#pragma once

#include <cmath>
#include <random>

#include "qadist/types.hpp"

namespace qadist {

// Parameters of the KL concentration tail bound
//   P(D_KL(empirical || true) >= eps) <= e^{-n eps} (3 c1 / c2)
//       sum_{i=0}^{k-2} K_{i-1} (e sqrt(n) / 2 pi)^i
// The source result leaves c1, c2 and the K coefficients as named
// constants; the defaults below use the Stirling-bound pair
// c1 = e^{1/12}, c2 = sqrt(2 pi), with K_j the volume of the (j+1)-
// dimensional unit ball and K_{-1} = 1. They are configurable, and the
// Monte-Carlo oracle is the ground truth the defaults are tested against.
struct BoundParams {
    int n = 100;
    int k = 8;
    double epsilon = 0.2;
    double c1 = std::exp(1.0 / 12.0);
    double c2 = std::sqrt(2.0 * M_PI);
};

// Evaluates the tail bound in log space to dodge overflow. The raw value
// may exceed 1 for small n, where the bound is vacuous.
double kl_tail_bound(const BoundParams& params);

// Smallest n past which the bound is guaranteed non-increasing in n:
// d/dn log(bound) <= -eps + (k-2)/(2n) < 0 once n > (k-2)/(2 eps).
int bound_monotone_from(int k, double epsilon);

// Empirical tail estimate: draws `trials` empirical distributions of n
// samples from true_dist and counts how often D_KL(empirical || true)
// reaches epsilon. Zero-count categories contribute zero terms.
struct TailEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    int trials = 0;
};
TailEstimate kl_tail_monte_carlo(const CategoricalDistribution& true_dist, int n, double epsilon,
                                 int trials, std::mt19937_64& rng);

// Smallest n whose (probability-clipped) bound is <= target, found by
// galloping plus binary search in the monotone regime.
int min_samples(int k, double epsilon, double target, const BoundParams& base = BoundParams{});

}  // namespace qadist
