#include "qadist/bound.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <vector>

#include "qadist/rng.hpp"

namespace qadist {

namespace {

// log of K_j: volume of the (j+1)-dimensional unit ball; K_{-1} = 1.
double log_ball_volume_coeff(int j) {
    if (j < 0) return 0.0;
    const double dim = static_cast<double>(j) + 1.0;
    return dim / 2.0 * std::log(M_PI) - std::lgamma(dim / 2.0 + 1.0);
}

double log_sum_exp(const std::vector<double>& terms) {
    double max_term = -std::numeric_limits<double>::infinity();
    for (double t : terms) max_term = std::max(max_term, t);
    if (!std::isfinite(max_term)) return max_term;
    double sum = 0.0;
    for (double t : terms) sum += std::exp(t - max_term);
    return max_term + std::log(sum);
}

}  // namespace

double kl_tail_bound(const BoundParams& params) {
    if (params.n < 1 || params.k < 2 || params.epsilon <= 0.0 || params.c1 <= 0.0 ||
        params.c2 <= 0.0) {
        throw std::invalid_argument("kl_tail_bound: invalid parameters");
    }

    const double log_ratio = 1.0 + 0.5 * std::log(static_cast<double>(params.n)) -
                             std::log(2.0 * M_PI);  // log(e sqrt(n) / 2 pi)
    std::vector<double> terms;
    terms.reserve(static_cast<size_t>(params.k - 1));
    for (int i = 0; i <= params.k - 2; ++i) {
        terms.push_back(log_ball_volume_coeff(i - 1) + static_cast<double>(i) * log_ratio);
    }
    const double log_bound = -static_cast<double>(params.n) * params.epsilon +
                             std::log(3.0 * params.c1 / params.c2) + log_sum_exp(terms);
    if (log_bound > 700.0) return std::numeric_limits<double>::infinity();
    return std::exp(log_bound);
}

int bound_monotone_from(int k, double epsilon) {
    if (k < 2 || epsilon <= 0.0) throw std::invalid_argument("bound_monotone_from: invalid parameters");
    const double n0 = static_cast<double>(k - 2) / (2.0 * epsilon);
    return std::max(1, static_cast<int>(std::ceil(n0)));
}

TailEstimate kl_tail_monte_carlo(const CategoricalDistribution& true_dist, int n, double epsilon,
                                 int trials, std::mt19937_64& rng) {
    if (trials < 1) throw std::invalid_argument("kl_tail_monte_carlo: trials must be >= 1");
    if (n < 1) throw std::invalid_argument("kl_tail_monte_carlo: n must be >= 1");

    const size_t k = true_dist.probs.size();
    std::vector<int> counts(k, 0);
    int exceed = 0;
    for (int t = 0; t < trials; ++t) {
        std::fill(counts.begin(), counts.end(), 0);
        for (int s = 0; s < n; ++s) {
            ++counts[static_cast<size_t>(draw_categorical(true_dist.probs, rng))];
        }
        double divergence = 0.0;
        for (size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;  // 0 log 0 = 0
            const double g = static_cast<double>(counts[c]) / static_cast<double>(n);
            divergence += g * std::log(g / true_dist.probs[c]);
        }
        if (divergence >= epsilon) ++exceed;
    }

    TailEstimate estimate;
    estimate.trials = trials;
    estimate.estimate = static_cast<double>(exceed) / static_cast<double>(trials);
    estimate.std_error =
        std::sqrt(estimate.estimate * (1.0 - estimate.estimate) / static_cast<double>(trials));
    return estimate;
}

int min_samples(int k, double epsilon, double target, const BoundParams& base) {
    if (target <= 0.0 || target > 1.0) throw std::invalid_argument("min_samples: target in (0, 1]");

    auto effective = [&](int n) {
        BoundParams params = base;
        params.n = n;
        params.k = k;
        params.epsilon = epsilon;
        return std::min(1.0, kl_tail_bound(params));
    };
    if (target >= 1.0) return 1;  // every n satisfies a vacuous target

    int lo = bound_monotone_from(k, epsilon);
    if (effective(lo) <= target) {
        // the bound may already satisfy the target at small n when eps is large
        int n = lo;
        while (n > 1 && effective(n - 1) <= target) --n;
        return n;
    }

    int hi = lo;
    while (effective(hi) > target) {
        if (hi > (1 << 28)) throw std::runtime_error("min_samples: target unreachable");
        hi *= 2;
    }
    while (lo + 1 < hi) {
        const int mid = lo + (hi - lo) / 2;
        if (effective(mid) <= target) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

}  // namespace qadist
