#include "qadist/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qadist {

std::vector<double> fractional_ranks(std::span<const double> values) {
    const size_t n = values.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(n, 0.0);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        // positions i..j share the average rank (1-based)
        const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

std::optional<double> spearman(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("spearman: size mismatch");
    const size_t n = xs.size();
    if (n < 2) throw std::invalid_argument("spearman: need at least two observations");

    const auto rx = fractional_ranks(xs);
    const auto ry = fractional_ranks(ys);

    // Mean rank is (n+1)/2 regardless of ties.
    const double mean = (static_cast<double>(n) + 1.0) / 2.0;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double dx = rx[i] - mean;
        const double dy = ry[i] - mean;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

std::optional<double> anderson_darling_normal(std::span<const double> values) {
    const size_t n = values.size();
    if (n < 5) return std::nullopt;

    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n - 1);
    if (var <= 0.0 || !std::isfinite(var)) return std::nullopt;
    const double sd = std::sqrt(var);

    std::vector<double> z(values.begin(), values.end());
    for (double& v : z) v = (v - mean) / sd;
    std::sort(z.begin(), z.end());

    double a2 = 0.0;
    const double dn = static_cast<double>(n);
    for (size_t i = 0; i < n; ++i) {
        double lo = normal_cdf(z[i]);
        double hi = normal_cdf(z[n - 1 - i]);
        lo = std::clamp(lo, 1e-300, 1.0 - 1e-15);
        hi = std::clamp(hi, 1e-300, 1.0 - 1e-15);
        a2 += (2.0 * static_cast<double>(i + 1) - 1.0) * (std::log(lo) + std::log1p(-hi));
    }
    a2 = -dn - a2 / dn;
    // Correction for estimated mean and variance (Stephens).
    return a2 * (1.0 + 4.0 / dn - 25.0 / (dn * dn));
}

double anderson_darling_critical(double significance) {
    // Stephens' table for normality with estimated parameters.
    static constexpr std::pair<double, double> table[] = {
        {0.15, 0.576}, {0.10, 0.656}, {0.05, 0.787}, {0.025, 0.918}, {0.01, 1.092}};
    double best_gap = 1e9;
    double critical = 0.787;
    for (auto [level, value] : table) {
        const double gap = std::abs(level - significance);
        if (gap < best_gap) {
            best_gap = gap;
            critical = value;
        }
    }
    return critical;
}

}  // namespace qadist
