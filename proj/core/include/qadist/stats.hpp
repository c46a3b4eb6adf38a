#pragma once

#include <optional>
#include <span>
#include <vector>

namespace qadist {

// 1-based fractional ranks; tied values share the average of their ranks.
std::vector<double> fractional_ranks(std::span<const double> values);

// Spearman rank correlation with average-rank tie handling. Empty result
// when either side has zero rank variance (correlation undefined).
std::optional<double> spearman(std::span<const double> xs, std::span<const double> ys);

// Anderson-Darling A*^2 statistic against a normal with estimated mean and
// variance (small-sample correction applied). Empty when the sample is too
// small or degenerate.
std::optional<double> anderson_darling_normal(std::span<const double> values);

// Critical A*^2 value for the estimated-parameters normality test at the
// closest tabulated significance level.
double anderson_darling_critical(double significance);

}  // namespace qadist
