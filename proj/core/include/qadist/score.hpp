#pragma once

#include <vector>

#include "qadist/types.hpp"

namespace qadist {

// Laplace smoothing: dummy_count pseudo-answers added to every category so
// no cluster ends up with zero probability.
struct SmoothingConfig {
    int dummy_count = 1;
};

// Smoothed gold distribution over the non-wrong clusters:
// p(c) = (|members(c)| + dummy) / (sum |members| + dummy * K).
CategoricalDistribution gold_distribution(const Clustering& clustering,
                                          const SmoothingConfig& smoothing);

// Smoothed predicted distribution from match assignments. Weight aimed at a
// label outside `labels` (the wrong cluster) is discarded; unmatched
// predictions contribute nothing.
CategoricalDistribution predicted_distribution(const std::vector<MatchAssignment>& assignments,
                                               const std::vector<std::string>& labels,
                                               const SmoothingConfig& smoothing);

// KL divergence sum_c gold(c) * ln(gold(c)/pred(c)), in nats. Label lists
// must be identical and all probabilities strictly positive.
double kl_score(const CategoricalDistribution& gold, const CategoricalDistribution& predicted);

// Ranked-list baseline: credit for the distinct (non-wrong) clusters hit by
// the first k matched predictions, normalized by the sum of the k largest
// cluster sizes.
double maxanswer_at_k(const Clustering& clustering,
                      const std::vector<MatchAssignment>& ranked_assignments, int k);

}  // namespace qadist
