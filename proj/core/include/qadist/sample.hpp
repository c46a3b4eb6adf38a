#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "qadist/types.hpp"

namespace qadist {

enum class SamplerKind { Diverse, ModelMix, MissingAnswer, WrongRanking, WrongScore };

const char* to_string(SamplerKind kind);
std::optional<SamplerKind> sampler_kind_from_string(std::string_view name);

struct SamplerConfig {
    SamplerKind kind = SamplerKind::Diverse;
    int n_samples_per_question = 50;
    int draw_size = 100;
    std::uint64_t seed = 0;
};

// alpha * a + (1 - alpha) * b over identical label lists.
CategoricalDistribution mix(const CategoricalDistribution& a, const CategoricalDistribution& b,
                            double alpha);

// Interpolates between the gold distribution (alpha = 1) and uniform noise
// (alpha = 0) with alpha drawn uniformly.
struct DiverseSample {
    double alpha = 0.0;
    CategoricalDistribution dist;
};
DiverseSample sample_diverse(const CategoricalDistribution& gold, std::mt19937_64& rng);

// z * model + w1' * gold + w2' * uniform with z ~ U(0.5, 1) and
// w_i' = w_i (1 - z) / (w1 + w2) for w_i ~ U(0, 1), so the coefficients sum
// to one and most of the weight stays on the model distribution.
struct ModelMixSample {
    double z = 0.0;
    double w1 = 0.0;
    double w2 = 0.0;
    CategoricalDistribution dist;
};
ModelMixSample sample_model_mix(const CategoricalDistribution& model,
                                const CategoricalDistribution& gold, std::mt19937_64& rng);

// Deletes 1..K-1 randomly chosen categories' mass and renormalizes over the
// survivors. Deleted labels stay in the label list with zero probability,
// so the support strictly shrinks.
CategoricalDistribution sample_missing_answer(const CategoricalDistribution& gold,
                                              std::mt19937_64& rng);

// Permutes the probabilities among labels by a non-identity permutation on
// the value sequence; throws when every probability is equal.
CategoricalDistribution sample_wrong_ranking(const CategoricalDistribution& gold,
                                             std::mt19937_64& rng);

// Keeps the rank order of labels but perturbs the values: multiplicative
// jitter u ~ U(0.5, 2) per category, order repaired by sorted projection,
// then renormalized.
CategoricalDistribution sample_wrong_score(const CategoricalDistribution& gold,
                                           std::mt19937_64& rng);

// Draws draw_size concrete answer strings: category by dist, string
// uniformly from that category's gold members. source_labels records the
// true cluster of each draw, which is what makes gold matching free.
struct RealizedAnswers {
    AnswerSet answers;
    std::vector<std::string> source_labels;
};
RealizedAnswers realize_answers(const CategoricalDistribution& dist, const Clustering& clustering,
                                const AnswerSet& gold, int draw_size, std::mt19937_64& rng);

}  // namespace qadist
