#include "qadist/sample.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "qadist/rng.hpp"

namespace qadist {

const char* to_string(SamplerKind kind) {
    switch (kind) {
        case SamplerKind::Diverse: return "diverse";
        case SamplerKind::ModelMix: return "model_mix";
        case SamplerKind::MissingAnswer: return "missing_answer";
        case SamplerKind::WrongRanking: return "wrong_ranking";
        case SamplerKind::WrongScore: return "wrong_score";
    }
    return "diverse";
}

std::optional<SamplerKind> sampler_kind_from_string(std::string_view name) {
    if (name == "diverse") return SamplerKind::Diverse;
    if (name == "model_mix" || name == "modelmix") return SamplerKind::ModelMix;
    if (name == "missing_answer" || name == "ma") return SamplerKind::MissingAnswer;
    if (name == "wrong_ranking" || name == "wr") return SamplerKind::WrongRanking;
    if (name == "wrong_score" || name == "ws") return SamplerKind::WrongScore;
    return std::nullopt;
}

CategoricalDistribution mix(const CategoricalDistribution& a, const CategoricalDistribution& b,
                            double alpha) {
    if (a.labels != b.labels) throw std::invalid_argument("mix: label mismatch");
    CategoricalDistribution out;
    out.labels = a.labels;
    out.probs.resize(a.probs.size());
    for (size_t i = 0; i < a.probs.size(); ++i) {
        out.probs[i] = alpha * a.probs[i] + (1.0 - alpha) * b.probs[i];
    }
    return out;
}

DiverseSample sample_diverse(const CategoricalDistribution& gold, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    DiverseSample sample;
    sample.alpha = unit(rng);
    sample.dist = mix(gold, uniform_distribution(gold.labels), sample.alpha);
    return sample;
}

ModelMixSample sample_model_mix(const CategoricalDistribution& model,
                                const CategoricalDistribution& gold, std::mt19937_64& rng) {
    if (model.labels != gold.labels) throw std::invalid_argument("sample_model_mix: label mismatch");
    std::uniform_real_distribution<double> z_draw(0.5, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    ModelMixSample sample;
    sample.z = z_draw(rng);
    do {
        sample.w1 = unit(rng);
        sample.w2 = unit(rng);
    } while (sample.w1 + sample.w2 <= 0.0);

    const double scale = (1.0 - sample.z) / (sample.w1 + sample.w2);
    const double w1p = sample.w1 * scale;
    const double w2p = sample.w2 * scale;

    const auto uniform = uniform_distribution(gold.labels);
    CategoricalDistribution out;
    out.labels = gold.labels;
    out.probs.resize(gold.probs.size());
    for (size_t i = 0; i < out.probs.size(); ++i) {
        out.probs[i] = sample.z * model.probs[i] + w1p * gold.probs[i] + w2p * uniform.probs[i];
    }
    sample.dist = std::move(out);
    return sample;
}

CategoricalDistribution sample_missing_answer(const CategoricalDistribution& gold,
                                              std::mt19937_64& rng) {
    const int k = static_cast<int>(gold.labels.size());
    if (k < 2) throw std::invalid_argument("sample_missing_answer: need at least two labels");

    std::uniform_int_distribution<int> count_draw(1, k - 1);
    const int n_drop = count_draw(rng);

    std::vector<int> order(static_cast<size_t>(k));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    CategoricalDistribution out;
    out.labels = gold.labels;
    out.probs = gold.probs;
    for (int i = 0; i < n_drop; ++i) out.probs[static_cast<size_t>(order[static_cast<size_t>(i)])] = 0.0;

    double total = 0.0;
    for (double p : out.probs) total += p;
    if (total <= 0.0) {
        // all surviving categories had zero mass; keep the last dropped one
        out.probs[static_cast<size_t>(order[static_cast<size_t>(n_drop - 1)])] =
            gold.probs[static_cast<size_t>(order[static_cast<size_t>(n_drop - 1)])];
        total = out.probs[static_cast<size_t>(order[static_cast<size_t>(n_drop - 1)])];
    }
    for (double& p : out.probs) p /= total;
    return out;
}

CategoricalDistribution sample_wrong_ranking(const CategoricalDistribution& gold,
                                             std::mt19937_64& rng) {
    const size_t k = gold.probs.size();
    bool any_distinct = false;
    for (size_t i = 1; i < k; ++i) {
        if (gold.probs[i] != gold.probs[0]) {
            any_distinct = true;
            break;
        }
    }
    if (!any_distinct) {
        throw std::invalid_argument("sample_wrong_ranking: all probabilities equal");
    }

    CategoricalDistribution out;
    out.labels = gold.labels;
    out.probs = gold.probs;
    // rejection-sample a permutation whose value sequence differs anywhere
    do {
        out.probs = gold.probs;
        std::shuffle(out.probs.begin(), out.probs.end(), rng);
    } while (out.probs == gold.probs);
    return out;
}

CategoricalDistribution sample_wrong_score(const CategoricalDistribution& gold,
                                           std::mt19937_64& rng) {
    const size_t k = gold.probs.size();
    if (k == 0) throw std::invalid_argument("sample_wrong_score: empty distribution");
    std::uniform_real_distribution<double> jitter(0.5, 2.0);

    // label positions sorted by gold probability, descending; ties grouped
    std::vector<size_t> order(k);
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return gold.probs[a] > gold.probs[b]; });

    CategoricalDistribution out;
    out.labels = gold.labels;
    out.probs.assign(k, 0.0);

    for (int attempt = 0; attempt < 64; ++attempt) {
        std::vector<double> jittered(k);
        for (size_t i = 0; i < k; ++i) jittered[i] = gold.probs[i] * jitter(rng);
        std::sort(jittered.begin(), jittered.end(), std::greater<double>());

        // walk tie groups of the gold ordering; each group receives the mean
        // of the jittered values allotted to its slots, which preserves ties
        size_t i = 0;
        bool ok = true;
        double previous = std::numeric_limits<double>::infinity();
        while (i < k) {
            size_t j = i;
            while (j + 1 < k && gold.probs[order[j + 1]] == gold.probs[order[i]]) ++j;
            double sum = 0.0;
            for (size_t s = i; s <= j; ++s) sum += jittered[s];
            const double value = sum / static_cast<double>(j - i + 1);
            if (gold.probs[order[i]] > 0.0 && value >= previous) {
                ok = false;  // strict order broken by averaging, re-jitter
                break;
            }
            for (size_t s = i; s <= j; ++s) out.probs[order[s]] = value;
            if (gold.probs[order[i]] > 0.0) previous = value;
            i = j + 1;
        }
        if (!ok) continue;

        double total = 0.0;
        for (double p : out.probs) total += p;
        for (double& p : out.probs) p /= total;
        return out;
    }
    throw std::runtime_error("sample_wrong_score: could not preserve rank order");
}

RealizedAnswers realize_answers(const CategoricalDistribution& dist, const Clustering& clustering,
                                const AnswerSet& gold, int draw_size, std::mt19937_64& rng) {
    if (draw_size < 1) throw std::invalid_argument("realize_answers: draw_size must be >= 1");

    // member strings per label, in dist order
    std::vector<const Cluster*> clusters(dist.labels.size(), nullptr);
    for (size_t i = 0; i < dist.labels.size(); ++i) {
        const auto* cluster = clustering.find(dist.labels[i]);
        if (!cluster) throw std::invalid_argument("realize_answers: unknown label " + dist.labels[i]);
        clusters[i] = cluster;
    }

    RealizedAnswers out;
    out.answers.question_id = gold.question_id;
    out.answers.role = Role::Predicted;
    out.answers.answers.reserve(static_cast<size_t>(draw_size));
    out.source_labels.reserve(static_cast<size_t>(draw_size));

    std::vector<double> weights = dist.probs;
    for (int d = 0; d < draw_size; ++d) {
        int category = -1;
        for (int attempt = 0; attempt < 64; ++attempt) {
            category = draw_categorical(weights, rng);
            if (!clusters[static_cast<size_t>(category)]->members.empty()) break;
            weights[static_cast<size_t>(category)] = 0.0;  // redraw without empty category
            category = -1;
        }
        if (category < 0) throw std::runtime_error("realize_answers: no drawable category");

        const auto& members = clusters[static_cast<size_t>(category)]->members;
        std::uniform_int_distribution<size_t> pick(0, members.size() - 1);
        const auto member_index = static_cast<size_t>(members[pick(rng)]);
        out.answers.answers.push_back(gold.answers[member_index]);
        out.source_labels.push_back(dist.labels[static_cast<size_t>(category)]);
    }
    return out;
}

}  // namespace qadist
