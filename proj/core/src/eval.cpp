#include "qadist/eval.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "qadist/parallel.hpp"
#include "qadist/rng.hpp"
#include "qadist/text.hpp"

namespace qadist {

using nlohmann::json;

Clustering clustering_for_question(const AnswerSet& gold, const Resources& resources,
                                   const ClusterConfig& config) {
    if (config.algorithm == ClusterAlgorithm::HumanFile) {
        if (!resources.human_clusterings) {
            throw std::runtime_error("human clustering requested but none loaded");
        }
        auto it = resources.human_clusterings->find(gold.question_id);
        if (it == resources.human_clusterings->end()) {
            throw std::runtime_error("no human clustering for question " + gold.question_id);
        }
        return it->second;
    }
    if (!resources.embeddings) {
        throw std::runtime_error("automatic clustering requires an embedding table");
    }
    const auto vectors = embed_answers(*resources.embeddings, gold);
    return cluster_gold(gold.question_id, vectors, config);
}

MatchPipeline::MatchPipeline(const Clustering& clustering, const AnswerSet& gold,
                             const Resources& resources, const MatcherConfig& config,
                             bool exact_shortcut)
    : clustering_(&clustering),
      gold_(&gold),
      resources_(&resources),
      config_(config),
      exact_shortcut_(exact_shortcut) {
    check_matcher_config(config);
    if (exact_shortcut_) {
        for (const auto& cluster : clustering.clusters) {
            for (int index : cluster.members) {
                if (index < 0 || static_cast<size_t>(index) >= gold.answers.size()) continue;
                auto& labels = exact_index_[normalize(gold.answers[static_cast<size_t>(index)])];
                if (std::find(labels.begin(), labels.end(), cluster.label) == labels.end()) {
                    labels.push_back(cluster.label);
                }
            }
        }
    }
    const bool needs_vectors = config.kind == MatcherKind::Cosine ||
                               config.kind == MatcherKind::GaussianRegression;
    if (needs_vectors) {
        if (!resources.embeddings) {
            throw std::runtime_error("similarity matching requires an embedding table");
        }
        gold_vectors_ = embed_answers(*resources.embeddings, gold);
        if (config.kind == MatcherKind::GaussianRegression) {
            regressors_ = GaussianRegressorSet::fit(clustering, gold_vectors_, config);
        }
    }
    if (config.kind == MatcherKind::WordNet && !resources.lexicon) {
        throw std::runtime_error("wordnet matching requires a lexical database");
    }
}

MatchAssignment MatchPipeline::match(int prediction_index, const std::string& raw_prediction) const {
    const std::string key = normalize(raw_prediction);
    auto cached = cache_.find(key);
    if (cached != cache_.end()) {
        MatchAssignment assignment = cached->second;
        assignment.prediction_index = prediction_index;
        return assignment;
    }

    MatchAssignment assignment = MatchAssignment::none(prediction_index);
    if (exact_shortcut_) {
        auto exact = exact_index_.find(key);
        if (exact != exact_index_.end()) {
            assignment = MatchAssignment::even_split(prediction_index, exact->second);
            cache_.emplace(key, assignment);
            return assignment;
        }
    }
    switch (config_.kind) {
        case MatcherKind::WordNet:
            assignment = match_wordnet(prediction_index, raw_prediction, *clustering_, *gold_,
                                       *resources_->lexicon, config_);
            break;
        case MatcherKind::Cosine:
            assignment = match_cosine(prediction_index,
                                      embed_answer(*resources_->embeddings, raw_prediction),
                                      *clustering_, gold_vectors_, config_);
            break;
        case MatcherKind::GaussianRegression:
            assignment = regressors_->match(prediction_index,
                                            embed_answer(*resources_->embeddings, raw_prediction),
                                            config_);
            break;
    }
    cache_.emplace(key, assignment);
    return assignment;
}

EvalReport evaluate_dataset(const Dataset& dataset, const std::vector<AnswerSet>& predictions,
                            const Resources& resources, const EvalConfig& config) {
    EvalReport report;
    report.config_digest = eval_config_digest(config);
    report.seed = config.seed;
    report.maxanswer_k = config.maxanswer_k;

    std::vector<const Question*> questions;
    questions.reserve(dataset.questions.size());
    for (const auto& q : dataset.questions) questions.push_back(&q);
    std::sort(questions.begin(), questions.end(),
              [](const Question* a, const Question* b) { return a->id < b->id; });

    std::unordered_map<std::string, const AnswerSet*> prediction_index;
    for (const auto& set : predictions) prediction_index.emplace(set.question_id, &set);

    struct QuestionOutcome {
        std::optional<QuestionScore> score;
        std::optional<SkipRecord> skip;
    };
    std::vector<QuestionOutcome> results(questions.size());

    parallel_for(questions.size(), config.threads, [&](size_t qi) {
        const Question& question = *questions[qi];
        try {
            const auto* gold = dataset.gold_for(question.id);
            if (!gold || gold->answers.empty()) {
                results[qi].skip = SkipRecord{question.id, "empty gold set"};
                return;
            }
            const Clustering clustering =
                clustering_for_question(*gold, resources, config.clustering);

            const MatchPipeline pipeline(clustering, *gold, resources, config.matcher,
                                         /*exact_shortcut=*/true);

            static const AnswerSet empty_set;
            const AnswerSet* preds = &empty_set;
            if (auto it = prediction_index.find(question.id); it != prediction_index.end()) {
                preds = it->second;
            }

            std::vector<MatchAssignment> assignments;
            assignments.reserve(preds->answers.size());
            int n_unmatched = 0;
            for (size_t p = 0; p < preds->answers.size(); ++p) {
                auto assignment = pipeline.match(static_cast<int>(p), preds->answers[p]);
                if (assignment.unmatched) ++n_unmatched;
                assignments.push_back(std::move(assignment));
            }

            const auto gold_dist = gold_distribution(clustering, config.smoothing);
            const auto pred_dist =
                predicted_distribution(assignments, gold_dist.labels, config.smoothing);

            QuestionScore score;
            score.question_id = question.id;
            score.slot = question.slot;
            score.kl = kl_score(gold_dist, pred_dist);
            score.maxanswer = maxanswer_at_k(clustering, assignments, config.maxanswer_k);
            score.n_gold_clusters = static_cast<int>(gold_dist.labels.size());
            score.n_predictions = static_cast<int>(preds->answers.size());
            score.n_unmatched = n_unmatched;
            results[qi].score = std::move(score);
        } catch (const std::exception& e) {
            results[qi].skip = SkipRecord{question.id, e.what()};
        }
    });

    for (auto& slot : results) {
        if (slot.score) report.per_question.push_back(std::move(*slot.score));
        if (slot.skip) report.skipped.push_back(std::move(*slot.skip));
    }
    if (report.per_question.empty() && !report.skipped.empty()) {
        throw std::runtime_error("no question could be scored; first reason: " +
                                 report.skipped.front().reason);
    }

    // aggregates
    std::vector<double> kls;
    std::map<std::string, std::pair<double, int>> slot_sums;
    for (const auto& score : report.per_question) {
        kls.push_back(score.kl);
        auto& [sum, count] = slot_sums[to_string(score.slot)];
        sum += score.kl;
        ++count;
    }
    if (!kls.empty()) {
        double total = 0.0;
        for (double v : kls) total += v;
        report.mean_kl = total / static_cast<double>(kls.size());
        std::sort(kls.begin(), kls.end());
        const size_t mid = kls.size() / 2;
        report.median_kl = kls.size() % 2 == 1 ? kls[mid] : (kls[mid - 1] + kls[mid]) / 2.0;
    }
    for (const auto& [slot, sums] : slot_sums) {
        report.per_slot_mean_kl[slot] = sums.first / static_cast<double>(sums.second);
    }
    return report;
}

namespace {

json config_to_json(const EvalConfig& config) {
    json doc;
    doc["clustering"]["algorithm"] = to_string(config.clustering.algorithm);
    if (config.clustering.hac_cluster_count) {
        doc["clustering"]["hac_cluster_count"] = *config.clustering.hac_cluster_count;
    }
    if (config.clustering.hac_distance_threshold) {
        doc["clustering"]["hac_distance_threshold"] = *config.clustering.hac_distance_threshold;
    }
    doc["clustering"]["xmeans_kmax"] = config.clustering.xmeans_kmax;
    doc["clustering"]["gmeans_significance"] = config.clustering.gmeans_significance;
    doc["matcher"]["kind"] = to_string(config.matcher.kind);
    doc["matcher"]["cosine_threshold"] = config.matcher.cosine_threshold;
    doc["matcher"]["gr_threshold"] = config.matcher.gr_threshold;
    doc["matcher"]["gr_ridge"] = config.matcher.gr_ridge;
    doc["matcher"]["wordnet_depth"] = config.matcher.wordnet_depth;
    doc["matcher"]["wordnet_exemplar_only"] = config.matcher.wordnet_exemplar_only;
    doc["smoothing"]["dummy_count"] = config.smoothing.dummy_count;
    doc["maxanswer_k"] = config.maxanswer_k;
    return doc;
}

}  // namespace

std::string eval_config_digest(const EvalConfig& config) {
    return to_hex(fnv1a64(config_to_json(config).dump()));
}

std::string eval_report_to_json(const EvalReport& report, const EvalConfig& config) {
    json doc;
    doc["config"] = config_to_json(config);
    doc["config_digest"] = report.config_digest;
    doc["seed"] = report.seed;

    json per_question = json::array();
    const std::string maxanswer_key = "maxanswer_at_" + std::to_string(report.maxanswer_k);
    for (const auto& score : report.per_question) {
        json entry;
        entry["question_id"] = score.question_id;
        entry["slot"] = to_string(score.slot);
        entry["kl"] = round_sig(score.kl);
        entry[maxanswer_key] = round_sig(score.maxanswer);
        entry["n_gold_clusters"] = score.n_gold_clusters;
        entry["n_predictions"] = score.n_predictions;
        entry["n_unmatched"] = score.n_unmatched;
        per_question.push_back(std::move(entry));
    }
    doc["per_question"] = std::move(per_question);

    json skipped = json::array();
    for (const auto& skip : report.skipped) {
        skipped.push_back({{"question_id", skip.question_id}, {"reason", skip.reason}});
    }
    doc["skipped"] = std::move(skipped);

    doc["aggregate"]["mean_kl"] = round_sig(report.mean_kl);
    doc["aggregate"]["median_kl"] = round_sig(report.median_kl);
    json per_slot = json::object();
    for (const auto& [slot, mean] : report.per_slot_mean_kl) per_slot[slot] = round_sig(mean);
    doc["aggregate"]["per_slot_mean_kl"] = std::move(per_slot);

    return doc.dump(2) + "\n";
}

void write_eval_report(const EvalReport& report, const EvalConfig& config,
                       const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write report: " + path);
    out << eval_report_to_json(report, config);
}

}  // namespace qadist
