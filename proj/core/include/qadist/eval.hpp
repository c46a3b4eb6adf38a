#pragma once

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "qadist/cluster.hpp"
#include "qadist/embedding.hpp"
#include "qadist/io.hpp"
#include "qadist/match.hpp"
#include "qadist/score.hpp"
#include "qadist/types.hpp"

namespace qadist {

struct EvalConfig {
    ClusterConfig clustering;
    MatcherConfig matcher;
    SmoothingConfig smoothing;
    int maxanswer_k = 10;
    std::uint64_t seed = 0;
    int threads = 1;
};

// Read-only inputs shared by all questions. Pointers may stay null when the
// configuration does not need them.
struct Resources {
    const EmbeddingTable* embeddings = nullptr;
    const LexicalGraph* lexicon = nullptr;
    const std::map<std::string, Clustering>* human_clusterings = nullptr;
};

// Clustering for one question according to config: the human file when
// algorithm is HumanFile, otherwise the configured algorithm over the
// embedded gold answers.
Clustering clustering_for_question(const AnswerSet& gold, const Resources& resources,
                                   const ClusterConfig& config);

// Matcher bound to one question's clustering. With exact_shortcut enabled a
// prediction whose normalized string equals a gold member is assigned to
// the clusters owning that string, bypassing the similarity matcher; this
// is what makes self-evaluation an exact fixed point. Match results are
// memoized per normalized string; instances are not thread-safe.
class MatchPipeline {
  public:
    MatchPipeline(const Clustering& clustering, const AnswerSet& gold, const Resources& resources,
                  const MatcherConfig& config, bool exact_shortcut);

    MatchAssignment match(int prediction_index, const std::string& raw_prediction) const;
    const Clustering& clustering() const { return *clustering_; }

  private:
    const Clustering* clustering_;
    const AnswerSet* gold_;
    const Resources* resources_;
    MatcherConfig config_;
    bool exact_shortcut_;
    std::unordered_map<std::string, std::vector<std::string>> exact_index_;
    std::vector<AnswerVector> gold_vectors_;
    std::optional<GaussianRegressorSet> regressors_;
    mutable std::unordered_map<std::string, MatchAssignment> cache_;
};

struct QuestionScore {
    std::string question_id;
    Slot slot = Slot::Other;
    double kl = 0.0;
    double maxanswer = 0.0;
    int n_gold_clusters = 0;
    int n_predictions = 0;
    int n_unmatched = 0;
};

struct SkipRecord {
    std::string question_id;
    std::string reason;
};

struct EvalReport {
    std::string config_digest;
    std::uint64_t seed = 0;
    int maxanswer_k = 10;
    std::vector<QuestionScore> per_question;  // sorted by question id
    std::vector<SkipRecord> skipped;
    double mean_kl = 0.0;
    double median_kl = 0.0;
    std::map<std::string, double> per_slot_mean_kl;
};

// Scores every question: per-question KL plus the ranked-list baseline.
// Per-question failures become skip records; only total failure throws.
EvalReport evaluate_dataset(const Dataset& dataset, const std::vector<AnswerSet>& predictions,
                            const Resources& resources, const EvalConfig& config);

// Digest of the algorithmic configuration (seed excluded); reports carrying
// different digests should not be aggregated together.
std::string eval_config_digest(const EvalConfig& config);

// Canonical JSON bytes (sorted keys, floats at 9 significant digits).
std::string eval_report_to_json(const EvalReport& report, const EvalConfig& config);
void write_eval_report(const EvalReport& report, const EvalConfig& config,
                       const std::string& path);

}  // namespace qadist
