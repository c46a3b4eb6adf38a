#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "qadist/embedding.hpp"
#include "qadist/types.hpp"

namespace qadist {

enum class MatcherKind { WordNet, Cosine, GaussianRegression };

const char* to_string(MatcherKind kind);
std::optional<MatcherKind> matcher_kind_from_string(std::string_view name);

struct MatcherConfig {
    MatcherKind kind = MatcherKind::Cosine;
    double cosine_threshold = 0.5;  // in (-1, 1]
    double gr_threshold = 0.5;      // in (0, 1)
    double gr_ridge = 0.01;         // positive
    int wordnet_depth = 2;
    bool wordnet_exemplar_only = false;  // compare against first member only
    std::string wordnet_path;
};

// Throws std::invalid_argument when a threshold is outside its range.
void check_matcher_config(const MatcherConfig& config);

// Lemma -> synsets and synset -> hypernym parents, parsed from the standard
// lexical-database index/data files. Synset ids are "<pos><offset>".
struct LexicalGraph {
    std::unordered_map<std::string, std::vector<std::string>> synsets;
    std::unordered_map<std::string, std::vector<std::string>> hypernyms;

    bool empty() const { return synsets.empty(); }
    // Synsets of a lemma plus all hypernym ancestors within `depth` hops.
    std::unordered_set<std::string> ancestor_closure(std::string_view lemma, int depth) const;
};

// Parses index.<pos>/data.<pos> pairs found in the directory (noun, verb,
// adj, adv). Missing parts of speech are tolerated; a malformed present
// file raises an error naming the file and byte offset.
LexicalGraph load_lexical_graph(const std::string& directory);

// Lexical matching: a prediction matches a cluster when any prediction
// token and any member token are equal, share a synset, or one's synset is
// a hypernym ancestor of the other's within the configured depth.
MatchAssignment match_wordnet(int prediction_index, std::string_view prediction,
                              const Clustering& clustering, const AnswerSet& gold,
                              const LexicalGraph& graph, const MatcherConfig& config);

// Cosine matching against cluster centroids (means of non-OOV member
// vectors). OOV predictions and zero-norm vectors never match.
MatchAssignment match_cosine(int prediction_index, const AnswerVector& prediction,
                             const Clustering& clustering,
                             const std::vector<AnswerVector>& gold_vectors,
                             const MatcherConfig& config);

// One-vs-rest RBF kernel ridge regressor per cluster. Bandwidth comes from
// the median heuristic over gold pairwise distances; the shared kernel
// factorization is reused across clusters, so fitting is deterministic.
class GaussianRegressorSet {
  public:
    static GaussianRegressorSet fit(const Clustering& clustering,
                                    const std::vector<AnswerVector>& gold_vectors,
                                    const MatcherConfig& config);

    // Membership score per cluster, in clustering order.
    std::vector<double> scores(const AnswerVector& prediction) const;

    MatchAssignment match(int prediction_index, const AnswerVector& prediction,
                          const MatcherConfig& config) const;

    double bandwidth() const { return bandwidth_; }

  private:
    std::vector<std::string> labels_;
    std::vector<std::vector<double>> training_points_;
    std::vector<std::vector<double>> alphas_;  // per cluster, empty = degenerate
    std::vector<int> degenerate_;              // 0 normal, 1 always match, -1 never match
    double bandwidth_ = 1.0;
};

}  // namespace qadist
