#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qadist {

// Missing-slot kind of a question. Other covers datasets that do not
// annotate slots at all.
enum class Slot { Arg0, Purpose, Instrument, Time, Location, Other };

const char* to_string(Slot slot);
std::optional<Slot> slot_from_string(std::string_view name);

struct Question {
    std::string id;
    std::string context;
    Slot slot = Slot::Other;
};

enum class Role { Gold, Predicted };

// Raw answer strings for one question. Strings are kept verbatim; for
// predictions the list order is the model's rank order.
struct AnswerSet {
    std::string question_id;
    std::vector<std::string> answers;
    Role role = Role::Gold;
};

struct Cluster {
    std::string label;
    std::vector<int> members;  // sorted unique indices into the gold answer list
};

// Partition of a gold answer set into concept clusters. At most one cluster
// may be flagged as the discardable "wrong" bucket; it is excluded from the
// scored distribution support.
struct Clustering {
    std::string question_id;
    std::vector<Cluster> clusters;
    std::optional<std::string> wrong_label;

    const Cluster* find(std::string_view label) const;
    bool is_wrong(std::string_view label) const;
    // Labels of scorable (non-wrong) clusters, in cluster order.
    std::vector<std::string> scored_labels() const;
    int total_members() const;
};

// Sorts members inside each cluster and orders clusters by their smallest
// member index, which is the canonical order used everywhere.
void canonicalize(Clustering& clustering);

struct CategoricalDistribution {
    std::vector<std::string> labels;
    std::vector<double> probs;

    int index_of(std::string_view label) const;  // -1 when absent
    size_t size() const { return labels.size(); }
    // Number of labels with strictly positive probability.
    int support_size() const;
};

// Sums to one within tol with no negative entries.
bool is_distribution(const CategoricalDistribution& dist, double tol = 1e-9);

CategoricalDistribution uniform_distribution(std::vector<std::string> labels);

// Weight assignment of one predicted answer to gold clusters. Weights are
// split evenly across all matching clusters and sum to one when matched.
struct MatchAssignment {
    int prediction_index = -1;
    std::vector<std::pair<std::string, double>> weights;
    bool unmatched = true;

    static MatchAssignment none(int prediction_index);
    static MatchAssignment even_split(int prediction_index, std::vector<std::string> labels);
};

struct Diagnostic {
    std::string question_id;
    std::string message;
};

// Structural checks for a loaded dataset: one non-empty Gold answer set per
// question, unique non-empty ids. Returns an empty list when well formed.
std::vector<Diagnostic> validate_dataset(const std::vector<Question>& questions,
                                         const std::vector<AnswerSet>& gold);

// Coverage and disjointness: member indices partition [0, n_gold_answers).
std::vector<Diagnostic> validate_clustering(const Clustering& clustering, int n_gold_answers);

}  // namespace qadist
