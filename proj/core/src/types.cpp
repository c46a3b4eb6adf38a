#include "qadist/types.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace qadist {

const char* to_string(Slot slot) {
    switch (slot) {
        case Slot::Arg0: return "Arg0";
        case Slot::Purpose: return "Purpose";
        case Slot::Instrument: return "Instrument";
        case Slot::Time: return "Time";
        case Slot::Location: return "Location";
        case Slot::Other: return "Other";
    }
    return "Other";
}

std::optional<Slot> slot_from_string(std::string_view name) {
    if (name == "Arg0") return Slot::Arg0;
    if (name == "Purpose") return Slot::Purpose;
    if (name == "Instrument") return Slot::Instrument;
    if (name == "Time") return Slot::Time;
    if (name == "Location") return Slot::Location;
    if (name == "Other") return Slot::Other;
    return std::nullopt;
}

const Cluster* Clustering::find(std::string_view label) const {
    for (const auto& cluster : clusters) {
        if (cluster.label == label) return &cluster;
    }
    return nullptr;
}

bool Clustering::is_wrong(std::string_view label) const {
    return wrong_label && *wrong_label == label;
}

std::vector<std::string> Clustering::scored_labels() const {
    std::vector<std::string> labels;
    labels.reserve(clusters.size());
    for (const auto& cluster : clusters) {
        if (!is_wrong(cluster.label)) labels.push_back(cluster.label);
    }
    return labels;
}

int Clustering::total_members() const {
    int total = 0;
    for (const auto& cluster : clusters) total += static_cast<int>(cluster.members.size());
    return total;
}

void canonicalize(Clustering& clustering) {
    for (auto& cluster : clustering.clusters) {
        std::sort(cluster.members.begin(), cluster.members.end());
        cluster.members.erase(std::unique(cluster.members.begin(), cluster.members.end()),
                              cluster.members.end());
    }
    std::stable_sort(clustering.clusters.begin(), clustering.clusters.end(),
                     [](const Cluster& a, const Cluster& b) {
                         int ma = a.members.empty() ? -1 : a.members.front();
                         int mb = b.members.empty() ? -1 : b.members.front();
                         return ma < mb;
                     });
}

int CategoricalDistribution::index_of(std::string_view label) const {
    for (size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == label) return static_cast<int>(i);
    }
    return -1;
}

int CategoricalDistribution::support_size() const {
    int n = 0;
    for (double p : probs) {
        if (p > 0.0) ++n;
    }
    return n;
}

bool is_distribution(const CategoricalDistribution& dist, double tol) {
    if (dist.labels.size() != dist.probs.size()) return false;
    if (dist.probs.empty()) return false;
    double sum = 0.0;
    for (double p : dist.probs) {
        if (p < 0.0 || !std::isfinite(p)) return false;
        sum += p;
    }
    return std::abs(sum - 1.0) <= tol;
}

CategoricalDistribution uniform_distribution(std::vector<std::string> labels) {
    CategoricalDistribution dist;
    dist.probs.assign(labels.size(), labels.empty() ? 0.0 : 1.0 / static_cast<double>(labels.size()));
    dist.labels = std::move(labels);
    return dist;
}

MatchAssignment MatchAssignment::none(int prediction_index) {
    MatchAssignment a;
    a.prediction_index = prediction_index;
    a.unmatched = true;
    return a;
}

MatchAssignment MatchAssignment::even_split(int prediction_index, std::vector<std::string> labels) {
    MatchAssignment a;
    a.prediction_index = prediction_index;
    if (labels.empty()) {
        a.unmatched = true;
        return a;
    }
    a.unmatched = false;
    const double w = 1.0 / static_cast<double>(labels.size());
    a.weights.reserve(labels.size());
    for (auto& label : labels) a.weights.emplace_back(std::move(label), w);
    return a;
}

std::vector<Diagnostic> validate_dataset(const std::vector<Question>& questions,
                                         const std::vector<AnswerSet>& gold) {
    std::vector<Diagnostic> diags;
    std::unordered_set<std::string> question_ids;
    for (const auto& q : questions) {
        if (q.id.empty()) {
            diags.push_back({q.id, "empty question id"});
            continue;
        }
        if (!question_ids.insert(q.id).second) {
            diags.push_back({q.id, "duplicate question id"});
        }
    }

    std::unordered_map<std::string, int> gold_counts;
    for (const auto& set : gold) {
        if (set.role != Role::Gold) {
            diags.push_back({set.question_id, "non-gold answer set in gold list"});
        }
        if (!question_ids.count(set.question_id)) {
            diags.push_back({set.question_id, "gold set for unknown question"});
        }
        if (set.answers.empty()) {
            diags.push_back({set.question_id, "empty gold set"});
        }
        if (++gold_counts[set.question_id] == 2) {
            diags.push_back({set.question_id, "duplicate gold"});
        }
    }
    for (const auto& q : questions) {
        if (!q.id.empty() && gold_counts.find(q.id) == gold_counts.end()) {
            diags.push_back({q.id, "missing gold answer set"});
        }
    }
    return diags;
}

std::vector<Diagnostic> validate_clustering(const Clustering& clustering, int n_gold_answers) {
    std::vector<Diagnostic> diags;
    const auto& qid = clustering.question_id;

    std::set<std::string> labels;
    for (const auto& cluster : clustering.clusters) {
        if (!labels.insert(cluster.label).second) {
            diags.push_back({qid, "duplicate cluster label '" + cluster.label + "'"});
        }
    }
    if (clustering.wrong_label && !labels.count(*clustering.wrong_label)) {
        diags.push_back({qid, "wrong-cluster label '" + *clustering.wrong_label + "' not present"});
    }

    std::vector<int> seen(static_cast<size_t>(std::max(0, n_gold_answers)), 0);
    for (const auto& cluster : clustering.clusters) {
        for (int index : cluster.members) {
            if (index < 0 || index >= n_gold_answers) {
                diags.push_back({qid, "index " + std::to_string(index) + " out of range"});
            } else if (++seen[static_cast<size_t>(index)] == 2) {
                diags.push_back({qid, "doubly-assigned index " + std::to_string(index)});
            }
        }
    }
    for (int i = 0; i < n_gold_answers; ++i) {
        if (seen[static_cast<size_t>(i)] == 0) {
            diags.push_back({qid, "uncovered index " + std::to_string(i)});
        }
    }
    return diags;
}

}  // namespace qadist
