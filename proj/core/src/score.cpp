#include "qadist/score.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace qadist {

CategoricalDistribution gold_distribution(const Clustering& clustering,
                                          const SmoothingConfig& smoothing) {
    if (smoothing.dummy_count < 1) throw std::invalid_argument("dummy_count must be >= 1");

    CategoricalDistribution dist;
    double total = 0.0;
    for (const auto& cluster : clustering.clusters) {
        if (clustering.is_wrong(cluster.label)) continue;
        dist.labels.push_back(cluster.label);
        const double count = static_cast<double>(cluster.members.size()) + smoothing.dummy_count;
        dist.probs.push_back(count);
        total += count;
    }
    if (dist.labels.empty()) throw std::invalid_argument("no scorable clusters");
    for (double& p : dist.probs) p /= total;
    return dist;
}

CategoricalDistribution predicted_distribution(const std::vector<MatchAssignment>& assignments,
                                               const std::vector<std::string>& labels,
                                               const SmoothingConfig& smoothing) {
    if (smoothing.dummy_count < 1) throw std::invalid_argument("dummy_count must be >= 1");
    if (labels.empty()) throw std::invalid_argument("no labels");

    std::unordered_map<std::string, size_t> index;
    for (size_t i = 0; i < labels.size(); ++i) index.emplace(labels[i], i);

    std::vector<double> pseudo(labels.size(), static_cast<double>(smoothing.dummy_count));
    for (const auto& assignment : assignments) {
        if (assignment.unmatched) continue;
        for (const auto& [label, weight] : assignment.weights) {
            auto it = index.find(label);
            if (it == index.end()) continue;  // wrong-cluster weight is discarded
            pseudo[it->second] += weight;
        }
    }

    double total = 0.0;
    for (double p : pseudo) total += p;
    CategoricalDistribution dist;
    dist.labels = labels;
    dist.probs = std::move(pseudo);
    for (double& p : dist.probs) p /= total;
    return dist;
}

double kl_score(const CategoricalDistribution& gold, const CategoricalDistribution& predicted) {
    if (gold.labels != predicted.labels) throw std::invalid_argument("kl_score: label mismatch");
    double divergence = 0.0;
    for (size_t i = 0; i < gold.probs.size(); ++i) {
        const double g = gold.probs[i];
        const double p = predicted.probs[i];
        if (g <= 0.0 || p <= 0.0) {
            throw std::invalid_argument("kl_score: probabilities must be strictly positive");
        }
        divergence += g * std::log(g / p);
    }
    return divergence;
}

double maxanswer_at_k(const Clustering& clustering,
                      const std::vector<MatchAssignment>& ranked_assignments, int k) {
    if (k < 1) throw std::invalid_argument("maxanswer_at_k: k must be >= 1");

    std::unordered_map<std::string, int> cluster_size;
    std::vector<int> sizes;
    for (const auto& cluster : clustering.clusters) {
        if (clustering.is_wrong(cluster.label)) continue;
        cluster_size.emplace(cluster.label, static_cast<int>(cluster.members.size()));
        sizes.push_back(static_cast<int>(cluster.members.size()));
    }
    if (sizes.empty()) return 0.0;

    std::sort(sizes.begin(), sizes.end(), std::greater<int>());
    int denominator = 0;
    for (size_t i = 0; i < std::min(sizes.size(), static_cast<size_t>(k)); ++i) {
        denominator += sizes[i];
    }
    if (denominator == 0) return 0.0;

    std::unordered_set<std::string> hit;
    int numerator = 0;
    int used = 0;
    for (const auto& assignment : ranked_assignments) {
        if (used >= k) break;
        if (assignment.unmatched) continue;
        bool counted = false;
        for (const auto& [label, weight] : assignment.weights) {
            (void)weight;
            auto it = cluster_size.find(label);
            if (it == cluster_size.end()) continue;  // wrong cluster earns nothing
            counted = true;
            if (hit.insert(label).second) numerator += it->second;
        }
        if (counted) ++used;
    }
    return static_cast<double>(numerator) / static_cast<double>(denominator);
}

}  // namespace qadist
