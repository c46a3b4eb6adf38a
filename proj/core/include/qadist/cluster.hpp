#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qadist/embedding.hpp"
#include "qadist/types.hpp"

namespace qadist {

enum class ClusterAlgorithm { Hac, XMeans, GMeans, HumanFile };

const char* to_string(ClusterAlgorithm algorithm);
std::optional<ClusterAlgorithm> cluster_algorithm_from_string(std::string_view name);

// Ward linkage over Euclidean distance is the only HAC flavor; exactly one
// of cluster count / distance threshold must be set as the stopping rule.
struct ClusterConfig {
    ClusterAlgorithm algorithm = ClusterAlgorithm::Hac;
    std::optional<int> hac_cluster_count = 8;
    std::optional<double> hac_distance_threshold;
    int xmeans_kmax = 8;
    double gmeans_significance = 0.05;
    std::uint64_t seed = 0;
};

// Agglomeration trace of Ward HAC. merge_costs is non-decreasing; the test
// suite asserts this over random inputs.
struct WardResult {
    std::vector<int> assignment;      // point index -> cluster id (0..k-1)
    std::vector<double> merge_costs;  // Ward distance at each accepted merge
};

WardResult hac_ward(const std::vector<std::vector<double>>& points,
                    std::optional<int> cluster_count,
                    std::optional<double> distance_threshold);

namespace detail {

struct KMeansResult {
    std::vector<int> assignment;
    std::vector<std::vector<double>> centroids;
};

// Lloyd iterations with k-means++ style seeding. Equal distances break
// toward the lowest cluster index; empty clusters are re-seeded with the
// point farthest from its centroid, so the result never has empty clusters.
KMeansResult kmeans(const std::vector<std::vector<double>>& points, int k, std::uint64_t seed);

std::vector<int> xmeans(const std::vector<std::vector<double>>& points, int kmax, std::uint64_t seed);

std::vector<int> gmeans(const std::vector<std::vector<double>>& points, double significance,
                        std::uint64_t seed);

}  // namespace detail

// Clusters the gold answer vectors with the configured algorithm.
// Deterministic given (vectors, config). OOV-flagged vectors are placed in
// singleton clusters rather than polluting centroid geometry. Labels are
// "c0".."cK-1" after canonical ordering by smallest member index.
Clustering cluster_gold(const std::string& question_id, const std::vector<AnswerVector>& vectors,
                        const ClusterConfig& config);

// Loads a human clustering file ({question_id, clusters: [{label, indices}]})
// and validates coverage/disjointness against the gold answer set. A cluster
// labeled "wrong" (case-insensitive) is flagged as discardable.
Clustering load_human_clustering(const std::string& path, const AnswerSet& gold);

}  // namespace qadist
