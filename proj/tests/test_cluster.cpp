#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "qadist/cluster.hpp"
#include "qadist/rng.hpp"
#include "support/fixture.hpp"

using namespace qadist;
using testsupport::TempDir;
using testsupport::write_file;

namespace {

// planted blobs around the given centroids, `per` points each
std::vector<AnswerVector> planted_points(const std::vector<std::vector<double>>& centroids,
                                         int per, double noise, std::uint64_t seed) {
    auto rng = seeded_rng(seed);
    std::normal_distribution<double> gauss(0.0, noise);
    std::vector<AnswerVector> vectors;
    for (const auto& centroid : centroids) {
        for (int i = 0; i < per; ++i) {
            AnswerVector v;
            v.covered_tokens = 1;
            v.total_tokens = 1;
            v.values = centroid;
            for (double& x : v.values) x += gauss(rng);
            vectors.push_back(std::move(v));
        }
    }
    return vectors;
}

// partition as a set of member-index sets, labels ignored
std::set<std::set<int>> partition_of(const Clustering& clustering) {
    std::set<std::set<int>> partition;
    for (const auto& cluster : clustering.clusters) {
        partition.insert(std::set<int>(cluster.members.begin(), cluster.members.end()));
    }
    return partition;
}

}  // namespace

TEST_SUITE("cluster") {

TEST_CASE("hac recovers two well-separated planted groups") {
    const std::vector<std::vector<double>> centroids{{0.0, 0.0}, {10.0, 10.0}};
    const auto vectors = planted_points(centroids, 10, 0.2, 5);

    ClusterConfig config;
    config.hac_cluster_count = 2;
    const auto clustering = cluster_gold("q", vectors, config);

    // nearest-centroid oracle on the planted data
    std::set<std::set<int>> expected;
    std::set<int> first, second;
    for (int i = 0; i < 20; ++i) {
        double d0 = 0.0, d1 = 0.0;
        for (size_t d = 0; d < 2; ++d) {
            d0 += (vectors[static_cast<size_t>(i)].values[d] - centroids[0][d]) *
                  (vectors[static_cast<size_t>(i)].values[d] - centroids[0][d]);
            d1 += (vectors[static_cast<size_t>(i)].values[d] - centroids[1][d]) *
                  (vectors[static_cast<size_t>(i)].values[d] - centroids[1][d]);
        }
        (d0 < d1 ? first : second).insert(i);
    }
    expected.insert(first);
    expected.insert(second);
    CHECK(partition_of(clustering) == expected);
}

TEST_CASE("ward merge costs are non-decreasing") {
    auto rng = seeded_rng(17);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::vector<double>> points(30, std::vector<double>(4));
        for (auto& p : points) {
            for (double& v : p) v = unit(rng);
        }
        const auto result = hac_ward(points, 1, std::nullopt);
        REQUIRE(result.merge_costs.size() == points.size() - 1);
        for (size_t i = 1; i < result.merge_costs.size(); ++i) {
            CHECK(result.merge_costs[i] >= result.merge_costs[i - 1] - 1e-9);
        }
    }
}

TEST_CASE("identical vectors collapse to one cluster") {
    std::vector<AnswerVector> vectors(12);
    for (auto& v : vectors) {
        v.values = {1.0, 2.0, 3.0};
        v.covered_tokens = 1;
        v.total_tokens = 1;
    }
    SUBCASE("hac with a distance threshold") {
        ClusterConfig config;
        config.hac_cluster_count.reset();
        config.hac_distance_threshold = 0.5;
        CHECK(cluster_gold("q", vectors, config).clusters.size() == 1);
    }
    SUBCASE("xmeans") {
        ClusterConfig config;
        config.algorithm = ClusterAlgorithm::XMeans;
        CHECK(cluster_gold("q", vectors, config).clusters.size() == 1);
    }
    SUBCASE("gmeans") {
        ClusterConfig config;
        config.algorithm = ClusterAlgorithm::GMeans;
        CHECK(cluster_gold("q", vectors, config).clusters.size() == 1);
    }
}

TEST_CASE("requesting more clusters than vectors is an error") {
    const auto vectors = planted_points({{0.0, 0.0}}, 3, 0.1, 9);
    ClusterConfig config;
    config.hac_cluster_count = 8;
    CHECK_THROWS_AS(cluster_gold("q", vectors, config), std::invalid_argument);
}

TEST_CASE("gmeans finds eight planted blobs within one of the truth") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto rng = seeded_rng(mix64(seed * 77 + 1));
        const auto centroids = testsupport::planted_centroids(8, 6, rng);
        std::vector<std::vector<double>> scaled = centroids;
        for (auto& c : scaled) {
            for (double& v : c) v *= 4.0;
        }
        const auto vectors = planted_points(scaled, 30, 0.25, seed * 31 + 7);
        ClusterConfig config;
        config.algorithm = ClusterAlgorithm::GMeans;
        config.seed = seed;
        const auto clustering = cluster_gold("q", vectors, config);
        CHECK(clustering.clusters.size() >= 7);
        CHECK(clustering.clusters.size() <= 9);
    }
}

TEST_CASE("xmeans splits up to kmax and never emits empty clusters") {
    auto rng = seeded_rng(4242);
    const auto centroids = testsupport::planted_centroids(4, 5, rng);
    std::vector<std::vector<double>> scaled = centroids;
    for (auto& c : scaled) {
        for (double& v : c) v *= 5.0;
    }
    const auto vectors = planted_points(scaled, 25, 0.2, 3);

    ClusterConfig config;
    config.algorithm = ClusterAlgorithm::XMeans;
    config.xmeans_kmax = 6;
    const auto clustering = cluster_gold("q", vectors, config);
    CHECK(clustering.clusters.size() >= 3);
    CHECK(clustering.clusters.size() <= 6);
    for (const auto& cluster : clustering.clusters) CHECK(!cluster.members.empty());
    CHECK(validate_clustering(clustering, static_cast<int>(vectors.size())).empty());
}

TEST_CASE("clustering is deterministic for a fixed seed") {
    auto rng = seeded_rng(808);
    const auto centroids = testsupport::planted_centroids(5, 8, rng);
    const auto vectors = planted_points(centroids, 12, 0.3, 55);
    for (const auto algorithm :
         {ClusterAlgorithm::Hac, ClusterAlgorithm::XMeans, ClusterAlgorithm::GMeans}) {
        ClusterConfig config;
        config.algorithm = algorithm;
        config.hac_cluster_count = 5;
        config.xmeans_kmax = 8;
        config.seed = 123;
        const auto a = cluster_gold("q", vectors, config);
        const auto b = cluster_gold("q", vectors, config);
        CHECK(partition_of(a) == partition_of(b));
        // labels follow the canonical order of smallest member index
        for (size_t c = 0; c + 1 < a.clusters.size(); ++c) {
            CHECK(a.clusters[c].members.front() < a.clusters[c + 1].members.front());
        }
    }
}

TEST_CASE("oov vectors become singleton clusters") {
    auto vectors = planted_points({{0.0, 0.0}, {8.0, 8.0}}, 6, 0.2, 77);
    AnswerVector oov;
    oov.values = {0.0, 0.0};
    oov.covered_tokens = 0;
    oov.total_tokens = 1;
    vectors.push_back(oov);
    vectors.push_back(oov);

    ClusterConfig config;
    config.hac_cluster_count = 2;
    const auto clustering = cluster_gold("q", vectors, config);
    REQUIRE(clustering.clusters.size() == 4);
    int singletons = 0;
    for (const auto& cluster : clustering.clusters) {
        if (cluster.members.size() == 1) ++singletons;
    }
    CHECK(singletons == 2);
    CHECK(validate_clustering(clustering, static_cast<int>(vectors.size())).empty());
}

TEST_CASE("human clustering file loads with coverage checks and the wrong flag") {
    TempDir tmp;
    AnswerSet gold;
    gold.question_id = "q7";
    for (int i = 0; i < 6; ++i) gold.answers.push_back("a" + std::to_string(i));

    SUBCASE("direct load") {
        const auto path = tmp.file("clusters.json");
        write_file(path, R"({"question_id":"q7","clusters":[
            {"label":"tools","indices":[0,1,2]},
            {"label":"people","indices":[3,4]},
            {"label":"Wrong","indices":[5]}]})");
        const auto clustering = load_human_clustering(path, gold);
        CHECK(clustering.clusters.size() == 3);
        REQUIRE(clustering.wrong_label.has_value());
        CHECK(*clustering.wrong_label == "Wrong");
        CHECK(clustering.scored_labels() == std::vector<std::string>{"tools", "people"});
    }
    SUBCASE("uncovered index names the index") {
        const auto path = tmp.file("gap.json");
        write_file(path, R"({"question_id":"q7","clusters":[
            {"label":"tools","indices":[0,1,2]},
            {"label":"people","indices":[3,5]}]})");
        CHECK_THROWS_WITH_AS(load_human_clustering(path, gold),
                             doctest::Contains("uncovered index 4"), std::runtime_error);
    }
    SUBCASE("doubly assigned index names the index") {
        const auto path = tmp.file("dup.json");
        write_file(path, R"({"question_id":"q7","clusters":[
            {"label":"tools","indices":[0,1,2,3]},
            {"label":"people","indices":[3,4,5]}]})");
        CHECK_THROWS_WITH_AS(load_human_clustering(path, gold),
                             doctest::Contains("doubly-assigned index 3"), std::runtime_error);
    }
}

}  // TEST_SUITE
