#include <benchmark/benchmark.h>

#include <random>

#include "qadist/cluster.hpp"
#include "qadist/rng.hpp"

using namespace qadist;

namespace {

std::vector<AnswerVector> blob_vectors(int n, int dim, int blobs, std::uint64_t seed) {
    auto rng = seeded_rng(seed);
    std::normal_distribution<double> gauss(0.0, 0.3);
    std::uniform_real_distribution<double> center(-3.0, 3.0);
    std::vector<std::vector<double>> centroids(static_cast<size_t>(blobs),
                                               std::vector<double>(static_cast<size_t>(dim)));
    for (auto& c : centroids) {
        for (double& v : c) v = center(rng);
    }
    std::vector<AnswerVector> vectors(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        auto& v = vectors[static_cast<size_t>(i)];
        v.covered_tokens = 1;
        v.total_tokens = 1;
        v.values = centroids[static_cast<size_t>(i % blobs)];
        for (double& x : v.values) x += gauss(rng);
    }
    return vectors;
}

}  // namespace

static void BM_HacWard(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto vectors = blob_vectors(n, 16, 8, 11);
    ClusterConfig config;
    config.hac_cluster_count = 8;
    for (auto _ : state) {
        benchmark::DoNotOptimize(cluster_gold("q", vectors, config));
    }
}
BENCHMARK(BM_HacWard)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_XMeans(benchmark::State& state) {
    const auto vectors = blob_vectors(static_cast<int>(state.range(0)), 16, 8, 13);
    ClusterConfig config;
    config.algorithm = ClusterAlgorithm::XMeans;
    config.xmeans_kmax = 10;
    for (auto _ : state) {
        benchmark::DoNotOptimize(cluster_gold("q", vectors, config));
    }
}
BENCHMARK(BM_XMeans)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_GMeans(benchmark::State& state) {
    const auto vectors = blob_vectors(static_cast<int>(state.range(0)), 16, 8, 17);
    ClusterConfig config;
    config.algorithm = ClusterAlgorithm::GMeans;
    for (auto _ : state) {
        benchmark::DoNotOptimize(cluster_gold("q", vectors, config));
    }
}
BENCHMARK(BM_GMeans)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);
