#include <benchmark/benchmark.h>

#include <random>

#include "qadist/rng.hpp"
#include "qadist/score.hpp"
#include "qadist/stats.hpp"

using namespace qadist;

namespace {

CategoricalDistribution random_dist(int k, std::uint64_t seed) {
    auto rng = seeded_rng(seed);
    std::uniform_real_distribution<double> unit(0.05, 1.0);
    CategoricalDistribution dist;
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
        dist.labels.push_back("c" + std::to_string(i));
        dist.probs.push_back(unit(rng));
        total += dist.probs.back();
    }
    for (double& p : dist.probs) p /= total;
    return dist;
}

}  // namespace

static void BM_KlScore(benchmark::State& state) {
    const int k = static_cast<int>(state.range(0));
    const auto gold = random_dist(k, 1);
    const auto pred = random_dist(k, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kl_score(gold, pred));
    }
}
BENCHMARK(BM_KlScore)->Arg(8)->Arg(32)->Arg(128);

static void BM_GoldDistribution(benchmark::State& state) {
    Clustering clustering;
    clustering.question_id = "q";
    int index = 0;
    for (int c = 0; c < 8; ++c) {
        Cluster cluster;
        cluster.label = "c" + std::to_string(c);
        for (int m = 0; m < 12; ++m) cluster.members.push_back(index++);
        clustering.clusters.push_back(std::move(cluster));
    }
    const SmoothingConfig smoothing;
    for (auto _ : state) {
        benchmark::DoNotOptimize(gold_distribution(clustering, smoothing));
    }
}
BENCHMARK(BM_GoldDistribution);

static void BM_PredictedDistribution(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    std::vector<std::string> labels;
    for (int c = 0; c < 8; ++c) labels.push_back("c" + std::to_string(c));
    std::vector<MatchAssignment> assignments;
    auto rng = seeded_rng(5);
    std::uniform_int_distribution<int> pick(0, 7);
    for (int i = 0; i < n; ++i) {
        assignments.push_back(MatchAssignment::even_split(i, {labels[static_cast<size_t>(pick(rng))]}));
    }
    const SmoothingConfig smoothing;
    for (auto _ : state) {
        benchmark::DoNotOptimize(predicted_distribution(assignments, labels, smoothing));
    }
}
BENCHMARK(BM_PredictedDistribution)->Arg(100)->Arg(300);

static void BM_Spearman(benchmark::State& state) {
    const size_t n = static_cast<size_t>(state.range(0));
    auto rng = seeded_rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> xs(n), ys(n);
    for (size_t i = 0; i < n; ++i) {
        xs[i] = unit(rng);
        ys[i] = unit(rng);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(spearman(xs, ys));
    }
}
BENCHMARK(BM_Spearman)->Arg(50)->Arg(500);
