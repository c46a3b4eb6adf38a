#include <benchmark/benchmark.h>

#include <random>

#include "qadist/match.hpp"
#include "qadist/rng.hpp"

using namespace qadist;

namespace {

struct MatchFixture {
    Clustering clustering;
    std::vector<AnswerVector> gold_vectors;
    std::vector<AnswerVector> predictions;
};

MatchFixture make_fixture(int gold_n, int prediction_n, int clusters, int dim) {
    auto rng = seeded_rng(23);
    std::normal_distribution<double> gauss(0.0, 0.25);
    std::uniform_real_distribution<double> center(-2.0, 2.0);

    std::vector<std::vector<double>> centroids(static_cast<size_t>(clusters),
                                               std::vector<double>(static_cast<size_t>(dim)));
    for (auto& c : centroids) {
        for (double& v : c) v = center(rng);
    }

    MatchFixture fixture;
    fixture.clustering.question_id = "q";
    fixture.clustering.clusters.resize(static_cast<size_t>(clusters));
    for (int c = 0; c < clusters; ++c) {
        fixture.clustering.clusters[static_cast<size_t>(c)].label = "c" + std::to_string(c);
    }
    for (int i = 0; i < gold_n; ++i) {
        const int c = i % clusters;
        AnswerVector v;
        v.covered_tokens = 1;
        v.total_tokens = 1;
        v.values = centroids[static_cast<size_t>(c)];
        for (double& x : v.values) x += gauss(rng);
        fixture.gold_vectors.push_back(std::move(v));
        fixture.clustering.clusters[static_cast<size_t>(c)].members.push_back(i);
    }
    for (int i = 0; i < prediction_n; ++i) {
        AnswerVector v;
        v.covered_tokens = 1;
        v.total_tokens = 1;
        v.values = centroids[static_cast<size_t>(i % clusters)];
        for (double& x : v.values) x += gauss(rng);
        fixture.predictions.push_back(std::move(v));
    }
    return fixture;
}

}  // namespace

static void BM_CosineMatch(benchmark::State& state) {
    const auto fixture = make_fixture(100, static_cast<int>(state.range(0)), 8, 16);
    MatcherConfig config;
    config.cosine_threshold = 0.6;
    for (auto _ : state) {
        for (size_t i = 0; i < fixture.predictions.size(); ++i) {
            benchmark::DoNotOptimize(match_cosine(static_cast<int>(i), fixture.predictions[i],
                                                  fixture.clustering, fixture.gold_vectors,
                                                  config));
        }
    }
}
BENCHMARK(BM_CosineMatch)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

static void BM_GaussianRegressionFit(benchmark::State& state) {
    const auto fixture = make_fixture(static_cast<int>(state.range(0)), 1, 8, 16);
    MatcherConfig config;
    config.kind = MatcherKind::GaussianRegression;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            GaussianRegressorSet::fit(fixture.clustering, fixture.gold_vectors, config));
    }
}
BENCHMARK(BM_GaussianRegressionFit)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_GaussianRegressionMatch(benchmark::State& state) {
    const auto fixture = make_fixture(100, static_cast<int>(state.range(0)), 8, 16);
    MatcherConfig config;
    config.kind = MatcherKind::GaussianRegression;
    const auto set = GaussianRegressorSet::fit(fixture.clustering, fixture.gold_vectors, config);
    for (auto _ : state) {
        for (size_t i = 0; i < fixture.predictions.size(); ++i) {
            benchmark::DoNotOptimize(set.match(static_cast<int>(i), fixture.predictions[i], config));
        }
    }
}
BENCHMARK(BM_GaussianRegressionMatch)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
