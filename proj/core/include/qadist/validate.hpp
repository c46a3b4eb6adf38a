#pragma once

#include <map>
#include <string>
#include <vector>

#include "qadist/eval.hpp"
#include "qadist/sample.hpp"

namespace qadist {

// One automatic pipeline under validation: a clustering source plus a
// matching function. gold_matching uses the recorded true cluster of each
// sampled answer and is only meaningful with human clustering; together
// they form the reference pipeline whose self-correlation is 1. With
// score_by_maxanswer the pipeline scores sampled sets by 1 - MaxAnswer@k
// instead of KL, which is how the ranked-list baseline evaluator enters
// the comparison.
struct PipelineSpec {
    std::string name;
    bool human_clustering = false;
    ClusterConfig clustering;
    bool gold_matching = false;
    MatcherConfig matcher;
    bool score_by_maxanswer = false;
    int maxanswer_k = 10;
};

PipelineSpec gold_pipeline_spec();

struct ValidationConfig {
    std::vector<PipelineSpec> pipelines;
    std::vector<SamplerConfig> samplers;
    SmoothingConfig smoothing;
    std::uint64_t seed = 0;  // master seed; combined with each sampler's seed
    int threads = 1;
    bool emit_scatter = false;
};

struct CorrelationRow {
    std::string pipeline;
    std::string sampler;
    std::string question_id;
    double spearman = 0.0;
    int n_samples = 0;
};

struct CorrelationAggregate {
    std::string pipeline;
    std::string sampler;
    double mean_spearman = 0.0;    // average of per-question correlations
    double pooled_spearman = 0.0;  // single correlation over all samples
    int n_questions = 0;
};

struct ScatterPoint {
    std::string pipeline;
    std::string sampler;
    std::string question_id;
    int sample_index = 0;
    double gold_kl = 0.0;
    double auto_kl = 0.0;
};

struct ValidationReport {
    std::string config_digest;
    std::uint64_t seed = 0;
    std::vector<SamplerConfig> samplers;  // echo of the sampling setup
    std::vector<CorrelationRow> rows;
    std::vector<CorrelationAggregate> aggregates;
    std::vector<SkipRecord> skipped;
    std::vector<ScatterPoint> scatter;
};

// Metric-validation harness: per question, draws synthetic prediction sets
// from the configured samplers, scores them with the gold pipeline (human
// clustering + recorded matching) and with each automatic pipeline, and
// reports the Spearman correlation between the two KL series. Randomness is
// derived per (question, sampler, sample), so thread count does not change
// the output.
ValidationReport run_validation(
    const Dataset& dataset, const std::map<std::string, Clustering>& human_clusterings,
    const Resources& resources, const ValidationConfig& config,
    const std::map<std::string, CategoricalDistribution>* model_dists = nullptr);

// Model distribution over the human clustering's scorable labels, built by
// matching an externally supplied prediction set. Used as the ModelMix
// base distribution.
CategoricalDistribution build_model_distribution(const AnswerSet& model_predictions,
                                                 const Clustering& human_clustering,
                                                 const AnswerSet& gold, const Resources& resources,
                                                 const MatcherConfig& matcher,
                                                 const SmoothingConfig& smoothing);

std::string validation_report_to_json(const ValidationReport& report);
void write_validation_report(const ValidationReport& report, const std::string& path);
// Long-format rows: pipeline,sampler,question_id,spearman,n_samples
void write_correlation_csv(const ValidationReport& report, const std::string& path);
// Wide-format aggregate: one row per pipeline, one column per sampler.
void write_aggregate_csv(const ValidationReport& report, const std::string& path);
void write_scatter_csv(const ValidationReport& report, const std::string& path);

}  // namespace qadist
