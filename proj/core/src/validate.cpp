#include "qadist/validate.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "qadist/parallel.hpp"
#include "qadist/rng.hpp"
#include "qadist/stats.hpp"

namespace qadist {

using nlohmann::json;

PipelineSpec gold_pipeline_spec() {
    PipelineSpec spec;
    spec.name = "human+gold";
    spec.human_clustering = true;
    spec.gold_matching = true;
    return spec;
}

namespace {

std::vector<MatchAssignment> assignments_from_labels(const std::vector<std::string>& labels) {
    std::vector<MatchAssignment> assignments;
    assignments.reserve(labels.size());
    for (size_t i = 0; i < labels.size(); ++i) {
        assignments.push_back(MatchAssignment::even_split(static_cast<int>(i), {labels[i]}));
    }
    return assignments;
}

struct PipelineState {
    const PipelineSpec* spec = nullptr;
    Clustering clustering;
    CategoricalDistribution gold_dist;
    std::optional<MatchPipeline> matcher;
};

struct QuestionOutput {
    std::vector<CorrelationRow> rows;
    std::vector<SkipRecord> skipped;
    std::vector<ScatterPoint> scatter;
    // per (pipeline, sampler): the two KL series, for pooled correlation
    std::vector<std::pair<std::vector<double>, std::vector<double>>> series;
};

json validation_config_json(const ValidationConfig& config) {
    json doc;
    json pipelines = json::array();
    for (const auto& spec : config.pipelines) {
        json p;
        p["name"] = spec.name;
        p["human_clustering"] = spec.human_clustering;
        p["gold_matching"] = spec.gold_matching;
        if (!spec.human_clustering) {
            p["algorithm"] = to_string(spec.clustering.algorithm);
            if (spec.clustering.hac_cluster_count) {
                p["hac_cluster_count"] = *spec.clustering.hac_cluster_count;
            }
            if (spec.clustering.hac_distance_threshold) {
                p["hac_distance_threshold"] = *spec.clustering.hac_distance_threshold;
            }
            p["xmeans_kmax"] = spec.clustering.xmeans_kmax;
            p["gmeans_significance"] = spec.clustering.gmeans_significance;
        }
        if (!spec.gold_matching) {
            p["matcher"] = to_string(spec.matcher.kind);
            p["cosine_threshold"] = spec.matcher.cosine_threshold;
            p["gr_threshold"] = spec.matcher.gr_threshold;
            p["gr_ridge"] = spec.matcher.gr_ridge;
            p["wordnet_depth"] = spec.matcher.wordnet_depth;
        }
        p["score_by_maxanswer"] = spec.score_by_maxanswer;
        if (spec.score_by_maxanswer) p["maxanswer_k"] = spec.maxanswer_k;
        pipelines.push_back(std::move(p));
    }
    doc["pipelines"] = std::move(pipelines);
    json samplers = json::array();
    for (const auto& sampler : config.samplers) {
        samplers.push_back({{"kind", to_string(sampler.kind)},
                            {"n_samples_per_question", sampler.n_samples_per_question},
                            {"draw_size", sampler.draw_size}});
    }
    doc["samplers"] = std::move(samplers);
    doc["smoothing"]["dummy_count"] = config.smoothing.dummy_count;
    return doc;
}

}  // namespace

CategoricalDistribution build_model_distribution(const AnswerSet& model_predictions,
                                                 const Clustering& human_clustering,
                                                 const AnswerSet& gold, const Resources& resources,
                                                 const MatcherConfig& matcher,
                                                 const SmoothingConfig& smoothing) {
    const MatchPipeline pipeline(human_clustering, gold, resources, matcher,
                                 /*exact_shortcut=*/true);
    std::vector<MatchAssignment> assignments;
    assignments.reserve(model_predictions.answers.size());
    for (size_t p = 0; p < model_predictions.answers.size(); ++p) {
        assignments.push_back(pipeline.match(static_cast<int>(p), model_predictions.answers[p]));
    }
    const auto gold_dist = gold_distribution(human_clustering, smoothing);
    return predicted_distribution(assignments, gold_dist.labels, smoothing);
}

ValidationReport run_validation(
    const Dataset& dataset, const std::map<std::string, Clustering>& human_clusterings,
    const Resources& resources, const ValidationConfig& config,
    const std::map<std::string, CategoricalDistribution>* model_dists) {
    if (config.pipelines.empty()) throw std::invalid_argument("run_validation: no pipelines");
    if (config.samplers.empty()) throw std::invalid_argument("run_validation: no samplers");
    for (const auto& sampler : config.samplers) {
        if (sampler.n_samples_per_question < 2) {
            throw std::invalid_argument(
                "run_validation: correlation needs at least two samples per question");
        }
        if (sampler.draw_size < 1) {
            throw std::invalid_argument("run_validation: draw_size must be >= 1");
        }
    }

    ValidationReport report;
    report.config_digest = to_hex(fnv1a64(validation_config_json(config).dump()));
    report.seed = config.seed;
    report.samplers = config.samplers;

    std::vector<const Question*> questions;
    for (const auto& q : dataset.questions) questions.push_back(&q);
    std::sort(questions.begin(), questions.end(),
              [](const Question* a, const Question* b) { return a->id < b->id; });

    const size_t n_pipelines = config.pipelines.size();
    const size_t n_samplers = config.samplers.size();
    std::vector<QuestionOutput> outputs(questions.size());

    parallel_for(questions.size(), config.threads, [&](size_t qi) {
        const Question& question = *questions[qi];
        auto& output = outputs[qi];
        output.series.resize(n_pipelines * n_samplers);
        try {
            const auto* gold = dataset.gold_for(question.id);
            if (!gold || gold->answers.empty()) {
                output.skipped.push_back({question.id, "empty gold set"});
                return;
            }
            auto human_it = human_clusterings.find(question.id);
            if (human_it == human_clusterings.end()) {
                output.skipped.push_back({question.id, "no human clustering"});
                return;
            }
            const Clustering& human = human_it->second;
            const auto gold_dist = gold_distribution(human, config.smoothing);
            if (gold_dist.labels.size() < 2) {
                output.skipped.push_back({question.id, "fewer than two scorable clusters"});
                return;
            }

            // per-pipeline state (clustering + matcher), built once per question
            std::vector<PipelineState> states(n_pipelines);
            for (size_t p = 0; p < n_pipelines; ++p) {
                const auto& spec = config.pipelines[p];
                auto& state = states[p];
                state.spec = &spec;
                if (spec.human_clustering) {
                    state.clustering = human;
                } else {
                    ClusterConfig cluster_config = spec.clustering;
                    cluster_config.seed = derive_seed(config.seed, question.id, 0x5eedULL + p);
                    state.clustering = clustering_for_question(*gold, resources, cluster_config);
                }
                state.gold_dist = gold_distribution(state.clustering, config.smoothing);
                if (spec.gold_matching) {
                    if (!spec.human_clustering) {
                        throw std::runtime_error("gold matching requires human clustering");
                    }
                } else {
                    state.matcher.emplace(state.clustering, *gold, resources, spec.matcher,
                                          /*exact_shortcut=*/false);
                }
            }

            const CategoricalDistribution* model_dist = nullptr;
            if (model_dists) {
                auto it = model_dists->find(question.id);
                if (it != model_dists->end()) model_dist = &it->second;
            }

            // gold KL and per-pipeline KL series per sampler
            std::vector<std::vector<double>> gold_series(n_samplers);
            std::vector<std::vector<std::vector<double>>> auto_series(
                n_pipelines, std::vector<std::vector<double>>(n_samplers));
            std::vector<bool> sampler_skipped(n_samplers, false);

            for (size_t si = 0; si < n_samplers; ++si) {
                const SamplerConfig& sampler_config = config.samplers[si];
                const SamplerKind sampler = sampler_config.kind;
                if (sampler == SamplerKind::ModelMix && !model_dist) {
                    output.skipped.push_back(
                        {question.id, "model distribution missing for model_mix"});
                    sampler_skipped[si] = true;
                    continue;
                }
                for (int s = 0; s < sampler_config.n_samples_per_question; ++s) {
                    auto rng = seeded_rng(derive_seed(
                        mix64(config.seed ^ sampler_config.seed), question.id,
                        (static_cast<std::uint64_t>(si) << 32) | static_cast<std::uint64_t>(s)));
                    CategoricalDistribution target;
                    try {
                        switch (sampler) {
                            case SamplerKind::Diverse:
                                target = sample_diverse(gold_dist, rng).dist;
                                break;
                            case SamplerKind::ModelMix:
                                target = sample_model_mix(*model_dist, gold_dist, rng).dist;
                                break;
                            case SamplerKind::MissingAnswer:
                                target = sample_missing_answer(gold_dist, rng);
                                break;
                            case SamplerKind::WrongRanking:
                                target = sample_wrong_ranking(gold_dist, rng);
                                break;
                            case SamplerKind::WrongScore:
                                target = sample_wrong_score(gold_dist, rng);
                                break;
                        }
                    } catch (const std::exception& e) {
                        output.skipped.push_back({question.id, std::string(to_string(sampler)) +
                                                                   ": " + e.what()});
                        sampler_skipped[si] = true;
                        break;
                    }

                    const auto realized =
                        realize_answers(target, human, *gold, sampler_config.draw_size, rng);

                    // gold pipeline score comes free from the recorded labels
                    const auto true_assignments = assignments_from_labels(realized.source_labels);
                    const auto gold_pred =
                        predicted_distribution(true_assignments, gold_dist.labels, config.smoothing);
                    const double gold_kl = kl_score(gold_dist, gold_pred);
                    gold_series[si].push_back(gold_kl);

                    for (size_t p = 0; p < n_pipelines; ++p) {
                        auto& state = states[p];
                        double auto_score = 0.0;
                        if (state.spec->gold_matching) {
                            auto_score = gold_kl;
                        } else {
                            std::vector<MatchAssignment> assignments;
                            assignments.reserve(realized.answers.answers.size());
                            for (size_t a = 0; a < realized.answers.answers.size(); ++a) {
                                assignments.push_back(state.matcher->match(
                                    static_cast<int>(a), realized.answers.answers[a]));
                            }
                            if (state.spec->score_by_maxanswer) {
                                // ranked-list baseline, flipped so that larger
                                // still means worse like KL
                                auto_score = 1.0 - maxanswer_at_k(state.clustering, assignments,
                                                                  state.spec->maxanswer_k);
                            } else {
                                const auto auto_pred = predicted_distribution(
                                    assignments, state.gold_dist.labels, config.smoothing);
                                auto_score = kl_score(state.gold_dist, auto_pred);
                            }
                        }
                        auto_series[p][si].push_back(auto_score);
                        if (config.emit_scatter) {
                            output.scatter.push_back({state.spec->name, to_string(sampler),
                                                      question.id, s, gold_kl, auto_score});
                        }
                    }
                }
            }

            for (size_t si = 0; si < n_samplers; ++si) {
                if (sampler_skipped[si]) continue;
                for (size_t p = 0; p < n_pipelines; ++p) {
                    const auto rho = spearman(gold_series[si], auto_series[p][si]);
                    if (!rho) {
                        output.skipped.push_back(
                            {question.id, std::string(to_string(config.samplers[si].kind)) + "/" +
                                              config.pipelines[p].name +
                                              ": spearman undefined (zero rank variance)"});
                        continue;
                    }
                    output.rows.push_back({config.pipelines[p].name,
                                           to_string(config.samplers[si].kind), question.id, *rho,
                                           static_cast<int>(gold_series[si].size())});
                    auto& [gs, as] = output.series[p * n_samplers + si];
                    gs = gold_series[si];
                    as = auto_series[p][si];
                }
            }
        } catch (const std::exception& e) {
            output.skipped.push_back({question.id, e.what()});
        }
    });

    // merge in question order
    std::vector<std::pair<std::vector<double>, std::vector<double>>> pooled(
        n_pipelines * n_samplers);
    for (auto& output : outputs) {
        for (auto& row : output.rows) report.rows.push_back(std::move(row));
        for (auto& skip : output.skipped) report.skipped.push_back(std::move(skip));
        for (auto& point : output.scatter) report.scatter.push_back(std::move(point));
        for (size_t idx = 0; idx < output.series.size(); ++idx) {
            auto& [gs, as] = output.series[idx];
            pooled[idx].first.insert(pooled[idx].first.end(), gs.begin(), gs.end());
            pooled[idx].second.insert(pooled[idx].second.end(), as.begin(), as.end());
        }
    }

    for (size_t p = 0; p < n_pipelines; ++p) {
        for (size_t si = 0; si < n_samplers; ++si) {
            CorrelationAggregate aggregate;
            aggregate.pipeline = config.pipelines[p].name;
            aggregate.sampler = to_string(config.samplers[si].kind);
            double sum = 0.0;
            int count = 0;
            for (const auto& row : report.rows) {
                if (row.pipeline == aggregate.pipeline && row.sampler == aggregate.sampler) {
                    sum += row.spearman;
                    ++count;
                }
            }
            aggregate.n_questions = count;
            aggregate.mean_spearman = count > 0 ? sum / count : 0.0;
            const auto& [gs, as] = pooled[p * n_samplers + si];
            if (gs.size() >= 2) {
                aggregate.pooled_spearman = spearman(gs, as).value_or(0.0);
            }
            report.aggregates.push_back(std::move(aggregate));
        }
    }
    return report;
}

std::string validation_report_to_json(const ValidationReport& report) {
    json doc;
    doc["config_digest"] = report.config_digest;
    doc["seed"] = report.seed;
    json samplers = json::array();
    for (const auto& sampler : report.samplers) {
        samplers.push_back({{"kind", to_string(sampler.kind)},
                            {"n_samples_per_question", sampler.n_samples_per_question},
                            {"draw_size", sampler.draw_size}});
    }
    doc["samplers"] = std::move(samplers);

    json rows = json::array();
    for (const auto& row : report.rows) {
        rows.push_back({{"pipeline", row.pipeline},
                        {"sampler", row.sampler},
                        {"question_id", row.question_id},
                        {"spearman", round_sig(row.spearman)},
                        {"n_samples", row.n_samples}});
    }
    doc["rows"] = std::move(rows);

    json aggregates = json::array();
    for (const auto& aggregate : report.aggregates) {
        aggregates.push_back({{"pipeline", aggregate.pipeline},
                              {"sampler", aggregate.sampler},
                              {"mean_spearman", round_sig(aggregate.mean_spearman)},
                              {"pooled_spearman", round_sig(aggregate.pooled_spearman)},
                              {"n_questions", aggregate.n_questions}});
    }
    doc["aggregate"] = std::move(aggregates);

    json skipped = json::array();
    for (const auto& skip : report.skipped) {
        skipped.push_back({{"question_id", skip.question_id}, {"reason", skip.reason}});
    }
    doc["skipped"] = std::move(skipped);
    return doc.dump(2) + "\n";
}

void write_validation_report(const ValidationReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write report: " + path);
    out << validation_report_to_json(report);
}

void write_correlation_csv(const ValidationReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write csv: " + path);
    out << "pipeline,sampler,question_id,spearman,n_samples\n";
    for (const auto& row : report.rows) {
        out << row.pipeline << "," << row.sampler << "," << row.question_id << ","
            << round_sig(row.spearman) << "," << row.n_samples << "\n";
    }
}

void write_aggregate_csv(const ValidationReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write csv: " + path);

    std::vector<std::string> pipelines;
    std::vector<std::string> samplers;
    for (const auto& aggregate : report.aggregates) {
        if (std::find(pipelines.begin(), pipelines.end(), aggregate.pipeline) == pipelines.end()) {
            pipelines.push_back(aggregate.pipeline);
        }
        if (std::find(samplers.begin(), samplers.end(), aggregate.sampler) == samplers.end()) {
            samplers.push_back(aggregate.sampler);
        }
    }
    out << "pipeline";
    for (const auto& sampler : samplers) out << "," << sampler;
    out << "\n";
    for (const auto& pipeline : pipelines) {
        out << pipeline;
        for (const auto& sampler : samplers) {
            double value = 0.0;
            for (const auto& aggregate : report.aggregates) {
                if (aggregate.pipeline == pipeline && aggregate.sampler == sampler) {
                    value = aggregate.mean_spearman;
                }
            }
            out << "," << round_sig(value);
        }
        out << "\n";
    }
}

void write_scatter_csv(const ValidationReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write csv: " + path);
    out << "pipeline,sampler,question_id,sample_index,gold_kl,auto_kl\n";
    for (const auto& point : report.scatter) {
        out << point.pipeline << "," << point.sampler << "," << point.question_id << ","
            << point.sample_index << "," << round_sig(point.gold_kl) << ","
            << round_sig(point.auto_kl) << "\n";
    }
}

}  // namespace qadist
