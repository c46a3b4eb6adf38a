// qadist: probabilistic evaluation of open-ended multi-answer QA.
//
// Subcommands:
//   eval      score a prediction file against gold answers (KL + ranked baseline)
//   validate  correlate automatic pipelines with the gold pipeline on sampled sets
//   bound     KL concentration tail bound / minimum sample count
//   cluster   emit automatic clusterings for inspection

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qadist/bound.hpp"
#include "qadist/cluster.hpp"
#include "qadist/embedding.hpp"
#include "qadist/eval.hpp"
#include "qadist/io.hpp"
#include "qadist/match.hpp"
#include "qadist/rng.hpp"
#include "qadist/validate.hpp"

namespace {

struct CommonOptions {
    std::string gold_path;
    std::string embeddings_path;
    std::string wordnet_dir;
    std::string human_clusters_path;
    std::uint64_t seed = 0;
    int threads = 1;
    int dummy_count = 1;

    // matcher knobs
    double cosine_threshold = 0.5;
    double gr_threshold = 0.5;
    double gr_ridge = 0.01;
    int wordnet_depth = 2;
    bool exemplar_only = false;

    // clusterer knobs
    int hac_k = 8;
    std::optional<double> hac_threshold;
    int xmeans_kmax = 8;
    double gmeans_significance = 0.05;
};

void add_common_options(CLI::App* cmd, CommonOptions& opts, bool needs_gold = true) {
    auto* gold = cmd->add_option("--gold", opts.gold_path, "Gold dataset (JSON lines)");
    if (needs_gold) gold->required();
    cmd->add_option("--embeddings", opts.embeddings_path, "Word-vector text file")
        ->envname("QADIST_EMBEDDINGS");
    cmd->add_option("--wordnet", opts.wordnet_dir, "Lexical database directory")
        ->envname("QADIST_WORDNET_DIR");
    cmd->add_option("--human-clusters", opts.human_clusters_path,
                    "Human clustering file (JSON object or array)");
    cmd->add_option("--seed", opts.seed, "Master seed recorded in every output");
    cmd->add_option("--threads", opts.threads, "Worker threads for question-level parallelism");
    cmd->add_option("--dummy", opts.dummy_count, "Smoothing dummy count per category")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--cosine-threshold", opts.cosine_threshold, "Cosine match threshold");
    cmd->add_option("--gr-threshold", opts.gr_threshold, "Gaussian regression match threshold");
    cmd->add_option("--gr-ridge", opts.gr_ridge, "Gaussian regression ridge term");
    cmd->add_option("--wordnet-depth", opts.wordnet_depth, "Hypernym traversal depth");
    cmd->add_flag("--exemplar-only", opts.exemplar_only,
                  "Lexical matching against the first cluster member only");
    cmd->add_option("--hac-k", opts.hac_k, "HAC cluster count");
    cmd->add_option_function<double>(
        "--hac-threshold", [&opts](double v) { opts.hac_threshold = v; },
        "HAC Ward distance threshold (replaces --hac-k)");
    cmd->add_option("--xmeans-kmax", opts.xmeans_kmax, "X-means cluster cap");
    cmd->add_option("--gmeans-significance", opts.gmeans_significance,
                    "G-means Anderson-Darling significance");
}

qadist::ClusterConfig make_cluster_config(const CommonOptions& opts, const std::string& name) {
    const auto algorithm = qadist::cluster_algorithm_from_string(name);
    if (!algorithm) throw CLI::ValidationError("--clusterer", "unknown clusterer '" + name + "'");
    qadist::ClusterConfig config;
    config.algorithm = *algorithm;
    if (opts.hac_threshold) {
        config.hac_cluster_count.reset();
        config.hac_distance_threshold = *opts.hac_threshold;
    } else {
        config.hac_cluster_count = opts.hac_k;
    }
    config.xmeans_kmax = opts.xmeans_kmax;
    config.gmeans_significance = opts.gmeans_significance;
    config.seed = opts.seed;
    return config;
}

qadist::MatcherConfig make_matcher_config(const CommonOptions& opts, const std::string& name) {
    const auto kind = qadist::matcher_kind_from_string(name);
    if (!kind) throw CLI::ValidationError("--matcher", "unknown matcher '" + name + "'");
    qadist::MatcherConfig config;
    config.kind = *kind;
    config.cosine_threshold = opts.cosine_threshold;
    config.gr_threshold = opts.gr_threshold;
    config.gr_ridge = opts.gr_ridge;
    config.wordnet_depth = opts.wordnet_depth;
    config.wordnet_exemplar_only = opts.exemplar_only;
    config.wordnet_path = opts.wordnet_dir;
    return config;
}

// Loaded lazily so a run only pays for the resources its configuration uses.
struct LoadedResources {
    std::unique_ptr<qadist::EmbeddingTable> embeddings;
    std::unique_ptr<qadist::LexicalGraph> lexicon;
    std::map<std::string, qadist::Clustering> human_clusterings;
    qadist::Resources view;
};

LoadedResources load_resources(const CommonOptions& opts, const qadist::Dataset& dataset,
                               const std::vector<qadist::AnswerSet>* predictions,
                               bool need_embeddings, bool need_lexicon, bool need_human) {
    LoadedResources loaded;
    if (need_embeddings) {
        if (opts.embeddings_path.empty()) {
            throw CLI::ValidationError("--embeddings", "this configuration needs word vectors");
        }
        std::vector<const qadist::AnswerSet*> sets;
        for (const auto& g : dataset.gold) sets.push_back(&g);
        if (predictions) {
            for (const auto& p : *predictions) sets.push_back(&p);
        }
        const auto vocab = qadist::dataset_vocabulary(sets);
        loaded.embeddings = std::make_unique<qadist::EmbeddingTable>(
            qadist::load_vectors(opts.embeddings_path, &vocab));
        loaded.view.embeddings = loaded.embeddings.get();
    }
    if (need_lexicon) {
        if (opts.wordnet_dir.empty()) {
            throw CLI::ValidationError("--wordnet", "lexical matching needs a database directory");
        }
        loaded.lexicon =
            std::make_unique<qadist::LexicalGraph>(qadist::load_lexical_graph(opts.wordnet_dir));
        loaded.view.lexicon = loaded.lexicon.get();
    }
    if (need_human) {
        if (opts.human_clusters_path.empty()) {
            throw CLI::ValidationError("--human-clusters", "this configuration needs a clustering file");
        }
        loaded.human_clusterings =
            qadist::load_human_clusterings(opts.human_clusters_path, dataset);
        loaded.view.human_clusterings = &loaded.human_clusterings;
    }
    return loaded;
}

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> items;
    std::stringstream stream(csv);
    std::string item;
    while (std::getline(stream, item, ',')) {
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

int run_eval(const CommonOptions& opts, const std::string& predictions_path,
             const std::string& clusterer, const std::string& matcher, int maxanswer_k,
             const std::string& output_path) {
    const auto dataset = qadist::load_dataset_jsonl(opts.gold_path);
    const auto predictions = qadist::load_predictions_jsonl(predictions_path);

    qadist::EvalConfig config;
    config.clustering = make_cluster_config(opts, clusterer);
    config.matcher = make_matcher_config(opts, matcher);
    config.smoothing.dummy_count = opts.dummy_count;
    config.maxanswer_k = maxanswer_k;
    config.seed = opts.seed;
    config.threads = opts.threads;

    const bool need_embeddings = config.clustering.algorithm != qadist::ClusterAlgorithm::HumanFile ||
                                 config.matcher.kind != qadist::MatcherKind::WordNet;
    const auto loaded = load_resources(
        opts, dataset, &predictions, need_embeddings,
        config.matcher.kind == qadist::MatcherKind::WordNet,
        config.clustering.algorithm == qadist::ClusterAlgorithm::HumanFile);

    const auto report = qadist::evaluate_dataset(dataset, predictions, loaded.view, config);
    qadist::write_eval_report(report, config, output_path);

    std::printf("scored %zu questions (%zu skipped), mean KL %.6f -> %s\n",
                report.per_question.size(), report.skipped.size(), report.mean_kl,
                output_path.c_str());
    return 0;
}

int run_validate(const CommonOptions& opts, const std::string& clusterers_csv,
                 const std::string& matchers_csv, const std::string& samplers_csv, int n_samples,
                 int draw_size, bool with_maxanswer_baseline,
                 const std::string& model_predictions_path,
                 const std::string& model_matcher_name, const std::string& output_path,
                 const std::string& csv_path, const std::string& aggregate_csv_path,
                 const std::string& scatter_csv_path) {
    const auto dataset = qadist::load_dataset_jsonl(opts.gold_path);

    qadist::ValidationConfig config;
    config.smoothing.dummy_count = opts.dummy_count;
    config.seed = opts.seed;
    config.threads = opts.threads;
    config.emit_scatter = !scatter_csv_path.empty();

    for (const auto& sampler_name : split_list(samplers_csv)) {
        const auto kind = qadist::sampler_kind_from_string(sampler_name);
        if (!kind) throw CLI::ValidationError("--samplers", "unknown sampler '" + sampler_name + "'");
        qadist::SamplerConfig sampler;
        sampler.kind = *kind;
        sampler.n_samples_per_question = n_samples;
        sampler.draw_size = draw_size;
        config.samplers.push_back(sampler);
    }

    bool need_embeddings = false;
    bool need_lexicon = false;
    for (const auto& clusterer : split_list(clusterers_csv)) {
        for (const auto& matcher : split_list(matchers_csv)) {
            if (matcher == "gold") {
                if (clusterer != "human") continue;  // gold matching needs human clusters
                qadist::PipelineSpec spec = qadist::gold_pipeline_spec();
                config.pipelines.push_back(std::move(spec));
                continue;
            }
            qadist::PipelineSpec spec;
            spec.name = clusterer + "+" + matcher;
            spec.human_clustering = clusterer == "human";
            if (!spec.human_clustering) {
                spec.clustering = make_cluster_config(opts, clusterer);
                need_embeddings = true;
            }
            spec.matcher = make_matcher_config(opts, matcher);
            if (spec.matcher.kind == qadist::MatcherKind::WordNet) {
                need_lexicon = true;
            } else {
                need_embeddings = true;
            }
            if (with_maxanswer_baseline) {
                qadist::PipelineSpec baseline = spec;
                baseline.score_by_maxanswer = true;
                baseline.name += "+1-max@" + std::to_string(baseline.maxanswer_k);
                config.pipelines.push_back(std::move(baseline));
            }
            config.pipelines.push_back(std::move(spec));
        }
    }
    if (config.pipelines.empty()) {
        throw CLI::ValidationError("--clusterers", "no valid pipeline in the requested grid");
    }

    std::vector<qadist::AnswerSet> model_predictions;
    const bool wants_model_mix =
        std::any_of(config.samplers.begin(), config.samplers.end(), [](const auto& sampler) {
            return sampler.kind == qadist::SamplerKind::ModelMix;
        });
    if (wants_model_mix) {
        if (model_predictions_path.empty()) {
            throw CLI::ValidationError("--model-predictions", "model_mix needs a prediction file");
        }
        model_predictions = qadist::load_predictions_jsonl(model_predictions_path);
        const auto model_matcher = qadist::matcher_kind_from_string(model_matcher_name);
        if (!model_matcher) {
            throw CLI::ValidationError("--model-matcher", "unknown matcher '" + model_matcher_name + "'");
        }
        if (*model_matcher == qadist::MatcherKind::WordNet) {
            need_lexicon = true;
        } else {
            need_embeddings = true;
        }
    }

    const auto loaded = load_resources(opts, dataset,
                                       model_predictions.empty() ? nullptr : &model_predictions,
                                       need_embeddings, need_lexicon, /*need_human=*/true);

    std::map<std::string, qadist::CategoricalDistribution> model_dists;
    if (wants_model_mix) {
        const auto matcher_config = make_matcher_config(opts, model_matcher_name);
        for (const auto& prediction_set : model_predictions) {
            auto human_it = loaded.human_clusterings.find(prediction_set.question_id);
            const auto* gold = dataset.gold_for(prediction_set.question_id);
            if (human_it == loaded.human_clusterings.end() || !gold) continue;
            model_dists.emplace(prediction_set.question_id,
                                qadist::build_model_distribution(prediction_set, human_it->second,
                                                                 *gold, loaded.view, matcher_config,
                                                                 config.smoothing));
        }
    }

    const auto report = qadist::run_validation(dataset, loaded.human_clusterings, loaded.view,
                                               config, wants_model_mix ? &model_dists : nullptr);

    if (!output_path.empty()) qadist::write_validation_report(report, output_path);
    if (!csv_path.empty()) qadist::write_correlation_csv(report, csv_path);
    if (!aggregate_csv_path.empty()) qadist::write_aggregate_csv(report, aggregate_csv_path);
    if (!scatter_csv_path.empty()) qadist::write_scatter_csv(report, scatter_csv_path);

    for (const auto& aggregate : report.aggregates) {
        std::printf("%-24s %-16s mean rho %+.4f  pooled %+.4f  (%d questions)\n",
                    aggregate.pipeline.c_str(), aggregate.sampler.c_str(),
                    aggregate.mean_spearman, aggregate.pooled_spearman, aggregate.n_questions);
    }
    if (!report.skipped.empty()) {
        std::fprintf(stderr, "%zu skipped entries (see report)\n", report.skipped.size());
    }
    return 0;
}

int run_bound(int n, int k, double epsilon, double c1, double c2, const std::string& sweep,
              std::optional<double> target, const std::string& output_path) {
    qadist::BoundParams params;
    params.k = k;
    params.epsilon = epsilon;
    if (c1 > 0.0) params.c1 = c1;
    if (c2 > 0.0) params.c2 = c2;

    if (target) {
        const int minimal = qadist::min_samples(k, epsilon, *target, params);
        params.n = minimal;
        std::printf("n=%d bound=%.9g (target %.9g)\n", minimal, qadist::kl_tail_bound(params),
                    *target);
        return 0;
    }
    if (!sweep.empty()) {
        const auto colon = sweep.find(':');
        if (colon == std::string::npos) {
            throw CLI::ValidationError("--sweep", "expected LO:HI");
        }
        const int lo = std::stoi(sweep.substr(0, colon));
        const int hi = std::stoi(sweep.substr(colon + 1));
        if (lo < 1 || hi < lo) throw CLI::ValidationError("--sweep", "expected 1 <= LO <= HI");

        std::ostringstream rows;
        rows << "n,bound\n";
        for (int i = lo; i <= hi; ++i) {
            params.n = i;
            rows << i << "," << qadist::round_sig(qadist::kl_tail_bound(params)) << "\n";
        }
        if (output_path.empty()) {
            std::fputs(rows.str().c_str(), stdout);
        } else {
            std::ofstream out(output_path, std::ios::binary);
            if (!out) throw std::runtime_error("cannot write csv: " + output_path);
            out << rows.str();
            std::printf("wrote %d rows -> %s\n", hi - lo + 1, output_path.c_str());
        }
        return 0;
    }
    params.n = n;
    std::printf("%.9g\n", qadist::kl_tail_bound(params));
    return 0;
}

int run_cluster(const CommonOptions& opts, const std::string& clusterer,
                const std::string& output_path) {
    const auto dataset = qadist::load_dataset_jsonl(opts.gold_path);
    const auto config = make_cluster_config(opts, clusterer);
    if (config.algorithm == qadist::ClusterAlgorithm::HumanFile) {
        throw CLI::ValidationError("--clusterer", "cluster emits automatic clusterings only");
    }
    const auto loaded = load_resources(opts, dataset, nullptr, /*need_embeddings=*/true,
                                       /*need_lexicon=*/false, /*need_human=*/false);

    std::vector<qadist::Clustering> clusterings;
    for (const auto& gold : dataset.gold) {
        clusterings.push_back(qadist::clustering_for_question(gold, loaded.view, config));
    }
    qadist::save_clusterings_json(clusterings, output_path);
    std::printf("clustered %zu questions -> %s\n", clusterings.size(), output_path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Probabilistic evaluation of open-ended multi-answer QA"};
    app.require_subcommand(1);

    // eval
    CommonOptions eval_opts;
    std::string eval_predictions, eval_output, eval_clusterer = "hac", eval_matcher = "cosine";
    int eval_maxanswer_k = 10;
    auto* eval_cmd = app.add_subcommand("eval", "Score predictions against gold answers");
    add_common_options(eval_cmd, eval_opts);
    eval_cmd->add_option("--predictions", eval_predictions, "Prediction file (JSON lines)")
        ->required();
    eval_cmd->add_option("--output", eval_output, "Report JSON path")->required();
    eval_cmd->add_option("--clusterer", eval_clusterer, "hac|xmeans|gmeans|human");
    eval_cmd->add_option("--matcher", eval_matcher, "wordnet|cosine|gr");
    eval_cmd->add_option("--maxanswer-k", eval_maxanswer_k, "k for the ranked-list baseline");

    // validate
    CommonOptions val_opts;
    std::string val_clusterers = "hac", val_matchers = "cosine";
    std::string val_samplers = "diverse,missing_answer,wrong_ranking,wrong_score";
    std::string val_model_predictions, val_model_matcher = "cosine";
    std::string val_output, val_csv, val_aggregate_csv, val_scatter_csv;
    int val_n_samples = 50, val_draw_size = 100;
    bool val_with_baseline = false;
    auto* val_cmd = app.add_subcommand("validate", "Correlate automatic scoring with the gold pipeline");
    add_common_options(val_cmd, val_opts);
    val_cmd->add_flag("--with-maxanswer-baseline", val_with_baseline,
                      "Also score each pipeline by 1 - MaxAnswer@10");
    val_cmd->add_option("--clusterers", val_clusterers, "Comma list: hac,xmeans,gmeans,human");
    val_cmd->add_option("--matchers", val_matchers, "Comma list: wordnet,cosine,gr,gold");
    val_cmd->add_option("--samplers", val_samplers,
                        "Comma list: diverse,model_mix,missing_answer,wrong_ranking,wrong_score");
    val_cmd->add_option("--n-samples", val_n_samples, "Sampled answer sets per question");
    val_cmd->add_option("--draw-size", val_draw_size, "Answers drawn per sampled set");
    val_cmd->add_option("--model-predictions", val_model_predictions,
                        "Prediction file backing the model_mix distribution");
    val_cmd->add_option("--model-matcher", val_model_matcher,
                        "Matcher used to build the model distribution");
    val_cmd->add_option("--output", val_output, "Report JSON path");
    val_cmd->add_option("--csv", val_csv, "Per-question correlation CSV");
    val_cmd->add_option("--aggregate-csv", val_aggregate_csv, "Pipeline x sampler table CSV");
    val_cmd->add_option("--scatter-csv", val_scatter_csv, "Per-sample gold/auto KL scatter CSV");

    // bound
    int bound_n = 100, bound_k = 8;
    double bound_eps = 0.2, bound_c1 = -1.0, bound_c2 = -1.0;
    std::string bound_sweep, bound_output;
    std::optional<double> bound_target;
    auto* bound_cmd = app.add_subcommand("bound", "KL concentration tail bound");
    bound_cmd->add_option("--n", bound_n, "Sample count");
    bound_cmd->add_option("--k", bound_k, "Category count")->check(CLI::Range(2, 1 << 20));
    bound_cmd->add_option("--eps", bound_eps, "KL radius epsilon")->check(CLI::PositiveNumber);
    bound_cmd->add_option("--c1", bound_c1, "Override constant c1");
    bound_cmd->add_option("--c2", bound_c2, "Override constant c2");
    bound_cmd->add_option("--sweep", bound_sweep, "Emit n,bound rows for n in LO:HI");
    bound_cmd->add_option_function<double>(
        "--target", [&bound_target](double v) { bound_target = v; },
        "Print the smallest n whose bound is <= target");
    bound_cmd->add_option("--output", bound_output, "CSV path for --sweep");

    // cluster
    CommonOptions cluster_opts;
    std::string cluster_clusterer = "hac", cluster_output;
    auto* cluster_cmd = app.add_subcommand("cluster", "Emit automatic clusterings for inspection");
    add_common_options(cluster_cmd, cluster_opts);
    cluster_cmd->add_option("--clusterer", cluster_clusterer, "hac|xmeans|gmeans");
    cluster_cmd->add_option("--output", cluster_output, "Clusterings JSON path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (eval_cmd->parsed()) {
            return run_eval(eval_opts, eval_predictions, eval_clusterer, eval_matcher,
                            eval_maxanswer_k, eval_output);
        }
        if (val_cmd->parsed()) {
            return run_validate(val_opts, val_clusterers, val_matchers, val_samplers,
                                val_n_samples, val_draw_size, val_with_baseline,
                                val_model_predictions, val_model_matcher, val_output, val_csv,
                                val_aggregate_csv, val_scatter_csv);
        }
        if (bound_cmd->parsed()) {
            return run_bound(bound_n, bound_k, bound_eps, bound_c1, bound_c2, bound_sweep,
                             bound_target, bound_output);
        }
        if (cluster_cmd->parsed()) {
            return run_cluster(cluster_opts, cluster_clusterer, cluster_output);
        }
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
