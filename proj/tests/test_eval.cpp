#include <doctest.h>

#include "qadist/eval.hpp"
#include "support/fixture.hpp"

using namespace qadist;
using testsupport::make_planted;
using testsupport::PlantedSpec;

TEST_SUITE("eval") {

TEST_CASE("self-evaluation with human clustering is an exact zero") {
    PlantedSpec spec;
    spec.n_questions = 4;
    spec.answers_per_question = 40;
    spec.n_clusters = 5;
    spec.wrong_answers = 3;
    const auto planted = make_planted(spec);

    EvalConfig config;
    config.clustering.algorithm = ClusterAlgorithm::HumanFile;
    config.matcher.kind = MatcherKind::Cosine;
    const auto resources = planted.resources();

    const auto report =
        evaluate_dataset(planted.dataset, planted.self_predictions(), resources, config);
    REQUIRE(report.per_question.size() == 4);
    CHECK(report.skipped.empty());
    for (const auto& score : report.per_question) {
        CHECK(score.kl == 0.0);
        CHECK(score.n_unmatched == 0);
    }
    CHECK(report.mean_kl == 0.0);
    CHECK(report.median_kl == 0.0);
}

TEST_CASE("empty prediction sets score as the smoothing floor") {
    PlantedSpec spec;
    spec.n_questions = 2;
    spec.answers_per_question = 30;
    spec.n_clusters = 4;
    const auto planted = make_planted(spec);

    EvalConfig config;
    config.clustering.algorithm = ClusterAlgorithm::HumanFile;
    const auto report = evaluate_dataset(planted.dataset, {}, planted.resources(), config);

    REQUIRE(report.per_question.size() == 2);
    for (const auto& score : report.per_question) {
        CHECK(score.n_predictions == 0);
        CHECK(score.n_unmatched == 0);
        // KL(gold || uniform smoothing floor), strictly positive for a
        // non-uniform planted gold distribution
        CHECK(score.kl > 0.0);
        const auto& clustering = planted.human.at(score.question_id);
        const auto gold = gold_distribution(clustering, config.smoothing);
        const auto uniform = predicted_distribution({}, gold.labels, config.smoothing);
        CHECK(score.kl == doctest::Approx(kl_score(gold, uniform)).epsilon(1e-12));
    }
}

TEST_CASE("automatic hac + cosine pipeline tracks the planted structure") {
    PlantedSpec spec;
    spec.n_questions = 3;
    spec.answers_per_question = 60;
    spec.n_clusters = 6;
    spec.noise = 0.15;
    const auto planted = make_planted(spec);

    EvalConfig config;
    config.clustering.algorithm = ClusterAlgorithm::Hac;
    config.clustering.hac_cluster_count = 6;
    config.matcher.kind = MatcherKind::Cosine;
    config.matcher.cosine_threshold = 0.7;

    const auto report =
        evaluate_dataset(planted.dataset, planted.self_predictions(), planted.resources(), config);
    REQUIRE(report.per_question.size() == 3);
    for (const auto& score : report.per_question) {
        // exact strings short-circuit, so self predictions land in their
        // own auto clusters and KL stays at zero
        CHECK(score.kl == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(score.n_gold_clusters == 6);
    }
}

TEST_CASE("question-level failures are skipped with a reason") {
    PlantedSpec spec;
    spec.n_questions = 2;
    spec.answers_per_question = 20;
    spec.n_clusters = 3;
    auto planted = make_planted(spec);
    planted.human.erase("q1");  // break one question

    EvalConfig config;
    config.clustering.algorithm = ClusterAlgorithm::HumanFile;
    const auto report =
        evaluate_dataset(planted.dataset, planted.self_predictions(), planted.resources(), config);
    CHECK(report.per_question.size() == 1);
    REQUIRE(report.skipped.size() == 1);
    CHECK(report.skipped[0].question_id == "q1");
    CHECK(report.skipped[0].reason.find("no human clustering") != std::string::npos);
}

TEST_CASE("per-slot aggregates cover every slot present") {
    PlantedSpec spec;
    spec.n_questions = 6;  // slots cycle through all six values
    spec.answers_per_question = 24;
    spec.n_clusters = 3;
    const auto planted = make_planted(spec);

    EvalConfig config;
    config.clustering.algorithm = ClusterAlgorithm::HumanFile;
    const auto report =
        evaluate_dataset(planted.dataset, planted.self_predictions(), planted.resources(), config);
    CHECK(report.per_slot_mean_kl.size() == 6);
    for (const auto& [slot, mean] : report.per_slot_mean_kl) CHECK(mean == 0.0);
}

TEST_CASE("report json is canonical and threading does not change it") {
    PlantedSpec spec;
    spec.n_questions = 5;
    spec.answers_per_question = 30;
    spec.n_clusters = 4;
    const auto planted = make_planted(spec);

    EvalConfig config;
    config.clustering.algorithm = ClusterAlgorithm::HumanFile;
    config.threads = 1;
    const auto serial =
        eval_report_to_json(evaluate_dataset(planted.dataset, planted.self_predictions(),
                                             planted.resources(), config),
                            config);
    config.threads = 4;
    const auto threaded =
        eval_report_to_json(evaluate_dataset(planted.dataset, planted.self_predictions(),
                                             planted.resources(), config),
                            config);
    CHECK(serial == threaded);
    CHECK(serial.find("config_digest") != std::string::npos);
}

TEST_CASE("config digest ignores the seed but tracks the configuration") {
    EvalConfig a;
    EvalConfig b;
    b.seed = 99;
    CHECK(eval_config_digest(a) == eval_config_digest(b));
    b.matcher.cosine_threshold = 0.9;
    CHECK(eval_config_digest(a) != eval_config_digest(b));
}

}  // TEST_SUITE
