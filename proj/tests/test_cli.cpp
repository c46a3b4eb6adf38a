#include <doctest.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qadist/io.hpp"
#include "qadist/score.hpp"
#include "support/fixture.hpp"

using namespace qadist;
using testsupport::make_planted;
using testsupport::PlantedSpec;
using testsupport::TempDir;

namespace {

const std::string kFixtures = QADIST_TEST_FIXTURES;

int run_cli(const std::string& args) {
    const std::string command = std::string(QADIST_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    return std::system(command.c_str());
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

size_t count_lines(const std::string& text) {
    size_t lines = 0;
    for (char c : text) {
        if (c == '\n') ++lines;
    }
    return lines;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("a full clusterer x matcher grid emits one aggregate row per cell") {
    TempDir tmp;
    PlantedSpec spec;
    spec.n_questions = 4;
    spec.n_clusters = 5;
    spec.answers_per_question = 50;
    spec.noise = 0.4;
    spec.seed = 1234;
    const auto planted = make_planted(spec);
    planted.write_dataset(tmp.file("gold.jsonl"));
    planted.write_clusterings(tmp.file("clusters.json"));
    planted.write_vectors(tmp.file("vectors.txt"));

    const int status = run_cli(
        "validate --gold " + tmp.file("gold.jsonl") + " --human-clusters " +
        tmp.file("clusters.json") + " --embeddings " + tmp.file("vectors.txt") + " --wordnet " +
        kFixtures + "/wordnet" +
        " --clusterers hac,xmeans,gmeans --matchers cosine,gr,wordnet --hac-k 5" +
        " --samplers missing_answer --n-samples 6 --draw-size 30 --seed 3" +
        " --output " + tmp.file("report.json") + " --aggregate-csv " + tmp.file("table.csv") +
        " --csv " + tmp.file("rows.csv"));
    REQUIRE(status == 0);

    const auto doc = nlohmann::json::parse(slurp(tmp.file("report.json")));
    REQUIRE(doc.at("aggregate").size() == 9);
    std::set<std::string> pipelines;
    for (const auto& entry : doc.at("aggregate")) {
        pipelines.insert(entry.at("pipeline").get<std::string>());
    }
    CHECK(pipelines.size() == 9);
    CHECK(pipelines.count("hac+cosine"));
    CHECK(pipelines.count("gmeans+wordnet"));

    // wide aggregate table: header plus one row per pipeline
    CHECK(count_lines(slurp(tmp.file("table.csv"))) == 1 + 9);
    // long rows: one line per surviving (pipeline, question) pair; questions
    // whose auto clustering collapsed to a single cluster are skipped with a
    // warning, so the count can fall below the full 9 x 4 grid
    const size_t row_lines = count_lines(slurp(tmp.file("rows.csv")));
    CHECK(row_lines == 1 + doc.at("rows").size());
    CHECK(row_lines >= 1 + 9);
    CHECK(row_lines <= 1 + 9 * 4);
}

TEST_CASE("gold matching is only paired with human clustering") {
    TempDir tmp;
    PlantedSpec spec;
    spec.n_questions = 2;
    spec.n_clusters = 4;
    spec.answers_per_question = 30;
    const auto planted = make_planted(spec);
    planted.write_dataset(tmp.file("gold.jsonl"));
    planted.write_clusterings(tmp.file("clusters.json"));
    planted.write_vectors(tmp.file("vectors.txt"));

    const int status = run_cli("validate --gold " + tmp.file("gold.jsonl") +
                               " --human-clusters " + tmp.file("clusters.json") +
                               " --embeddings " + tmp.file("vectors.txt") +
                               " --clusterers human,hac --matchers gold,cosine --hac-k 4" +
                               " --samplers diverse --n-samples 5 --draw-size 20" +
                               " --output " + tmp.file("report.json"));
    REQUIRE(status == 0);
    const auto doc = nlohmann::json::parse(slurp(tmp.file("report.json")));
    // human+gold, human+cosine, hac+cosine; hac+gold is dropped
    CHECK(doc.at("aggregate").size() == 3);
    for (const auto& entry : doc.at("aggregate")) {
        if (entry.at("pipeline") == "human+gold") {
            CHECK(entry.at("mean_spearman").get<double>() == doctest::Approx(1.0));
        }
    }
}

TEST_CASE("bound sweep emits one row per n plus a header") {
    TempDir tmp;
    REQUIRE(run_cli("bound --k 8 --eps 0.2 --sweep 10:500 --output " + tmp.file("bound.csv")) == 0);
    const auto csv = slurp(tmp.file("bound.csv"));
    CHECK(count_lines(csv) == 1 + 491);
    CHECK(csv.rfind("n,bound\n", 0) == 0);
}

TEST_CASE("bound target mode prints the minimal n") {
    CHECK(run_cli("bound --k 8 --eps 0.2 --target 0.05") == 0);
    CHECK(run_cli("bound --k 8 --eps 0.2 --n 100") == 0);
    // invalid parameters exit nonzero
    CHECK(run_cli("bound --k 1 --eps 0.2") != 0);
}

TEST_CASE("cluster subcommand round-trips as a human clustering file") {
    TempDir tmp;
    PlantedSpec spec;
    spec.n_questions = 3;
    spec.n_clusters = 4;
    spec.answers_per_question = 40;
    spec.noise = 0.2;
    const auto planted = make_planted(spec);
    planted.write_dataset(tmp.file("gold.jsonl"));
    planted.write_vectors(tmp.file("vectors.txt"));

    REQUIRE(run_cli("cluster --gold " + tmp.file("gold.jsonl") + " --embeddings " +
                    tmp.file("vectors.txt") + " --clusterer hac --hac-k 4 --output " +
                    tmp.file("auto_clusters.json")) == 0);

    // the emitted file loads back as a human clustering source
    const auto dataset = load_dataset_jsonl(tmp.file("gold.jsonl"));
    const auto clusterings = load_human_clusterings(tmp.file("auto_clusters.json"), dataset);
    CHECK(clusterings.size() == 3);
    for (const auto& [id, clustering] : clusterings) {
        CHECK(clustering.clusters.size() == 4);
    }
}

TEST_CASE("eval on a dev-sized dataset finishes comfortably within a minute") {
    TempDir tmp;
    PlantedSpec spec;
    spec.n_questions = 55;
    spec.n_clusters = 8;
    spec.answers_per_question = 100;
    spec.noise = 0.4;
    spec.seed = 55;
    const auto planted = make_planted(spec);
    planted.write_dataset(tmp.file("gold.jsonl"));
    planted.write_vectors(tmp.file("vectors.txt"));
    save_predictions_jsonl(planted.self_predictions(), tmp.file("predictions.jsonl"));

    const auto start = std::chrono::steady_clock::now();
    REQUIRE(run_cli("eval --gold " + tmp.file("gold.jsonl") + " --predictions " +
                    tmp.file("predictions.jsonl") + " --embeddings " + tmp.file("vectors.txt") +
                    " --clusterer hac --hac-k 8 --matcher cosine --output " +
                    tmp.file("report.json")) == 0);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(seconds < 60.0);

    const auto doc = nlohmann::json::parse(slurp(tmp.file("report.json")));
    CHECK(doc.at("per_question").size() == 55);
}

TEST_CASE("empty predictions file flags every prediction-free question") {
    TempDir tmp;
    PlantedSpec spec;
    spec.n_questions = 3;
    spec.n_clusters = 4;
    spec.answers_per_question = 30;
    const auto planted = make_planted(spec);
    planted.write_dataset(tmp.file("gold.jsonl"));
    planted.write_clusterings(tmp.file("clusters.json"));
    planted.write_vectors(tmp.file("vectors.txt"));
    testsupport::write_file(tmp.file("predictions.jsonl"), "");

    REQUIRE(run_cli("eval --gold " + tmp.file("gold.jsonl") + " --predictions " +
                    tmp.file("predictions.jsonl") + " --clusterer human --human-clusters " +
                    tmp.file("clusters.json") + " --matcher cosine --embeddings " +
                    tmp.file("vectors.txt") + " --output " + tmp.file("report.json")) == 0);
    const auto doc = nlohmann::json::parse(slurp(tmp.file("report.json")));
    for (const auto& entry : doc.at("per_question")) {
        CHECK(entry.at("n_predictions").get<int>() == 0);
        CHECK(entry.at("kl").get<double>() > 0.0);
    }
}

}  // TEST_SUITE
