#pragma once

// Shared test fixtures: a planted-cluster synthetic dataset whose true
// clustering is known, plus small file helpers. Used by unit tests and the
// acceptance suite.

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "qadist/cluster.hpp"
#include "qadist/embedding.hpp"
#include "qadist/eval.hpp"
#include "qadist/io.hpp"
#include "qadist/rng.hpp"
#include "qadist/sample.hpp"
#include "qadist/types.hpp"

namespace testsupport {

inline qadist::SamplerConfig sampler_of(qadist::SamplerKind kind, int n_samples, int draw_size) {
    qadist::SamplerConfig config;
    config.kind = kind;
    config.n_samples_per_question = n_samples;
    config.draw_size = draw_size;
    return config;
}

class TempDir {
  public:
    TempDir() {
        auto base = std::filesystem::temp_directory_path();
        static std::atomic<unsigned> counter{0};
        path_ = base / ("qadist_test_" + std::to_string(::getpid()) + "_" +
                        std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

  private:
    std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

// Strictly decreasing positive sizes summing to total: arithmetic base
// [k, k-1, ..., 1] plus an even share of the remainder, the leftover going
// to the largest entries.
inline std::vector<int> planted_sizes(int k, int total) {
    std::vector<int> sizes(static_cast<size_t>(k));
    int base_sum = k * (k + 1) / 2;
    int share = (total - base_sum) / k;
    int leftover = (total - base_sum) % k;
    for (int i = 0; i < k; ++i) {
        sizes[static_cast<size_t>(i)] = (k - i) + share + (i < leftover ? 1 : 0);
    }
    return sizes;
}

struct PlantedSpec {
    int n_questions = 20;
    int n_clusters = 8;
    int dim = 16;
    int answers_per_question = 100;
    double noise = 0.25;  // per-coordinate noise around each cluster centroid
    std::uint64_t seed = 42;
    std::vector<int> explicit_sizes;  // overrides planted_sizes when set
    int wrong_answers = 0;            // extra answers in a cluster labeled "wrong"
};

struct Planted {
    qadist::Dataset dataset;
    std::map<std::string, qadist::Clustering> human;
    qadist::EmbeddingTable embeddings;

    qadist::Resources resources() const {
        qadist::Resources r;
        r.embeddings = &embeddings;
        r.human_clusterings = &human;
        return r;
    }

    void write_dataset(const std::string& path) const { qadist::save_dataset_jsonl(dataset, path); }

    void write_clusterings(const std::string& path) const {
        std::vector<qadist::Clustering> all;
        for (const auto& [id, clustering] : human) all.push_back(clustering);
        qadist::save_clusterings_json(all, path);
    }

    void write_vectors(const std::string& path) const {
        std::ostringstream out;
        out.precision(8);
        for (const auto& [token, values] : embeddings.vectors) {
            out << token;
            for (double v : values) out << " " << v;
            out << "\n";
        }
        write_file(path, out.str());
    }

    // Gold answers copied verbatim as predictions, rank order = gold order.
    std::vector<qadist::AnswerSet> self_predictions() const {
        std::vector<qadist::AnswerSet> predictions;
        for (const auto& gold : dataset.gold) {
            qadist::AnswerSet set;
            set.question_id = gold.question_id;
            set.answers = gold.answers;
            set.role = qadist::Role::Predicted;
            predictions.push_back(std::move(set));
        }
        return predictions;
    }
};

// Centroids drawn as scaled random directions, re-drawn until pairwise
// cosines stay below 0.5 so the planted structure is recoverable.
inline std::vector<std::vector<double>> planted_centroids(int k, int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<std::vector<double>> centroids;
    while (static_cast<int>(centroids.size()) < k) {
        std::vector<double> c(static_cast<size_t>(dim));
        double norm2 = 0.0;
        for (double& v : c) {
            v = gauss(rng);
            norm2 += v * v;
        }
        const double norm = std::sqrt(norm2);
        for (double& v : c) v = v / norm * 2.0;

        bool separated = true;
        for (const auto& other : centroids) {
            double dot = 0.0;
            for (size_t d = 0; d < c.size(); ++d) dot += c[d] * other[d];
            if (dot / 4.0 > 0.5) {
                separated = false;
                break;
            }
        }
        if (separated) centroids.push_back(std::move(c));
    }
    return centroids;
}

inline Planted make_planted(const PlantedSpec& spec) {
    Planted planted;
    planted.embeddings.dim = spec.dim;
    auto rng = qadist::seeded_rng(qadist::mix64(spec.seed ^ 0xf1c7u));
    std::normal_distribution<double> gauss(0.0, 1.0);

    const auto sizes = spec.explicit_sizes.empty()
                           ? planted_sizes(spec.n_clusters, spec.answers_per_question)
                           : spec.explicit_sizes;

    for (int qi = 0; qi < spec.n_questions; ++qi) {
        qadist::Question question;
        question.id = "q" + std::to_string(qi);
        question.context = "synthetic question " + std::to_string(qi);
        question.slot = static_cast<qadist::Slot>(qi % 6);

        qadist::AnswerSet gold;
        gold.question_id = question.id;
        gold.role = qadist::Role::Gold;

        qadist::Clustering clustering;
        clustering.question_id = question.id;

        const int k = static_cast<int>(sizes.size());
        const auto centroids = planted_centroids(k + (spec.wrong_answers > 0 ? 1 : 0),
                                                 spec.dim, rng);

        int answer_index = 0;
        for (int c = 0; c < k; ++c) {
            qadist::Cluster cluster;
            cluster.label = "k" + std::to_string(c);
            for (int a = 0; a < sizes[static_cast<size_t>(c)]; ++a) {
                const std::string token =
                    "q" + std::to_string(qi) + "a" + std::to_string(answer_index);
                std::vector<double> vec(static_cast<size_t>(spec.dim));
                for (size_t d = 0; d < vec.size(); ++d) {
                    vec[d] = centroids[static_cast<size_t>(c)][d] + spec.noise * gauss(rng);
                }
                planted.embeddings.vectors.emplace(token, std::move(vec));
                gold.answers.push_back(token);
                cluster.members.push_back(answer_index++);
            }
            clustering.clusters.push_back(std::move(cluster));
        }
        if (spec.wrong_answers > 0) {
            qadist::Cluster wrong;
            wrong.label = "wrong";
            for (int a = 0; a < spec.wrong_answers; ++a) {
                const std::string token =
                    "q" + std::to_string(qi) + "w" + std::to_string(answer_index);
                std::vector<double> vec(static_cast<size_t>(spec.dim));
                for (size_t d = 0; d < vec.size(); ++d) {
                    vec[d] = centroids.back()[d] + spec.noise * gauss(rng);
                }
                planted.embeddings.vectors.emplace(token, std::move(vec));
                gold.answers.push_back(token);
                wrong.members.push_back(answer_index++);
            }
            clustering.wrong_label = wrong.label;
            clustering.clusters.push_back(std::move(wrong));
        }
        canonicalize(clustering);

        planted.dataset.questions.push_back(std::move(question));
        planted.dataset.gold.push_back(std::move(gold));
        planted.human.emplace(clustering.question_id, std::move(clustering));
    }
    return planted;
}

}  // namespace testsupport
