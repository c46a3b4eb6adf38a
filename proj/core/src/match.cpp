#include "qadist/match.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qadist/text.hpp"

namespace qadist {

const char* to_string(MatcherKind kind) {
    switch (kind) {
        case MatcherKind::WordNet: return "wordnet";
        case MatcherKind::Cosine: return "cosine";
        case MatcherKind::GaussianRegression: return "gr";
    }
    return "cosine";
}

std::optional<MatcherKind> matcher_kind_from_string(std::string_view name) {
    if (name == "wordnet") return MatcherKind::WordNet;
    if (name == "cosine") return MatcherKind::Cosine;
    if (name == "gr" || name == "gaussian") return MatcherKind::GaussianRegression;
    return std::nullopt;
}

void check_matcher_config(const MatcherConfig& config) {
    if (!(config.cosine_threshold > -1.0 && config.cosine_threshold <= 1.0)) {
        throw std::invalid_argument("cosine_threshold must be in (-1, 1]");
    }
    if (!(config.gr_threshold > 0.0 && config.gr_threshold < 1.0)) {
        throw std::invalid_argument("gr_threshold must be in (0, 1)");
    }
    if (!(config.gr_ridge > 0.0)) {
        throw std::invalid_argument("gr_ridge must be positive");
    }
    if (config.wordnet_depth < 0) {
        throw std::invalid_argument("wordnet_depth must be non-negative");
    }
}

std::unordered_set<std::string> LexicalGraph::ancestor_closure(std::string_view lemma,
                                                               int depth) const {
    std::unordered_set<std::string> closure;
    auto it = synsets.find(std::string(lemma));
    if (it == synsets.end()) return closure;

    std::deque<std::pair<std::string, int>> frontier;
    for (const auto& id : it->second) {
        closure.insert(id);
        frontier.emplace_back(id, 0);
    }
    while (!frontier.empty()) {
        auto [id, hops] = frontier.front();
        frontier.pop_front();
        if (hops >= depth) continue;
        auto parents = hypernyms.find(id);
        if (parents == hypernyms.end()) continue;
        for (const auto& parent : parents->second) {
            if (closure.insert(parent).second) frontier.emplace_back(parent, hops + 1);
        }
    }
    return closure;
}

namespace {

struct PosFile {
    const char* suffix;
    char tag;
};

constexpr PosFile kPosFiles[] = {{"noun", 'n'}, {"verb", 'v'}, {"adj", 'a'}, {"adv", 'r'}};

[[noreturn]] void lex_error(const std::string& file, std::streamoff offset, const std::string& what) {
    throw std::runtime_error(file + ": byte " + std::to_string(static_cast<long long>(offset)) +
                             ": " + what);
}

void parse_index_file(const std::string& path, char pos_tag, LexicalGraph& graph) {
    std::ifstream in(path);
    if (!in) return;
    std::string line;
    std::streamoff offset = 0;
    while (in) {
        offset = in.tellg();
        if (!std::getline(in, line)) break;
        if (line.empty() || line[0] == ' ') continue;  // license header lines

        std::istringstream fields(line);
        std::string lemma, pos;
        int synset_cnt = 0, p_cnt = 0;
        if (!(fields >> lemma >> pos >> synset_cnt >> p_cnt)) {
            lex_error(path, offset, "malformed index line");
        }
        for (int i = 0; i < p_cnt; ++i) {
            std::string symbol;
            if (!(fields >> symbol)) lex_error(path, offset, "truncated pointer symbol list");
        }
        int sense_cnt = 0;
        double tagsense_cnt = 0.0;
        if (!(fields >> sense_cnt >> tagsense_cnt)) {
            lex_error(path, offset, "missing sense counts");
        }
        auto& ids = graph.synsets[lemma];
        for (int i = 0; i < synset_cnt; ++i) {
            std::string synset_offset;
            if (!(fields >> synset_offset)) lex_error(path, offset, "truncated synset offset list");
            ids.push_back(pos_tag + synset_offset);
        }
    }
}

void parse_data_file(const std::string& path, char pos_tag, LexicalGraph& graph) {
    std::ifstream in(path);
    if (!in) return;
    std::string line;
    std::streamoff offset = 0;
    while (in) {
        offset = in.tellg();
        if (!std::getline(in, line)) break;
        if (line.empty() || line[0] == ' ') continue;

        std::istringstream fields(line);
        std::string synset_offset, lex_filenum, ss_type, w_cnt_hex;
        if (!(fields >> synset_offset >> lex_filenum >> ss_type >> w_cnt_hex)) {
            lex_error(path, offset, "malformed data line");
        }
        int w_cnt = 0;
        try {
            w_cnt = std::stoi(w_cnt_hex, nullptr, 16);
        } catch (const std::exception&) {
            lex_error(path, offset, "bad word count '" + w_cnt_hex + "'");
        }
        const std::string id = pos_tag + synset_offset;
        for (int w = 0; w < w_cnt; ++w) {
            std::string word, lex_id;
            if (!(fields >> word >> lex_id)) lex_error(path, offset, "truncated word list");
        }
        int p_cnt = 0;
        if (!(fields >> p_cnt)) lex_error(path, offset, "missing pointer count");
        for (int p = 0; p < p_cnt; ++p) {
            std::string symbol, target_offset, target_pos, source_target;
            if (!(fields >> symbol >> target_offset >> target_pos >> source_target)) {
                lex_error(path, offset, "truncated pointer");
            }
            if (symbol == "@" || symbol == "@i") {
                graph.hypernyms[id].push_back(target_pos[0] + target_offset);
            }
        }
    }
}

}  // namespace

LexicalGraph load_lexical_graph(const std::string& directory) {
    namespace fs = std::filesystem;
    LexicalGraph graph;
    bool any = false;
    for (const auto& pos : kPosFiles) {
        const auto index_path = fs::path(directory) / (std::string("index.") + pos.suffix);
        const auto data_path = fs::path(directory) / (std::string("data.") + pos.suffix);
        if (!fs::exists(index_path) && !fs::exists(data_path)) continue;
        any = true;
        parse_index_file(index_path.string(), pos.tag, graph);
        parse_data_file(data_path.string(), pos.tag, graph);
    }
    if (!any) {
        throw std::runtime_error("no index/data files found under: " + directory);
    }
    return graph;
}

namespace {

bool tokens_related(const std::vector<std::string>& a_tokens,
                    const std::vector<std::string>& b_tokens, const LexicalGraph& graph,
                    int depth) {
    for (const auto& ta : a_tokens) {
        for (const auto& tb : b_tokens) {
            if (ta == tb) return true;
        }
    }
    // synset overlap between one token's ancestor closure and the other's
    // direct synsets, in either direction
    for (const auto& ta : a_tokens) {
        const auto closure_a = graph.ancestor_closure(ta, depth);
        if (closure_a.empty()) continue;
        for (const auto& tb : b_tokens) {
            auto direct_b = graph.synsets.find(tb);
            if (direct_b == graph.synsets.end()) continue;
            for (const auto& id : direct_b->second) {
                if (closure_a.count(id)) return true;
            }
        }
    }
    for (const auto& tb : b_tokens) {
        const auto closure_b = graph.ancestor_closure(tb, depth);
        if (closure_b.empty()) continue;
        for (const auto& ta : a_tokens) {
            auto direct_a = graph.synsets.find(ta);
            if (direct_a == graph.synsets.end()) continue;
            for (const auto& id : direct_a->second) {
                if (closure_b.count(id)) return true;
            }
        }
    }
    return false;
}

}  // namespace

MatchAssignment match_wordnet(int prediction_index, std::string_view prediction,
                              const Clustering& clustering, const AnswerSet& gold,
                              const LexicalGraph& graph, const MatcherConfig& config) {
    const auto prediction_tokens = normalize_and_tokenize(prediction);
    if (prediction_tokens.empty()) return MatchAssignment::none(prediction_index);

    std::vector<std::string> matched;
    for (const auto& cluster : clustering.clusters) {
        bool hit = false;
        for (size_t m = 0; m < cluster.members.size() && !hit; ++m) {
            if (config.wordnet_exemplar_only && m > 0) break;
            const auto member_index = static_cast<size_t>(cluster.members[m]);
            if (member_index >= gold.answers.size()) continue;
            const auto member_tokens = normalize_and_tokenize(gold.answers[member_index]);
            hit = tokens_related(prediction_tokens, member_tokens, graph, config.wordnet_depth);
        }
        if (hit) matched.push_back(cluster.label);
    }
    return MatchAssignment::even_split(prediction_index, std::move(matched));
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double sum = 0.0;
    for (size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
    return sum;
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

std::vector<std::vector<double>> cluster_centroids(const Clustering& clustering,
                                                   const std::vector<AnswerVector>& gold_vectors) {
    std::vector<std::vector<double>> centroids;
    centroids.reserve(clustering.clusters.size());
    const size_t dim = gold_vectors.empty() ? 0 : gold_vectors.front().values.size();
    for (const auto& cluster : clustering.clusters) {
        std::vector<double> centroid(dim, 0.0);
        int used = 0;
        for (int index : cluster.members) {
            const auto& v = gold_vectors[static_cast<size_t>(index)];
            if (v.oov()) continue;
            for (size_t d = 0; d < dim; ++d) centroid[d] += v.values[d];
            ++used;
        }
        if (used > 0) {
            for (double& c : centroid) c /= static_cast<double>(used);
        }
        centroids.push_back(std::move(centroid));
    }
    return centroids;
}

}  // namespace

MatchAssignment match_cosine(int prediction_index, const AnswerVector& prediction,
                             const Clustering& clustering,
                             const std::vector<AnswerVector>& gold_vectors,
                             const MatcherConfig& config) {
    check_matcher_config(config);
    if (prediction.oov()) return MatchAssignment::none(prediction_index);
    const double prediction_norm = norm(prediction.values);
    if (prediction_norm <= 0.0) return MatchAssignment::none(prediction_index);

    const auto centroids = cluster_centroids(clustering, gold_vectors);
    std::vector<std::string> matched;
    for (size_t c = 0; c < centroids.size(); ++c) {
        const double centroid_norm = norm(centroids[c]);
        if (centroid_norm <= 0.0) continue;
        const double cosine = dot(prediction.values, centroids[c]) / (prediction_norm * centroid_norm);
        if (cosine >= config.cosine_threshold) matched.push_back(clustering.clusters[c].label);
    }
    return MatchAssignment::even_split(prediction_index, std::move(matched));
}

namespace {

// Cholesky solve of (K + ridge*I) x = y for each y column; returns false
// when the factorization hits a non-positive pivot.
bool cholesky_solve(std::vector<std::vector<double>> matrix,
                    const std::vector<std::vector<double>>& targets,
                    std::vector<std::vector<double>>& solutions) {
    const size_t n = matrix.size();
    for (size_t j = 0; j < n; ++j) {
        for (size_t i = j; i < n; ++i) {
            double sum = matrix[i][j];
            for (size_t k = 0; k < j; ++k) sum -= matrix[i][k] * matrix[j][k];
            if (i == j) {
                if (sum <= 1e-12) return false;
                matrix[j][j] = std::sqrt(sum);
            } else {
                matrix[i][j] = sum / matrix[j][j];
            }
        }
    }

    solutions.clear();
    solutions.reserve(targets.size());
    for (const auto& y : targets) {
        std::vector<double> z(n, 0.0);
        for (size_t i = 0; i < n; ++i) {
            double sum = y[i];
            for (size_t k = 0; k < i; ++k) sum -= matrix[i][k] * z[k];
            z[i] = sum / matrix[i][i];
        }
        std::vector<double> x(n, 0.0);
        for (size_t ii = n; ii-- > 0;) {
            double sum = z[ii];
            for (size_t k = ii + 1; k < n; ++k) sum -= matrix[k][ii] * x[k];
            x[ii] = sum / matrix[ii][ii];
        }
        solutions.push_back(std::move(x));
    }
    return true;
}

double median_pairwise_distance(const std::vector<std::vector<double>>& points) {
    std::vector<double> distances;
    distances.reserve(points.size() * (points.size() - 1) / 2);
    for (size_t i = 0; i < points.size(); ++i) {
        for (size_t j = i + 1; j < points.size(); ++j) {
            double sum = 0.0;
            for (size_t d = 0; d < points[i].size(); ++d) {
                const double diff = points[i][d] - points[j][d];
                sum += diff * diff;
            }
            distances.push_back(std::sqrt(sum));
        }
    }
    if (distances.empty()) return 1.0;
    std::sort(distances.begin(), distances.end());
    const double median = distances[distances.size() / 2];
    return median > 0.0 ? median : 1.0;
}

}  // namespace

GaussianRegressorSet GaussianRegressorSet::fit(const Clustering& clustering,
                                               const std::vector<AnswerVector>& gold_vectors,
                                               const MatcherConfig& config) {
    check_matcher_config(config);
    GaussianRegressorSet set;
    for (const auto& cluster : clustering.clusters) set.labels_.push_back(cluster.label);

    // training set = non-OOV gold vectors
    std::vector<int> training_index;
    for (size_t i = 0; i < gold_vectors.size(); ++i) {
        if (!gold_vectors[i].oov()) {
            training_index.push_back(static_cast<int>(i));
            set.training_points_.push_back(gold_vectors[i].values);
        }
    }
    set.degenerate_.assign(clustering.clusters.size(), 0);
    set.alphas_.resize(clustering.clusters.size());

    if (set.training_points_.empty()) {
        std::fill(set.degenerate_.begin(), set.degenerate_.end(), -1);
        return set;
    }
    set.bandwidth_ = median_pairwise_distance(set.training_points_);

    const size_t n = set.training_points_.size();
    std::vector<std::vector<double>> kernel(n, std::vector<double>(n, 0.0));
    const double inv_two_sigma2 = 1.0 / (2.0 * set.bandwidth_ * set.bandwidth_);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i; j < n; ++j) {
            double sum = 0.0;
            for (size_t d = 0; d < set.training_points_[i].size(); ++d) {
                const double diff = set.training_points_[i][d] - set.training_points_[j][d];
                sum += diff * diff;
            }
            kernel[i][j] = kernel[j][i] = std::exp(-sum * inv_two_sigma2);
        }
    }

    std::vector<std::vector<double>> targets;
    std::vector<size_t> target_cluster;
    for (size_t c = 0; c < clustering.clusters.size(); ++c) {
        const auto& cluster = clustering.clusters[c];
        std::unordered_set<int> members(cluster.members.begin(), cluster.members.end());
        int positives = 0;
        std::vector<double> y(n, 0.0);
        for (size_t t = 0; t < n; ++t) {
            if (members.count(training_index[t])) {
                y[t] = 1.0;
                ++positives;
            }
        }
        if (positives == 0) {
            set.degenerate_[c] = -1;  // no usable member vectors, never matches
        } else if (positives == static_cast<int>(n)) {
            set.degenerate_[c] = 1;  // one-vs-rest with an empty negative set
        } else {
            targets.push_back(std::move(y));
            target_cluster.push_back(c);
        }
    }

    if (!targets.empty()) {
        double ridge = config.gr_ridge;
        std::vector<std::vector<double>> solutions;
        bool solved = false;
        for (int attempt = 0; attempt < 4 && !solved; ++attempt) {
            auto regularized = kernel;
            for (size_t i = 0; i < n; ++i) regularized[i][i] += ridge;
            solved = cholesky_solve(std::move(regularized), targets, solutions);
            if (!solved) {
                ridge *= 10.0;  // escalate and retry
                std::fprintf(stderr,
                             "warning: singular kernel matrix, raising ridge to %g\n", ridge);
            }
        }
        if (!solved) throw std::runtime_error("kernel ridge fit failed after ridge escalation");
        for (size_t t = 0; t < target_cluster.size(); ++t) {
            set.alphas_[target_cluster[t]] = std::move(solutions[t]);
        }
    }
    return set;
}

std::vector<double> GaussianRegressorSet::scores(const AnswerVector& prediction) const {
    std::vector<double> result(labels_.size(), 0.0);
    std::vector<double> kvec(training_points_.size(), 0.0);
    const double inv_two_sigma2 = 1.0 / (2.0 * bandwidth_ * bandwidth_);
    for (size_t t = 0; t < training_points_.size(); ++t) {
        double sum = 0.0;
        for (size_t d = 0; d < training_points_[t].size(); ++d) {
            const double diff = prediction.values[d] - training_points_[t][d];
            sum += diff * diff;
        }
        kvec[t] = std::exp(-sum * inv_two_sigma2);
    }
    for (size_t c = 0; c < labels_.size(); ++c) {
        if (degenerate_[c] == 1) {
            result[c] = 1.0;
        } else if (degenerate_[c] == -1) {
            result[c] = 0.0;
        } else {
            double score = 0.0;
            for (size_t t = 0; t < kvec.size(); ++t) score += alphas_[c][t] * kvec[t];
            // membership score; the interpolant can overshoot [0, 1] slightly
            result[c] = std::clamp(score, 0.0, 1.0);
        }
    }
    return result;
}

MatchAssignment GaussianRegressorSet::match(int prediction_index, const AnswerVector& prediction,
                                            const MatcherConfig& config) const {
    if (prediction.oov()) return MatchAssignment::none(prediction_index);
    const auto cluster_scores = scores(prediction);
    std::vector<std::string> matched;
    for (size_t c = 0; c < cluster_scores.size(); ++c) {
        if (cluster_scores[c] >= config.gr_threshold) matched.push_back(labels_[c]);
    }
    return MatchAssignment::even_split(prediction_index, std::move(matched));
}

}  // namespace qadist
