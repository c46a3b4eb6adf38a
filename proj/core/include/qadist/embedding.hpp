#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "qadist/types.hpp"

namespace qadist {

// Static word-vector table loaded from a whitespace-separated text file
// ("token v1 ... vD" per line, optional "count dim" header). Keys are
// normalized with the shared normalizer; read-only after load.
struct EmbeddingTable {
    int dim = 0;
    std::unordered_map<std::string, std::vector<double>> vectors;

    const std::vector<double>* find(std::string_view token) const;
    size_t size() const { return vectors.size(); }
};

EmbeddingTable load_vectors(const std::string& path,
                            const std::unordered_set<std::string>* vocab_filter = nullptr);

// Mean of the in-vocabulary token vectors of one answer. covered_tokens == 0
// marks the out-of-vocabulary fallback (zero vector); similarity matchers
// treat such vectors as non-matching and fall back to string equality.
struct AnswerVector {
    std::vector<double> values;
    int covered_tokens = 0;
    int total_tokens = 0;

    bool oov() const { return covered_tokens == 0; }
};

AnswerVector embed_answer(const EmbeddingTable& table, std::string_view raw_answer);

std::vector<AnswerVector> embed_answers(const EmbeddingTable& table, const AnswerSet& answers);

// Union of normalized tokens over answer sets; used as a vocab_filter so
// desk runs need not keep multi-gigabyte vector files in memory.
std::unordered_set<std::string> dataset_vocabulary(const std::vector<const AnswerSet*>& sets);

}  // namespace qadist
