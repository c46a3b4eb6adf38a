#pragma once

#include <map>
#include <string>
#include <vector>

#include "qadist/types.hpp"

namespace qadist {

struct Dataset {
    std::vector<Question> questions;
    std::vector<AnswerSet> gold;

    const Question* question(std::string_view id) const;
    const AnswerSet* gold_for(std::string_view id) const;
};

// JSON Lines, one object per question:
//   {"id": "...", "context": "...", "slot": "Purpose", "answers": ["...", ...]}
// slot is optional and defaults to Other so slot-free datasets load too.
Dataset load_dataset_jsonl(const std::string& path);
void save_dataset_jsonl(const Dataset& dataset, const std::string& path);

// Predictions: {"id": "...", "answers": [...]} with list order as rank.
std::vector<AnswerSet> load_predictions_jsonl(const std::string& path);
void save_predictions_jsonl(const std::vector<AnswerSet>& predictions, const std::string& path);

// One clustering object or an array of them; each is validated against its
// question's gold answer set.
std::map<std::string, Clustering> load_human_clusterings(const std::string& path,
                                                         const Dataset& dataset);
void save_clusterings_json(const std::vector<Clustering>& clusterings, const std::string& path);

// Rounds to `digits` significant digits; reports serialize floats through
// this for stable bytes across platforms.
double round_sig(double value, int digits = 9);

std::string to_hex(std::uint64_t value);

}  // namespace qadist
