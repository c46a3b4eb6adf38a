#include "qadist/embedding.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qadist/text.hpp"

namespace qadist {

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> fields;
    size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        if (j > i) fields.push_back(line.substr(i, j - i));
        i = j;
    }
    return fields;
}

bool parse_double(std::string_view field, double& out) {
    const char* begin = field.data();
    const char* end = begin + field.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc{} && ptr == end;
}

bool parse_positive_int(std::string_view field, long& out) {
    const char* begin = field.data();
    const char* end = begin + field.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc{} && ptr == end && out > 0;
}

[[noreturn]] void parse_error(const std::string& path, size_t line_number, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line_number) + ": " + what);
}

}  // namespace

const std::vector<double>* EmbeddingTable::find(std::string_view token) const {
    auto it = vectors.find(std::string(token));
    return it == vectors.end() ? nullptr : &it->second;
}

EmbeddingTable load_vectors(const std::string& path,
                            const std::unordered_set<std::string>* vocab_filter) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open word-vector file: " + path);

    EmbeddingTable table;
    std::string line;
    size_t line_number = 0;
    bool first_content_line = true;

    while (std::getline(in, line)) {
        ++line_number;
        auto fields = split_ws(line);
        if (fields.empty()) continue;

        if (first_content_line) {
            first_content_line = false;
            // Optional "count dim" header: exactly two positive integers.
            long count = 0, dim = 0;
            if (fields.size() == 2 && parse_positive_int(fields[0], count) &&
                parse_positive_int(fields[1], dim)) {
                table.dim = static_cast<int>(dim);
                continue;
            }
        }

        if (fields.size() < 2) parse_error(path, line_number, "expected 'token v1 ... vD'");
        if (table.dim == 0) table.dim = static_cast<int>(fields.size()) - 1;
        if (static_cast<int>(fields.size()) - 1 != table.dim) {
            parse_error(path, line_number,
                        "expected " + std::to_string(table.dim) + " components, got " +
                            std::to_string(fields.size() - 1));
        }

        std::string token = normalize(fields[0]);
        if (vocab_filter && !vocab_filter->count(token)) continue;
        if (table.vectors.count(token)) continue;  // keep first occurrence

        std::vector<double> values(static_cast<size_t>(table.dim));
        for (int d = 0; d < table.dim; ++d) {
            if (!parse_double(fields[static_cast<size_t>(d) + 1], values[static_cast<size_t>(d)])) {
                parse_error(path, line_number, "bad number '" + std::string(fields[static_cast<size_t>(d) + 1]) + "'");
            }
        }
        table.vectors.emplace(std::move(token), std::move(values));
    }
    if (table.dim == 0) throw std::runtime_error(path + ": no vector rows found");
    return table;
}

AnswerVector embed_answer(const EmbeddingTable& table, std::string_view raw_answer) {
    AnswerVector result;
    result.values.assign(static_cast<size_t>(table.dim), 0.0);

    const auto tokens = normalize_and_tokenize(raw_answer);
    result.total_tokens = static_cast<int>(tokens.size());

    for (const auto& token : tokens) {
        const auto* vec = table.find(token);
        if (!vec) continue;
        ++result.covered_tokens;
        for (size_t d = 0; d < vec->size(); ++d) result.values[d] += (*vec)[d];
    }
    if (result.covered_tokens > 0) {
        const double inv = 1.0 / static_cast<double>(result.covered_tokens);
        for (double& v : result.values) v *= inv;
    }
    // covered_tokens == 0 leaves the zero-vector fallback in place.
    return result;
}

std::vector<AnswerVector> embed_answers(const EmbeddingTable& table, const AnswerSet& answers) {
    std::vector<AnswerVector> vectors;
    vectors.reserve(answers.answers.size());
    for (const auto& answer : answers.answers) vectors.push_back(embed_answer(table, answer));
    return vectors;
}

std::unordered_set<std::string> dataset_vocabulary(const std::vector<const AnswerSet*>& sets) {
    std::unordered_set<std::string> vocab;
    for (const auto* set : sets) {
        if (!set) continue;
        for (const auto& answer : set->answers) {
            for (auto& token : normalize_and_tokenize(answer)) vocab.insert(std::move(token));
        }
    }
    return vocab;
}

}  // namespace qadist
