#include "qadist/text.hpp"

#include <cctype>

namespace qadist {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::string normalize(std::string_view raw) {
    size_t begin = 0;
    size_t end = raw.size();
    while (begin < end && is_space(raw[begin])) ++begin;
    while (end > begin && is_space(raw[end - 1])) --end;

    std::string out;
    out.reserve(end - begin);
    bool pending_space = false;
    for (size_t i = begin; i < end; ++i) {
        char c = raw[i];
        if (is_space(c)) {
            pending_space = true;
            continue;
        }
        if (pending_space && !out.empty()) out.push_back(' ');
        pending_space = false;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view normalized) {
    std::vector<std::string> tokens;
    std::string current;
    for (char c : normalized) {
        if (is_alnum(c)) {
            current.push_back(c);
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::vector<std::string> normalize_and_tokenize(std::string_view raw) {
    return tokenize(normalize(raw));
}

}  // namespace qadist
