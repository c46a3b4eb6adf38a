#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace qadist {

// Shared text normalizer: lowercase, trim, collapse internal whitespace.
// Applied only at embedding/matching boundaries; stored answer strings stay
// verbatim so input files remain auditable.
std::string normalize(std::string_view raw);

// Splits a normalized string into tokens. Runs of non-alphanumeric
// characters act as separators, so "teapot/kettle" yields two tokens.
std::vector<std::string> tokenize(std::string_view normalized);

std::vector<std::string> normalize_and_tokenize(std::string_view raw);

}  // namespace qadist
