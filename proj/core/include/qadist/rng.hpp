#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace qadist {

std::uint64_t fnv1a64(std::string_view bytes);

// splitmix64 finalizer; decorrelates nearby seed values.
std::uint64_t mix64(std::uint64_t x);

// Deterministic per-(question, sample) seed so parallel and serial runs of
// the harness draw identical streams.
std::uint64_t derive_seed(std::uint64_t master, std::string_view question_id, std::uint64_t index);

std::mt19937_64 seeded_rng(std::uint64_t seed);

// Draws an index with probability proportional to probs (need not be
// normalized). Walks the cumulative sum; the last positive entry absorbs
// rounding slack.
int draw_categorical(std::span<const double> probs, std::mt19937_64& rng);

}  // namespace qadist
