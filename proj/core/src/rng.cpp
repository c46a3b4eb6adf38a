#include "qadist/rng.hpp"

#include <stdexcept>

namespace qadist {

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view question_id, std::uint64_t index) {
    std::uint64_t h = mix64(master);
    h = mix64(h ^ fnv1a64(question_id));
    h = mix64(h ^ index);
    return h;
}

std::mt19937_64 seeded_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

int draw_categorical(std::span<const double> probs, std::mt19937_64& rng) {
    if (probs.empty()) throw std::invalid_argument("draw_categorical: empty distribution");
    double total = 0.0;
    for (double p : probs) total += p;
    if (total <= 0.0) throw std::invalid_argument("draw_categorical: no positive mass");

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double u = unit(rng) * total;
    double cumulative = 0.0;
    int last_positive = -1;
    for (size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] <= 0.0) continue;
        cumulative += probs[i];
        last_positive = static_cast<int>(i);
        if (u < cumulative) return last_positive;
    }
    return last_positive;
}

}  // namespace qadist
