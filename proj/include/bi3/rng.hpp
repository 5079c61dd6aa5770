#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>
#include <vector>

#include "bi3/error.hpp"

namespace bi3 {

// One splitmix64 scrambling round.  Used to derive independent sub-stream
// seeds from a (seed, salt...) tuple so that parallel work items can own
// private generators without sharing state.
inline std::uint64_t splitmix64_round(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    return splitmix64_round(seed ^ splitmix64_round(salt + 0x632be59bd9b4e019ull));
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> salts) {
    std::uint64_t s = seed;
    for (std::uint64_t salt : salts) s = mix_seed(s, salt);
    return s;
}

// Deterministic random source.  All draw algorithms are spelled out here
// (instead of using std::uniform_*_distribution) so that a given seed yields
// the same stream on every standard library implementation.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next() { return gen_(); }

    // Uniform double in [0, 1), 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Unbiased uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) throw PreconditionError("Rng::below: bound must be positive");
        const std::uint64_t threshold = (0ull - bound) % bound;
        for (;;) {
            const std::uint64_t v = next();
            if (v >= threshold) return v % bound;
        }
    }

    // Standard normal via Box-Muller (cosine branch, no cached spare).
    double normal() {
        const double u1 = 1.0 - uniform();  // (0, 1], keeps log() finite
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 gen_;
};

// In-place Fisher-Yates shuffle.
template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::swap(items[i - 1], items[rng.below(i)]);
    }
}

// First `count` elements of a shuffled copy: a uniform sample without
// replacement, order not meaningful.
template <typename T>
std::vector<T> sample_without_replacement(std::vector<T> items, std::size_t count, Rng& rng) {
    if (count > items.size()) {
        throw PreconditionError("sample_without_replacement: count exceeds population");
    }
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + rng.below(items.size() - i);
        std::swap(items[i], items[j]);
    }
    items.resize(count);
    return items;
}

}  // namespace bi3
