#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace nids {

// All randomness in the project flows through this header. Results must be
// identical across platforms and standard libraries, so nothing here uses
// <random> distributions.

// SplitMix64 finalizer. Bijective on 64-bit values.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Seed derivation: every stochastic task derives its own seed from
// (master seed, stage tag, task indices) so scheduling cannot change results.
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag);
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t a);
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t a, std::uint64_t b);
std::uint64_t derive_seed_keyed(std::uint64_t master, std::string_view tag, std::string_view key);

// Maps a 64-bit word to [0,1) with 53 bits of precision.
constexpr double unit_double(std::uint64_t word) {
    return static_cast<double>(word >> 11) * 0x1.0p-53;
}

// Stateless per-row Bernoulli decision; depends only on (seed, index), which
// is what makes sampling independent of read chunking and parallel order.
inline bool bernoulli_keep(std::uint64_t seed, std::uint64_t index, double fraction) {
    if (fraction >= 1.0) return true;
    return unit_double(mix64(seed ^ mix64(index + 0x632be59bd9b4e019ull))) < fraction;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    double uniform() { return unit_double(next()); }

    // Unbiased integer in [0, n). Lemire's multiply-shift with rejection.
    std::uint64_t bounded(std::uint64_t n);

    // Two independent N(0,1) variates would share draws under plain
    // Box-Muller caching; each call consumes exactly two words instead.
    double gaussian();

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(bounded(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

} // namespace nids
