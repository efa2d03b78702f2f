#include "nids/rng.hpp"

#include <cmath>
#include <numbers>

namespace nids {

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = kFnvOffset;
    for (unsigned char c : s) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

} // namespace

std::uint64_t derive_seed(std::uint64_t master, std::string_view tag) {
    return mix64(master ^ mix64(fnv1a(tag)));
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t a) {
    return mix64(derive_seed(master, tag) ^ mix64(a + 0x9e3779b97f4a7c15ull));
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t a, std::uint64_t b) {
    return mix64(derive_seed(master, tag, a) ^ mix64(b + 0xd1b54a32d192ed03ull));
}

std::uint64_t derive_seed_keyed(std::uint64_t master, std::string_view tag, std::string_view key) {
    return mix64(derive_seed(master, tag) ^ mix64(fnv1a(key)));
}

std::uint64_t Rng::bounded(std::uint64_t n) {
    if (n == 0) return 0;
    while (true) {
        std::uint64_t x = next();
        __uint128_t m = static_cast<__uint128_t>(x) * n;
        std::uint64_t low = static_cast<std::uint64_t>(m);
        if (low >= n || low >= (0ull - n) % n) {
            return static_cast<std::uint64_t>(m >> 64);
        }
    }
}

double Rng::gaussian() {
    // Box-Muller, exactly two words per call.
    double u1 = uniform();
    double u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace nids
