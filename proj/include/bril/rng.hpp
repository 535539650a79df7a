#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace bril {

// splitmix64 stream. 8 bytes of state, value semantics, and the same
// sequence on every platform, which keeps seeded runs reproducible
// across compilers (std::uniform_* distributions are not portable).
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 bits of precision.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform_range(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n). n must be >= 1.
    std::size_t uniform_index(std::size_t n) {
        const std::uint64_t bound = n;
        const std::uint64_t limit = ~0ull - ~0ull % bound;
        std::uint64_t x = next_u64();
        while (x >= limit) x = next_u64();
        return static_cast<std::size_t>(x % bound);
    }

    // Fisher-Yates, driven by uniform_index so the permutation is portable.
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[uniform_index(i)]);
        }
    }

    std::uint64_t state() const { return state_; }

private:
    std::uint64_t state_;
};

// Stable 64-bit seed for a named stream derived from a master seed,
// so stages and episodes get decorrelated but reproducible streams.
inline std::uint64_t mix_seed(std::uint64_t seed, std::string_view tag) {
    std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    Rng r(seed ^ h);
    return r.next_u64();
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::string_view tag, std::uint64_t index) {
    Rng r(mix_seed(seed, tag) ^ (0x9e3779b97f4a7c15ull * (index + 1)));
    return r.next_u64();
}

}  // namespace bril
