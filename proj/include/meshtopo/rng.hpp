#pragma once

// Seeded generator with a fixed, documented algorithm so that runs are
// reproducible across platforms and standard libraries.
//
// Contract "meshtopo-rng-v1":
//   engine   std::mt19937_64 seeded with the 64-bit seed (output sequence is
//            fixed by the C++ standard),
//   uniform  u = (next() >> 11) * 2^-53, in [0, 1),
//   below(n) rejection sampling on the top bits: draw next() until
//            v < floor(2^64 / n) * n, return v % n,
//   shuffle  Fisher-Yates from the back, j = below(i + 1).
// std::uniform_*_distribution and std::shuffle are deliberately not used:
// their outputs differ between library implementations.

#include <cstdint>
#include <cstdlib>
#include <random>
#include <span>
#include <string>
#include <utility>

namespace meshtopo {

inline constexpr const char* kRngContract = "meshtopo-rng-v1 (mt19937_64)";

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t below(std::uint64_t n)
    {
        if (n == 0) return 0;
        const std::uint64_t limit = (~std::uint64_t{0} / n) * n;
        for (;;) {
            const std::uint64_t v = next();
            if (v < limit) return v % n;
        }
    }

    bool bernoulli(double p) { return p >= 1.0 || uniform() < p; }

    template <class T>
    void shuffle(std::span<T> items)
    {
        for (std::size_t i = items.size(); i > 1; --i) {
            const std::size_t j = below(i);
            using std::swap;
            swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; derives independent sub-seeds from a base seed.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt)
{
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed resolution shared by all tools: explicit flag, then MESH_TOPO_SEED,
/// then the fallback.
inline std::uint64_t resolve_seed(const std::uint64_t* flag, std::uint64_t fallback)
{
    if (flag != nullptr) return *flag;
    if (const char* env = std::getenv("MESH_TOPO_SEED"); env != nullptr && *env != '\0') {
        return std::stoull(env);
    }
    return fallback;
}

}  // namespace meshtopo
