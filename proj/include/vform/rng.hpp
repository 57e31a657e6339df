#pragma once

#include <cstdint>
#include <random>

namespace vform {

// All randomness in the library flows through Rng seeded via seed_for().
// Uniform doubles come from the top 53 bits of the raw generator output,
// never from std::uniform_real_distribution, so streams are identical
// across standard libraries and build flags.

constexpr std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Deterministic stream splitting: fold each tag into the seed with one
// splitmix64 round. seed_for(s, a, b) != seed_for(seed_for(s, a), b) is NOT
// guaranteed to differ from other tag spellings, so modules use fixed tag
// prefixes (see kStream* below) and document their layouts.
constexpr std::uint64_t seed_for(std::uint64_t base) { return base; }

template <typename... Rest>
constexpr std::uint64_t seed_for(std::uint64_t base, std::uint64_t tag, Rest... rest) {
    return seed_for(splitmix64(base ^ (tag + 0x9E3779B97F4A7C15ULL)), rest...);
}

// Stream namespaces, first tag after the master seed.
inline constexpr std::uint64_t kStreamInit = 1;      // initial-state sampling
inline constexpr std::uint64_t kStreamAres = 2;      // ares simulate/resample
inline constexpr std::uint64_t kStreamPlanner = 3;   // local adaptive planner (dampc + baseline)
inline constexpr std::uint64_t kStreamController = 4; // game controller
inline constexpr std::uint64_t kStreamAttacker = 5;  // game attacker
inline constexpr std::uint64_t kStreamRemoval = 6;   // game removal subset
inline constexpr std::uint64_t kStreamRun = 7;       // smc per-run seeds

// Order-independent only in the sense that it is a pure function of the
// sorted id list; callers pass ids ascending.
inline std::uint64_t member_hash(const int* ids, int count) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (int i = 0; i < count; ++i)
        h = splitmix64(h ^ static_cast<std::uint64_t>(ids[i] + 1));
    return h;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t raw() { return gen_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n), n > 0; modulo bias is negligible for n << 2^64
    // and identical across platforms, which matters more here.
    std::uint64_t below(std::uint64_t n) { return gen_() % n; }

private:
    std::mt19937_64 gen_;
};

} // namespace vform
