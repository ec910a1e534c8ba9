#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

namespace ocp {

// SplitMix64 finalizer, used to hash seed paths into well-mixed 64-bit states.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seeded random stream. Substreams are derived from a (master seed, path)
// tuple so that parallel workers draw from disjoint, reproducible streams
// regardless of scheduling order.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : gen_(mix64(seed)) {}

    static RngStream derive(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
        std::uint64_t s = mix64(master);
        for (std::uint64_t p : path) s = mix64(s ^ mix64(p + 0x632be59bd9b4e019ULL));
        return RngStream(s);
    }

    std::uint64_t next_u64() { return gen_(); }

    // Uniform double in [0, 1) with 53 bits of precision.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n). Rejection sampling, bias-free.
    std::uint64_t uniform_int(std::uint64_t n) {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 gen_;
};

}  // namespace ocp
