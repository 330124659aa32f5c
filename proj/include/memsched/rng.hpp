#pragma once

#include <cstdint>
#include <random>

namespace memsched {

// Deterministic RNG wrapper. All probabilistic code in this project draws
// through this class so that a (seed, config) pair replays bit-identically;
// std::mt19937_64 output is fully specified by the standard, distributions
// are hand-rolled here because the standard ones are not portable.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t raw() { return gen_(); }

    // uniform double in [0, 1), 53 random bits
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    // uniform integer in [0, bound), bound > 0
    std::uint64_t below(std::uint64_t bound) {
        // rejection-free modulo is fine here; bias is < 2^-53 for our bounds
        return static_cast<std::uint64_t>(uniform() * static_cast<double>(bound));
    }

    // independent child stream, e.g. one per replication
    static Rng child(std::uint64_t seed, std::uint64_t stream) {
        return Rng(mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ULL)));
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        // splitmix64 finalizer
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::mt19937_64 gen_;
};

} // namespace memsched
