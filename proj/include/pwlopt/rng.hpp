#ifndef PWLOPT_RNG_HPP
#define PWLOPT_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace pwlopt {

// Seeded random stream. All randomized operations take an explicit Rng so
// that a (config, seed) pair replays byte-identically. The double-generating
// helpers are hand-rolled on top of mt19937_64 rather than <random>
// distributions, so a stream's output is pinned by this file alone.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), gen_(mix(seed)) {}

    // Independent substream for parallel trials: (seed, salt) -> new stream.
    Rng fork(std::uint64_t salt) const {
        return Rng(mix(seed_ ^ mix(salt + 0x9e3779b97f4a7c15ull)));
    }

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return gen_(); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Standard normal via Box-Muller; the spare value is discarded so the
    // stream position is a pure function of the call count.
    double normal() {
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    // Uniform index in [0, n).
    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(uniform01() * static_cast<double>(n)) % n;
    }

    bool bernoulli(double p) { return uniform01() < p; }

private:
    // splitmix64 finalizer; decorrelates small consecutive seeds.
    static std::uint64_t mix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

    std::uint64_t seed_;
    std::mt19937_64 gen_;
};

}  // namespace pwlopt

#endif
