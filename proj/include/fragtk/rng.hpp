#pragma once

#include <cstdint>
#include <random>

namespace fragtk {

/// splitmix64 scramble, used for seed derivation and stream splitting.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Deterministic random source. mt19937_64 supplies the bits (its output is
/// pinned by the standard); the uniform/normal/Poisson transforms are our own
/// so streams reproduce across standard-library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t seed() const { return seed_; }

    /// Independent child stream. Derivation depends only on (seed, stream_id),
    /// never on how much of this stream has been consumed, so per-item streams
    /// are order-independent.
    Rng derive(std::uint64_t stream_id) const;

    /// Raw 64 bits.
    std::uint64_t bits() { return engine_(); }

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform();

    /// Standard normal (Box-Muller, second deviate cached).
    double normal();

    /// Poisson draw; Knuth multiplication below lambda=10, Hormann's PTRS
    /// transformed rejection above.
    long poisson(double lambda);

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

} // namespace fragtk
