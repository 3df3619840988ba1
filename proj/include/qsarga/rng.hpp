#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace qsarga {

/// Seeded generator with platform-independent derived distributions.
///
/// std::mt19937_64 has a standardized output sequence, but the standard
/// distributions do not, so uniform integers, reals, normals and shuffles
/// are derived here explicitly. Fixed seed gives identical streams on every
/// platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n);

    /// Uniform integer in [lo, hi].
    std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }

    /// Uniform real in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform real in [0, 1], both ends attainable.
    double uniform_closed() { return static_cast<double>(next() >> 11) / static_cast<double>((1ULL << 53) - 1); }

    bool coin() { return (next() >> 63) != 0; }

    /// Standard normal deviate (Box-Muller, no cached pair).
    double normal();

    /// Bernoulli trial with success probability prob.
    bool chance(double prob) { return prob >= 1.0 || (prob > 0.0 && uniform() < prob); }

    template <class T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = below(i);
            using std::swap;
            swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

/// SplitMix64 finalizer; used for stateless hashing of (seed, key) tuples.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Maps 64 random bits to a real in the open interval (0, 1).
constexpr double bits_to_open_unit(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

} // namespace qsarga
