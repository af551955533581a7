#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace mfbo {

/// Counter-based pseudo-random stream (splitmix64 output function).
///
/// The sequence is a pure function of (seed, counter), so identical seeds
/// reproduce identical draws on every platform and the stream can be stored
/// or forked cheaply. Standard-library distributions are deliberately not
/// used: their output is implementation-defined and would break trace
/// reproducibility across toolchains.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_(seed), counter_(0) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t counter() const { return counter_; }

    /// Next raw 64-bit word.
    std::uint64_t next_u64() {
        std::uint64_t z = seed_ + (++counter_) * 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). Uses 128-bit multiply with rejection so the
    /// result is exactly unbiased.
    std::uint64_t uniform_index(std::uint64_t n) {
        if (n == 0) return 0;
        while (true) {
            std::uint64_t x = next_u64();
            unsigned __int128 m = static_cast<unsigned __int128>(x) * n;
            std::uint64_t lo = static_cast<std::uint64_t>(m);
            if (lo >= n || lo >= (-n) % n) return static_cast<std::uint64_t>(m >> 64);
        }
    }

    /// Standard normal via Box-Muller (no cached spare, to keep the stream
    /// state a plain counter).
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Standard Gumbel draw (used by the max-value sampling approximation).
    double gumbel() {
        double u = uniform();
        while (u <= 0.0 || u >= 1.0) u = uniform();
        return -std::log(-std::log(u));
    }

    /// In-place Fisher-Yates shuffle of indices [0, n).
    std::vector<std::size_t> permutation(std::size_t n) {
        std::vector<std::size_t> p(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = i;
        for (std::size_t i = n; i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_index(i));
            std::swap(p[i - 1], p[j]);
        }
        return p;
    }

    /// Deterministically derive an independent stream. Streams derived with
    /// distinct tags (or from distinct parents) do not overlap in practice.
    RngStream derive(std::uint64_t tag) const {
        std::uint64_t z = seed_ ^ (0xD1B54A32D192ED03ULL * (tag + 1));
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return RngStream(z ^ (z >> 31));
    }

private:
    std::uint64_t seed_;
    std::uint64_t counter_;
};

} // namespace mfbo
