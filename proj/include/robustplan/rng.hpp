#pragma once

#include <cstdint>

namespace robustplan {

/**
 * @brief Deterministic counter-based random generator.
 *
 * Every random draw in the library flows from a single 64-bit seed through
 * instances of this class; there is no global RNG state. The generator is
 * counter-based (output i depends only on key and i), so independent streams
 * can be forked with split() without sharing or advancing state. Identical
 * seeds produce identical streams on every platform: draws are derived from
 * integer mixing only, never from implementation-defined std distributions.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept : key_(mix(seed ^ kKeyTweak)) {}

    /// Next raw 64-bit draw.
    std::uint64_t next_u64() noexcept { return mix(key_ + (++counter_) * kGamma); }

    /// Uniform double in [0, 1).
    double uniform() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi). Degenerate bounds return lo.
    double uniform(double lo, double hi) noexcept {
        return lo + (hi - lo) * uniform();
    }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t uniform_int(std::uint64_t n) noexcept {
        // Multiply-shift rejection-free mapping; bias < 2^-64 * n, negligible
        // for the desk-scale n used here.
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    /**
     * @brief Fork an independent stream identified by tag.
     *
     * Children with distinct tags are statistically independent of each other
     * and of the parent; forking does not advance the parent's counter.
     */
    Rng split(std::uint64_t tag) const noexcept {
        return Rng(mix(key_ ^ mix(tag + kSplitTweak)));
    }

private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
    static constexpr std::uint64_t kKeyTweak = 0xD1B54A32D192ED03ULL;
    static constexpr std::uint64_t kSplitTweak = 0x8CB92BA72F3D8DD7ULL;

    // SplitMix64 finalizer.
    static std::uint64_t mix(std::uint64_t z) noexcept {
        z += kGamma;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace robustplan
