#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace karlin {

/// Identifies one reproducible random stream: a master seed plus a stream index.
struct StreamKey {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

/**
 * Philox4x32-10 counter-based generator (Salmon et al., Random123).
 *
 * The 64-bit seed is the Philox key. The 128-bit counter is split into a
 * 64-bit block counter (low words) and a 64-bit stream index (high words),
 * so every (seed, stream) pair addresses an independent sequence without any
 * sequential seeding. Each block yields 128 bits, returned as two 64-bit words.
 *
 * Satisfies UniformRandomBitGenerator.
 */
class Philox4x32 {
public:
    using result_type = std::uint64_t;

    explicit Philox4x32(StreamKey key) noexcept;
    Philox4x32(std::uint64_t seed, std::uint64_t stream) noexcept
        : Philox4x32(StreamKey{seed, stream}) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        if (cursor_ == 2) refill();
        return buffer_[cursor_++];
    }

    StreamKey key() const noexcept { return key_; }

    /// Raw block function, exposed for known-answer tests.
    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> counter,
                                              std::array<std::uint32_t, 2> key) noexcept;

private:
    void refill() noexcept;

    StreamKey key_;
    std::uint64_t block_counter_ = 0;
    std::array<result_type, 2> buffer_{};
    int cursor_ = 2;
};

using Rng = Philox4x32;

/// Uniform on the open interval (0,1) with 53 random bits.
inline double uniform_open(Rng& rng) noexcept {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
}

/// Unit-rate exponential.
inline double exponential(Rng& rng) noexcept { return -std::log(uniform_open(rng)); }

/// Fresh 64-bit seed from system entropy.
std::uint64_t entropy_seed();

}  // namespace karlin
