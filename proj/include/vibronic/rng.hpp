// rng.hpp — Philox4x32-10 counter-based RNG with per-stream keys, so parallel
// trajectory dispatch cannot reorder draws

#pragma once

#include <array>
#include <cstdint>

namespace vibronic {

namespace detail {

inline void philox_round(std::array<std::uint32_t, 4>& ctr, std::uint32_t k0, std::uint32_t k1) {
    const std::uint64_t p0 = 0xD2511F53ull * ctr[0];
    const std::uint64_t p1 = 0xCD9E8D57ull * ctr[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
}

inline std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                                  std::uint32_t k0, std::uint32_t k1) {
    for (int round = 0; round < 10; ++round) {
        philox_round(ctr, k0, k1);
        k0 += 0x9E3779B9u;
        k1 += 0xBB67AE85u;
    }
    return ctr;
}

}  // namespace detail

// One independent stream per (seed, stream_id); draws are indexed by a 64-bit
// block counter, so the sequence depends only on how many values were taken.
class PhiloxRng {
public:
    PhiloxRng(std::uint64_t seed, std::uint64_t stream_id)
        : key0_(static_cast<std::uint32_t>(seed)),
          key1_(static_cast<std::uint32_t>(seed >> 32)),
          stream_lo_(static_cast<std::uint32_t>(stream_id)),
          stream_hi_(static_cast<std::uint32_t>(stream_id >> 32)) {}

    std::uint64_t next_u64() {
        if (cache_filled_) {
            cache_filled_ = false;
            return cache_;
        }
        const auto out = detail::philox4x32_10(
            {static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
             stream_lo_, stream_hi_},
            key0_, key1_);
        ++block_;
        cache_ = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
        cache_filled_ = true;
        return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    }

    // uniform in [0, 1) with 53-bit resolution
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

private:
    std::uint32_t key0_, key1_;
    std::uint32_t stream_lo_, stream_hi_;
    std::uint64_t block_ = 0;
    std::uint64_t cache_ = 0;
    bool cache_filled_ = false;
};

}  // namespace vibronic
