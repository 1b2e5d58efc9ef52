#pragma once

#include <array>
#include <cstdint>

namespace zipfirm {

/// Philox4x32-10 block function (Salmon et al., SC'11). Pure: the output
/// depends only on (counter, key), which makes every draw addressable.
inline std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                                  std::array<std::uint32_t, 2> key) noexcept {
    constexpr std::uint32_t kMul0 = 0xD2511F53u;
    constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
        const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

/// Counter-based uniform generator. Draw k of a stream is a pure function of
/// (seed, k): block k/2 of Philox4x32-10 keyed by the seed, half k%2.
/// The whole state is (seed, draws), so snapshots resume bit-exactly.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed = 0, std::uint64_t draws = 0) noexcept
        : seed_(seed), draws_(draws) {}

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] std::uint64_t draws() const noexcept { return draws_; }

    /// Next raw 64-bit word.
    std::uint64_t next_u64() noexcept {
        const std::uint64_t block = draws_ >> 1;
        if (!cached_ || cached_block_ != block) {
            const std::array<std::uint32_t, 4> ctr{static_cast<std::uint32_t>(block),
                                                   static_cast<std::uint32_t>(block >> 32), 0u, 0u};
            const std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(seed_),
                                                   static_cast<std::uint32_t>(seed_ >> 32)};
            cache_ = philox4x32_10(ctr, key);
            cached_block_ = block;
            cached_ = true;
        }
        const unsigned half = static_cast<unsigned>(draws_ & 1u) * 2u;
        ++draws_;
        return (std::uint64_t{cache_[half]} << 32) | cache_[half + 1];
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n); n must be positive.
    std::uint64_t below(std::uint64_t n) noexcept {
        auto k = static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
        return k < n ? k : n - 1;
    }

    friend bool operator==(const CounterRng& a, const CounterRng& b) noexcept {
        return a.seed_ == b.seed_ && a.draws_ == b.draws_;
    }

private:
    std::uint64_t seed_;
    std::uint64_t draws_;
    std::uint64_t cached_block_ = 0;
    std::array<std::uint32_t, 4> cache_{};
    bool cached_ = false;
};

}  // namespace zipfirm
