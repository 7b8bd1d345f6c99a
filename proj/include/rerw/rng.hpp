#pragma once

#include <array>
#include <cstdint>

namespace rerw::rng {

/// SplitMix64 finalizer. Used for seeding and for deriving stream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class SplitMix64
{
public:
    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    constexpr std::uint64_t next() noexcept
    {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

private:
    std::uint64_t state_;
};

/// Seed of stream `index` under `master`. Distinct (master, index) pairs give
/// unrelated streams; the mapping is fixed so results never depend on
/// scheduling.
constexpr std::uint64_t derive(std::uint64_t master, std::uint64_t index) noexcept
{
    return mix64(mix64(master ^ 0x6a09e667f3bcc909ULL) + mix64(index + 0x9e3779b97f4a7c15ULL));
}

/// xoshiro256** (Blackman & Vigna). Satisfies UniformRandomBitGenerator.
class Xoshiro256ss
{
public:
    using result_type = std::uint64_t;

    explicit constexpr Xoshiro256ss(std::uint64_t seed) noexcept
    {
        SplitMix64 sm(seed);
        for (auto& w : s_) w = sm.next();
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    constexpr result_type operator()() noexcept
    {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    friend constexpr bool operator==(const Xoshiro256ss&, const Xoshiro256ss&) = default;

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept
    {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> s_{};
};

/// Uniform double in [0, 1) from the top 53 bits of one word.
constexpr double to_unit(std::uint64_t word) noexcept
{
    return static_cast<double>(word >> 11) * 0x1.0p-53;
}

/// Maps one word onto {0, ..., bound-1} by multiply-high. Consumes exactly one
/// word (no rejection loop); the bias is below bound / 2^64.
constexpr std::uint64_t to_bounded(std::uint64_t word, std::uint64_t bound) noexcept
{
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(word) * static_cast<unsigned __int128>(bound)) >> 64);
}

template <class Gen>
double uniform(Gen& gen)
{
    return to_unit(gen());
}

} // namespace rerw::rng
