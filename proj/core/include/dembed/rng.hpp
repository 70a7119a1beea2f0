#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace dembed {

// Seed material for a reproducible sample stream. The same (seed, stream_id)
// pair always reproduces the identical stream; distinct stream_ids give
// streams that are independent for practical purposes, so workers can split
// one master seed without coordination.
struct RngSeed {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;

    [[nodiscard]] RngSeed with_stream(std::uint64_t id) const { return {seed, id}; }

    friend bool operator==(const RngSeed&, const RngSeed&) = default;
};

// splitmix64 finalizer; also used as the keyed hash in the green-red baseline.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// xoshiro256++ with splitmix-expanded state. Fully self-contained so output
// is bit-identical across platforms and standard library versions.
class RandomStream {
public:
    explicit RandomStream(RngSeed s) noexcept {
        std::uint64_t x = mix64(s.seed) ^ mix64(mix64(s.stream_id) + 0x6a09e667f3bcc909ULL);
        for (auto& word : state_) {
            x += 0x9e3779b97f4a7c15ULL;
            word = mix64(x);
        }
    }

    std::uint64_t next_u64() noexcept {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, bound) by rejection; bound must be positive.
    std::uint64_t next_below(std::uint64_t bound) noexcept {
        const std::uint64_t limit = ~0ULL - (~0ULL % bound);
        std::uint64_t x = next_u64();
        while (x >= limit) x = next_u64();
        return x % bound;
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4]{};
};

// Inverse-CDF sampler over an arbitrary non-negative weight vector.
// Draws are deterministic given the stream state.
class CdfSampler {
public:
    explicit CdfSampler(std::span<const double> weights);

    [[nodiscard]] std::size_t sample(RandomStream& rng) const;
    [[nodiscard]] std::size_t size() const noexcept { return cumulative_.size(); }

private:
    std::vector<double> cumulative_;
};

} // namespace dembed
