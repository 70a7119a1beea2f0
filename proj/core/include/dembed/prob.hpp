#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dembed/rng.hpp"

namespace dembed {

// Absolute slack allowed when validating that a pmf sums to one. Inputs whose
// total deviates by less than this are renormalized; larger deviations are
// rejected so file round-trip noise is tolerated without hiding real bugs.
inline constexpr double kPmfSumTolerance = 1e-9;

// Default cap on materialized table sizes (entries), e.g. product extensions
// and coupling tables. Overridable per call; the CLI also honors the
// DEMBED_MATERIALIZE_LIMIT environment variable.
inline constexpr std::uint64_t kDefaultMaterializeLimit = std::uint64_t{1} << 24;

// Probability mass function over an indexed finite alphabet. Immutable after
// construction; entries are >= 0 and sum to 1 within 1e-12.
class Pmf {
public:
    explicit Pmf(std::vector<double> probs);

    [[nodiscard]] std::size_t size() const noexcept { return probs_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return probs_[i]; }
    [[nodiscard]] std::span<const double> values() const noexcept { return probs_; }

    [[nodiscard]] static Pmf uniform(std::size_t n);
    [[nodiscard]] static Pmf point_mass(std::size_t n, std::size_t at);

    [[nodiscard]] auto begin() const noexcept { return probs_.begin(); }
    [[nodiscard]] auto end() const noexcept { return probs_.end(); }

    friend bool operator==(const Pmf&, const Pmf&) = default;

private:
    std::vector<double> probs_;
};

// Bijection between length-T sequences over a size-V alphabet and integer
// indices in [0, V^T). Indexing is lexicographic with symbol 0 most
// significant, so lexicographic order of sequences equals numeric order.
class SequenceSpace {
public:
    SequenceSpace(std::uint32_t alphabet_size, std::uint32_t length);

    [[nodiscard]] std::uint32_t alphabet_size() const noexcept { return alphabet_; }
    [[nodiscard]] std::uint32_t length() const noexcept { return length_; }
    [[nodiscard]] std::uint64_t size() const noexcept { return size_; }

    [[nodiscard]] std::uint64_t to_index(std::span<const std::uint32_t> symbols) const;
    void from_index(std::uint64_t index, std::span<std::uint32_t> out) const;
    [[nodiscard]] std::vector<std::uint32_t> symbols_of(std::uint64_t index) const;

private:
    std::uint32_t alphabet_;
    std::uint32_t length_;
    std::uint64_t size_;
};

// Shannon entropy in nats, with the 0 ln 0 = 0 convention.
[[nodiscard]] double entropy(const Pmf& p);

// KL divergence sum p ln(p/q) in nats. Returns +infinity when p puts mass
// where q does not. Throws on support-size mismatch.
[[nodiscard]] double kl_divergence(const Pmf& p, const Pmf& q);

// Total variation distance sum (p - q)_+ = half the L1 distance.
[[nodiscard]] double tv_distance(const Pmf& p, const Pmf& q);

// sum (p(x) - tau)_+ for tau >= 0. Satisfies
// overhang(p, tau) == 1 - sum min(p(x), tau).
[[nodiscard]] double overhang(const Pmf& p, double tau);

// Materialized i.i.d. product distribution over space.size() indices.
// Throws when the table would exceed `limit` entries.
[[nodiscard]] Pmf iid_extension(const Pmf& p, const SequenceSpace& space,
                                std::uint64_t limit = kDefaultMaterializeLimit);

// Streaming log-probability query for the i.i.d. extension; usable beyond
// the materialization limit.
class IidLogProb {
public:
    IidLogProb(const Pmf& p, SequenceSpace space);

    [[nodiscard]] double log_prob_index(std::uint64_t index) const;
    [[nodiscard]] double log_prob_symbols(std::span<const std::uint32_t> symbols) const;

private:
    std::vector<double> log_probs_;
    SequenceSpace space_;
};

// Single draw from p by inverse CDF over the stored order.
[[nodiscard]] std::size_t sample_index(const Pmf& p, RandomStream& rng);

} // namespace dembed
