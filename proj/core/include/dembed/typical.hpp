#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dembed/prob.hpp"
#include "dembed/rng.hpp"

namespace dembed {

// Combinatorial index over the entropy-typical subset of length-T sequences:
// those whose empirical log-likelihood rate is within eta of H(p). Qualifying
// type classes are enumerated with multinomial sizes; rank/unrank run over
// the union of classes in lexicographic sequence order.
class TypicalIndex {
public:
    struct TypeClass {
        std::vector<std::uint32_t> counts;  // per-symbol occurrence counts
        std::uint64_t size = 0;             // multinomial coefficient
        double log_prob_per_seq = 0.0;      // identical inside the class
    };

    static double default_eta(std::uint32_t length);  // T^(-1/4)

    TypicalIndex(const Pmf& source, std::uint32_t length, double eta);

    [[nodiscard]] const Pmf& source() const noexcept { return source_; }
    [[nodiscard]] std::uint32_t length() const noexcept { return length_; }
    [[nodiscard]] double eta() const noexcept { return eta_; }
    [[nodiscard]] std::uint64_t total_size() const noexcept { return total_; }
    [[nodiscard]] const std::vector<TypeClass>& classes() const noexcept { return classes_; }

    // Probability that an i.i.d. draw from the source lands in the set.
    [[nodiscard]] double typical_mass() const noexcept { return mass_; }

    [[nodiscard]] bool is_typical(std::span<const std::uint32_t> symbols) const;
    [[nodiscard]] std::optional<std::uint64_t> rank(std::span<const std::uint32_t> symbols) const;
    void unrank(std::uint64_t rank, std::span<std::uint32_t> out) const;
    [[nodiscard]] std::vector<std::uint32_t> unrank(std::uint64_t rank) const;

private:
    [[nodiscard]] std::uint64_t completions(std::span<const std::uint32_t> prefix_counts,
                                            std::uint32_t remaining) const;
    [[nodiscard]] const TypeClass* find_class(std::span<const std::uint32_t> counts) const;

    Pmf source_;
    std::uint32_t length_;
    double eta_;
    std::vector<TypeClass> classes_;  // sorted by counts vector
    std::uint64_t total_ = 0;
    double mass_ = 0.0;
};

// Watermark that cycles typical-set ranks: a typical sequence of rank i
// carries message M as the auxiliary sequence of rank (i + M - 1) mod n'.
// Atypical draws emit an independent auxiliary sequence, which decodes to 0.
// The auxiliary distribution equals the source distribution, so both typical
// sets coincide.
class TypicalSetScheme {
public:
    struct Emission {
        std::vector<std::uint32_t> seq;
        std::vector<std::uint32_t> aux;
    };

    TypicalSetScheme(const Pmf& source, std::uint32_t length, std::uint64_t messages,
                     double alpha, std::optional<double> eta = std::nullopt);

    [[nodiscard]] const Pmf& source() const noexcept { return index_.source(); }
    [[nodiscard]] const TypicalIndex& index() const noexcept { return index_; }
    [[nodiscard]] std::uint32_t length() const noexcept { return index_.length(); }
    [[nodiscard]] std::uint64_t message_count() const noexcept { return messages_; }
    [[nodiscard]] double alpha() const noexcept { return alpha_; }

    // (log m - log alpha) / T <= H(source); violation is flagged, not fatal.
    [[nodiscard]] bool rate_condition_ok() const noexcept { return rate_ok_; }

    [[nodiscard]] Emission encode(std::uint64_t message, RandomStream& rng) const;
    [[nodiscard]] std::uint64_t decode(std::span<const std::uint32_t> seq,
                                       std::span<const std::uint32_t> aux) const;

    // Exact per-message error: the atypical mass of the source extension.
    [[nodiscard]] double exact_error() const noexcept { return 1.0 - index_.typical_mass(); }

private:
    TypicalIndex index_;
    std::uint64_t messages_;
    double alpha_;
    bool rate_ok_;
};

} // namespace dembed
