#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dembed/optimize.hpp"
#include "dembed/prob.hpp"
#include "dembed/rng.hpp"

namespace dembed {

enum class DecoderFamily { cyclic, modular_field };

[[nodiscard]] const char* family_name(DecoderFamily f);
[[nodiscard]] DecoderFamily family_from_name(const std::string& name);

// Latin-square decoder over sequence index x in [0, n) and auxiliary index
// zeta in [0, n+1). The redundant auxiliary symbol decodes to 0, as does any
// value above the message count. For fixed x (or fixed non-redundant zeta)
// the pre-clip value is a bijection onto [1..n].
class DecoderSpec {
public:
    DecoderSpec(DecoderFamily family, std::uint64_t n, std::uint64_t m);

    [[nodiscard]] DecoderFamily family() const noexcept { return family_; }
    [[nodiscard]] std::uint64_t n() const noexcept { return n_; }
    [[nodiscard]] std::uint64_t message_count() const noexcept { return m_; }
    [[nodiscard]] std::uint64_t redundant_index() const noexcept { return redundant_; }
    [[nodiscard]] std::uint64_t scramble() const noexcept { return scramble_; }

    // Message in [0..m]: 0 for the redundant symbol or a pre-clip value > m.
    [[nodiscard]] std::uint64_t decode(std::uint64_t x, std::uint64_t zeta) const;

    // Pre-clip Latin value in [1..n]; zeta must not be the redundant index.
    [[nodiscard]] std::uint64_t raw_value(std::uint64_t x, std::uint64_t zeta) const;

    // The unique zeta with decode(x, zeta) == j, and its inverse.
    [[nodiscard]] std::uint64_t matched_aux(std::uint64_t message, std::uint64_t x) const;
    [[nodiscard]] std::optional<std::uint64_t> matched_seq(std::uint64_t message,
                                                           std::uint64_t zeta) const;

    // x index paired with non-redundant aux rank k in the aux-pmf
    // construction; this is the message-1 matching, so the first message is
    // always the aligned one.
    [[nodiscard]] std::uint64_t aligned_seq(std::uint64_t aux_rank) const;
    [[nodiscard]] std::vector<std::uint64_t> alignment() const;

private:
    [[nodiscard]] std::uint64_t aux_rank(std::uint64_t zeta) const;
    [[nodiscard]] std::uint64_t aux_index(std::uint64_t rank) const;

    DecoderFamily family_;
    std::uint64_t n_;
    std::uint64_t m_;
    std::uint64_t redundant_;
    std::uint64_t scramble_ = 1;
    std::uint64_t scramble_inv_ = 1;
};

// Exhaustive check of both bijectivity conditions; O(n^2), intended for
// n up to a few thousand.
[[nodiscard]] bool is_latin_square(const DecoderSpec& spec);

// Per-message joint distribution over (x, zeta) cells with fixed marginals.
struct CouplingTable {
    std::uint64_t message = 1;                // 1-based
    std::size_t rows = 0, cols = 0;           // n, n+1
    std::vector<double> cells;                // row-major
    std::vector<double> seq_marginal;         // target marginal over x
    std::vector<double> aux_marginal;         // target marginal over zeta
    double residual = 0.0;                    // mass routed off the matching

    [[nodiscard]] double cell(std::size_t x, std::size_t zeta) const {
        return cells[x * cols + zeta];
    }
};

// Auxiliary distribution over n+1 outcomes: rank k carries
// min(p_x(aligned_seq(k)), alpha/m) and the last (redundant) outcome carries
// the overhang mass. `alignment` maps aux rank to its paired x index; empty
// means identity.
[[nodiscard]] Pmf build_aux_pmf(const Pmf& p_x, double alpha, std::uint64_t m,
                                std::span<const std::uint64_t> alignment = {});

// Joint table for one message: matched cells take min(p_x, p_zeta); the rest
// split the leftover mass in proportion excess(x) * deficit(zeta) / residual,
// which reproduces both marginals exactly.
[[nodiscard]] CouplingTable build_coupling(std::uint64_t message, const Pmf& seq_pmf,
                                           const Pmf& aux_pmf, const DecoderSpec& decoder);

struct SchemeParams {
    std::uint32_t alphabet_size = 2;  // V
    std::uint32_t length = 1;         // T
    std::uint64_t messages = 1;       // m
    double alpha = 0.1;
    double distortion = 0.0;  // d
    DistortionMetric metric = DistortionMetric::tv;
    DecoderFamily family = DecoderFamily::cyclic;
    RngSeed seed;
};

struct SchemeBundle {
    SchemeParams params;
    Pmf seq_pmf;   // optimized sequence-level marginal
    Pmf aux_pmf;   // auxiliary marginal over n+1 outcomes
    DecoderSpec decoder;
    std::vector<CouplingTable> couplings;  // one per message, 1-based order
    double beta_star = 0.0;
    OptimizerReport optimizer;
};

// End-to-end construction: optimize the sequence marginal inside the
// distortion ball, derive the auxiliary distribution and decoder, and build
// all m couplings. `q` is either a symbol-level pmf of size V (extended
// i.i.d. to length T) or a sequence-level pmf of size V^T.
[[nodiscard]] SchemeBundle build_finite_scheme(const SchemeParams& params, const Pmf& q,
                                               std::uint64_t limit = kDefaultMaterializeLimit);

} // namespace dembed
