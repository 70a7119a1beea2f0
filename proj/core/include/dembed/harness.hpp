#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dembed/scheme.hpp"
#include "dembed/typical.hpp"

namespace dembed {

struct WilsonInterval {
    double lo = 0.0;
    double hi = 1.0;
};

// 95% score interval unless another z is given; well behaved near 0.
[[nodiscard]] WilsonInterval wilson_interval(std::uint64_t hits, std::uint64_t draws,
                                             double z = 1.959963984540054);

// Exact per-message error vector beta_j = P_j(decode != j), by full cell
// enumeration of the coupling tables.
[[nodiscard]] std::vector<double> exact_errors(const SchemeBundle& bundle);

// sup over sources of the false alarm: linear in the source, so the sup is
// attained at a point mass and evaluated exactly.
[[nodiscard]] double worst_case_false_alarm(const DecoderSpec& decoder, const Pmf& aux_pmf);

struct ValidationReport {
    std::vector<double> marginal_deviation;  // per message, max over rows+cols
    std::vector<double> beta_exact;          // per message
    std::vector<double> residuals;           // per message off-matching mass
    double beta_star = 0.0;
    double max_beta = 0.0;
    double false_alarm_worst_case = 0.0;
    bool aligned_message_ok = false;  // first message achieves beta_star
    bool converse_ok = false;         // max_beta >= beta_star - 1e-10
    bool max_exceeds_beta_star = false;
    std::string note;
};

[[nodiscard]] ValidationReport validate(const SchemeBundle& bundle);

struct SimConfig {
    std::uint64_t trials = 10000;
    RngSeed seed;
    // Under the null the sequence comes from h0_source when given, otherwise
    // from the worst-case point mass (bundles) or the scheme source
    // (typical-set schemes). Null trials are seeded separately from message
    // trials.
    std::optional<Pmf> h0_source;
    std::uint64_t h0_trials = 0;  // 0 means "same as trials"
};

struct MessageEstimate {
    std::uint64_t message = 0;
    std::uint64_t draws = 0;
    std::uint64_t errors = 0;
    double beta_hat = 0.0;
    WilsonInterval interval;
};

struct SimReport {
    std::vector<MessageEstimate> per_message;
    std::uint64_t fa_draws = 0;
    std::uint64_t fa_hits = 0;
    double fa_hat = 0.0;
    WilsonInterval fa_interval;
    std::optional<double> fa_worst_exact;  // bundles only
    std::uint64_t trials = 0;
    RngSeed seed;
    double wall_ms = 0.0;  // excluded from serialized reports by default
};

[[nodiscard]] SimReport monte_carlo(const SchemeBundle& bundle, const SimConfig& cfg);
[[nodiscard]] SimReport monte_carlo(const TypicalSetScheme& scheme, const SimConfig& cfg);

struct OracleReport {
    double value = 0.0;  // min over candidates of max_j beta_j
    double grid_step = 0.0;
    std::uint64_t candidates_evaluated = 0;
    std::uint64_t feasible_candidates = 0;
    std::vector<double> best_aux;             // gridded auxiliary pmf attaining it
    std::vector<double> best_betas;           // per message at the optimum
    std::string note;
};

// Exhaustive min-max search over matching-structured decoders and a gridded
// auxiliary distribution; restricted to n <= 3 symbols and m <= 2 messages.
// `grid` is the inverse step (step = 1/grid).
[[nodiscard]] OracleReport brute_force_minmax(const Pmf& p_x, double alpha, std::uint64_t m,
                                              std::uint64_t grid);

struct ExponentPoint {
    std::uint32_t length = 0;
    std::uint64_t trials = 0;
    std::uint64_t rejections = 0;
    double beta_hat = 0.0;
    WilsonInterval interval;
    bool censored = false;  // no rejections observed
};

struct ExponentReport {
    std::vector<ExponentPoint> points;
    double slope = 0.0;     // least squares fit of -ln beta_hat against T
    double slope_se = 0.0;  // fitted standard error
    double bound = 0.0;     // per-symbol exponent bound for hypothesis j
    double epsilon = 0.0;   // sibling-error level of the threshold decoder
    bool censored = false;  // fewer than two usable points
};

// Empirical error exponent for hypothesis j of an i.i.d. product family with
// the given per-symbol joints. The decoder rejects j in favor of i when the
// log-likelihood ratio sum clears a CLT-calibrated (1 - epsilon) quantile of
// its distribution under hypothesis i.
[[nodiscard]] ExponentReport empirical_exponent(const std::vector<Pmf>& joints, std::size_t j,
                                                const std::vector<std::uint32_t>& lengths,
                                                const SimConfig& cfg, double epsilon = 0.25);

} // namespace dembed
