#pragma once

#include <cstdint>
#include <vector>

#include "dembed/prob.hpp"

namespace dembed {

// Divergence used for the distortion ball. kl_forward means D(P || Q) with
// the watermarked marginal as the first argument.
enum class DistortionMetric { tv, kl_forward };

[[nodiscard]] const char* metric_name(DistortionMetric m);
[[nodiscard]] DistortionMetric metric_from_name(const std::string& name);
[[nodiscard]] double metric_distance(DistortionMetric m, const Pmf& p, const Pmf& q);

struct OptimizerReport {
    Pmf result;               // argmin / argmax
    double objective = 0.0;   // overhang or entropy, depending on the program
    double constraint = 0.0;  // achieved distance to q
    std::uint64_t iterations = 0;
    double kkt_residual = 0.0;  // meaningful on the KL paths only
    bool converged = true;
};

// Min-max error threshold value at clip level alpha/m for the given
// sequence-level distribution: overhang(p, alpha/m).
[[nodiscard]] double beta_star_of(const Pmf& p, double alpha, std::uint64_t m);

// Minimize overhang(P, alpha/m) subject to metric(P, q) <= d.
//
// TV path: exact greedy leveling. Donors above the clip level are reduced
// toward it in decreasing-excess order, receivers below are filled up to it
// in decreasing-deficit order, moving at most d of mass. The achieved value
// equals max(overhang(q, tau) - min(d, fill_capacity), 1 - V*tau, 0).
//
// KL path: Lagrangian bisection on the multiplier; for each multiplier the
// stationary point is a two-sided tilt of q solved by a monotone
// normalization search. Non-convergence is reported, never silently dropped.
[[nodiscard]] OptimizerReport minimize_overhang(const Pmf& q, double alpha, std::uint64_t m,
                                                double d, DistortionMetric metric);

// Maximize entropy subject to metric(P, q) <= d.
// KL path: bisection over the tilted family P_beta \propto q^beta,
// beta in [0, 1]; zeros of q are preserved by tilting. TV path: two-level
// water-filling toward uniform spending at most d.
[[nodiscard]] OptimizerReport maximize_entropy(const Pmf& q, double d, DistortionMetric metric);

// min over i != j of KL(joint_i || joint_j) across m+1 joint distributions
// over (x, zeta) cells; +infinity propagates. j may be any hypothesis index
// in [0..m].
[[nodiscard]] double exponent_bound(const std::vector<Pmf>& joints, std::size_t j);

} // namespace dembed
