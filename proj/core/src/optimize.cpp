#include "dembed/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace dembed {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Smallest multiplier the KL path will visit; below this exp(-1/lambda)
// underflows and the tilt degenerates into the pure clip limit.
constexpr double kLambdaFloor = 1.0 / 700.0;

Pmf renormalized(std::vector<double> v) {
    double sum = std::accumulate(v.begin(), v.end(), 0.0);
    for (double& x : v) x /= sum;
    return Pmf(std::move(v));
}

void check_alpha_m(double alpha, std::uint64_t m) {
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw std::invalid_argument("alpha must lie in (0, 1)");
    }
    if (m == 0) throw std::invalid_argument("message count m must be positive");
}

// Stationary point of overhang(p, tau) + lambda * KL(p || q) over the
// simplex: a two-sided tilt p_i = max(min(A q_i, tau), A k q_i) with
// k = exp(-1/lambda), normalized by a monotone search over A.
std::vector<double> tilted_clip(const std::vector<double>& q, double tau, double lambda,
                                std::uint64_t& iterations) {
    const double inv = 1.0 / lambda;
    const double k = inv > 700.0 ? 0.0 : std::exp(-inv);

    auto value = [&](double a, std::vector<double>& out) {
        double sum = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) {
            const double below = std::min(a * q[i], tau);
            const double p = std::max(below, a * k * q[i]);
            out[i] = p;
            sum += p;
        }
        return sum;
    };

    std::vector<double> p(q.size());
    double a_hi = 1.0;
    while (value(a_hi, p) < 1.0) {
        a_hi *= 2.0;
        ++iterations;
        if (a_hi > 1e300) break;  // only reachable when k == 0 and n*tau < 1
    }
    double a_lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a_lo + a_hi);
        if (value(mid, p) < 1.0) {
            a_lo = mid;
        } else {
            a_hi = mid;
        }
        ++iterations;
    }
    value(a_hi, p);
    double sum = std::accumulate(p.begin(), p.end(), 0.0);
    for (double& x : p) x /= sum;
    return p;
}

OptimizerReport minimize_overhang_tv(const Pmf& q, double tau, double d) {
    const std::size_t n = q.size();
    std::vector<double> p(q.begin(), q.end());

    std::vector<std::size_t> donors, receivers;
    double total_excess = 0.0, total_deficit = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (q[i] > tau) {
            donors.push_back(i);
            total_excess += q[i] - tau;
        } else if (q[i] < tau) {
            receivers.push_back(i);
            total_deficit += tau - q[i];
        }
    }
    // Decreasing excess / deficit; index order breaks ties so the reported
    // argmin is reproducible.
    std::sort(donors.begin(), donors.end(), [&](std::size_t a, std::size_t b) {
        if (q[a] != q[b]) return q[a] > q[b];
        return a < b;
    });
    std::sort(receivers.begin(), receivers.end(), [&](std::size_t a, std::size_t b) {
        if (q[a] != q[b]) return q[a] < q[b];
        return a < b;
    });

    const double budget = std::min({d, total_excess, total_deficit});
    double take = budget;
    for (std::size_t i : donors) {
        if (take <= 0.0) break;
        const double amount = std::min(take, q[i] - tau);
        p[i] -= amount;
        take -= amount;
    }
    double give = budget;
    for (std::size_t i : receivers) {
        if (give <= 0.0) break;
        const double amount = std::min(give, tau - q[i]);
        p[i] += amount;
        give -= amount;
    }

    OptimizerReport report{renormalized(std::move(p)), 0.0, 0.0, 0, 0.0, true};
    report.objective = overhang(report.result, tau);
    report.constraint = tv_distance(report.result, q);
    return report;
}

OptimizerReport minimize_overhang_kl(const Pmf& q, double tau, double d) {
    const std::vector<double> qv(q.begin(), q.end());
    std::uint64_t iterations = 0;

    auto solve = [&](double lambda) { return tilted_clip(qv, tau, lambda, iterations); };
    auto kl_of = [&](const std::vector<double>& p) { return kl_divergence(Pmf(p), q); };

    // Most aggressive reachable point: if even the near-pure clip stays inside
    // the ball, the constraint is inactive.
    std::vector<double> p_floor = solve(kLambdaFloor);
    if (kl_of(p_floor) <= d) {
        OptimizerReport report{Pmf(std::move(p_floor)), 0.0, 0.0, iterations, 0.0, true};
        report.objective = overhang(report.result, tau);
        report.constraint = kl_divergence(report.result, q);
        return report;
    }

    // Bracket lambda: kl(p(lambda)) decreases in lambda.
    double lambda_lo = kLambdaFloor;  // kl > d here
    double lambda_hi = std::max(1.0, 2.0 * kLambdaFloor);
    std::vector<double> p_hi = solve(lambda_hi);
    while (kl_of(p_hi) > d) {
        lambda_lo = lambda_hi;
        lambda_hi *= 4.0;
        p_hi = solve(lambda_hi);
        if (lambda_hi > 1e15) break;
    }

    std::vector<double> p_feasible = p_hi;  // kl <= d side
    constexpr std::uint64_t kMaxIterations = 100000;
    bool converged = false;
    double lambda_mid = lambda_hi;
    while (iterations < kMaxIterations) {
        lambda_mid = 0.5 * (lambda_lo + lambda_hi);
        std::vector<double> p_mid = solve(lambda_mid);
        const double kl = kl_of(p_mid);
        if (kl <= d) {
            lambda_hi = lambda_mid;
            p_feasible = std::move(p_mid);
        } else {
            lambda_lo = lambda_mid;
        }
        const double gap = lambda_mid * (d - kl_of(p_feasible));
        if (gap < 1e-8 && (lambda_hi - lambda_lo) < 1e-9 * lambda_hi) {
            converged = true;
            break;
        }
    }

    OptimizerReport report{Pmf(std::move(p_feasible)), 0.0, 0.0, iterations, 0.0, converged};
    report.objective = overhang(report.result, tau);
    report.constraint = kl_divergence(report.result, q);
    // Complementary slackness at the active constraint; primal feasibility is
    // exact because the feasible bisection endpoint is returned.
    report.kkt_residual = lambda_mid * std::abs(d - report.constraint);
    report.converged = converged && report.kkt_residual < 1e-8;
    return report;
}

// Water level h with sum (q_i - h)_+ = target, via monotone bisection.
double upper_level(const std::vector<double>& q, double target) {
    double lo = 0.0, hi = *std::max_element(q.begin(), q.end());
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        double clipped = 0.0;
        for (double v : q) clipped += std::max(v - mid, 0.0);
        if (clipped > target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Water level l with sum (l - q_i)_+ = target.
double lower_level(const std::vector<double>& q, double target) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        double filled = 0.0;
        for (double v : q) filled += std::max(mid - v, 0.0);
        if (filled < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

OptimizerReport maximize_entropy_tv(const Pmf& q, double d) {
    const std::vector<double> qv(q.begin(), q.end());
    const Pmf uniform = Pmf::uniform(q.size());
    const double to_uniform = tv_distance(q, uniform);

    if (d >= to_uniform) {
        return {uniform, entropy(uniform), to_uniform, 0, 0.0, true};
    }
    const double hi = upper_level(qv, d);
    const double lo = lower_level(qv, d);
    std::vector<double> p(qv.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::clamp(qv[i], lo, hi);

    OptimizerReport report{renormalized(std::move(p)), 0.0, 0.0, 400, 0.0, true};
    report.objective = entropy(report.result);
    report.constraint = tv_distance(report.result, q);
    return report;
}

OptimizerReport maximize_entropy_kl(const Pmf& q, double d) {
    std::vector<double> log_q(q.size());
    std::vector<double> support;
    for (std::size_t i = 0; i < q.size(); ++i) {
        log_q[i] = q[i] > 0.0 ? std::log(q[i]) : -kInf;
    }

    auto tilt = [&](double beta) {
        std::vector<double> w(q.size(), 0.0);
        double max_log = -kInf;
        for (std::size_t i = 0; i < q.size(); ++i) {
            if (q[i] > 0.0) max_log = std::max(max_log, beta * log_q[i]);
        }
        for (std::size_t i = 0; i < q.size(); ++i) {
            if (q[i] > 0.0) w[i] = std::exp(beta * log_q[i] - max_log);
        }
        return renormalized(std::move(w));
    };

    // beta = 0 is uniform on the support of q; zeros stay zero by tilting.
    const Pmf flattest = tilt(0.0);
    if (kl_divergence(flattest, q) <= d) {
        return {flattest, entropy(flattest), kl_divergence(flattest, q), 1, 0.0, true};
    }

    double beta_lo = 0.0;  // kl > d here
    double beta_hi = 1.0;  // kl = 0 <= d here
    Pmf p_feasible = tilt(1.0);
    std::uint64_t iterations = 1;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (beta_lo + beta_hi);
        Pmf candidate = tilt(mid);
        if (kl_divergence(candidate, q) <= d) {
            beta_hi = mid;
            p_feasible = std::move(candidate);
        } else {
            beta_lo = mid;
        }
        ++iterations;
    }

    OptimizerReport report{std::move(p_feasible), 0.0, 0.0, iterations, 0.0, true};
    report.objective = entropy(report.result);
    report.constraint = kl_divergence(report.result, q);
    report.kkt_residual = std::abs(d - report.constraint);
    report.converged = report.kkt_residual < 1e-8;
    return report;
}

}  // namespace

const char* metric_name(DistortionMetric m) {
    return m == DistortionMetric::tv ? "tv" : "kl";
}

DistortionMetric metric_from_name(const std::string& name) {
    if (name == "tv") return DistortionMetric::tv;
    if (name == "kl" || name == "kl_forward") return DistortionMetric::kl_forward;
    throw std::invalid_argument("unsupported distortion metric '" + name +
                                "' (expected tv or kl)");
}

double metric_distance(DistortionMetric m, const Pmf& p, const Pmf& q) {
    return m == DistortionMetric::tv ? tv_distance(p, q) : kl_divergence(p, q);
}

double beta_star_of(const Pmf& p, double alpha, std::uint64_t m) {
    check_alpha_m(alpha, m);
    return overhang(p, alpha / static_cast<double>(m));
}

OptimizerReport minimize_overhang(const Pmf& q, double alpha, std::uint64_t m, double d,
                                  DistortionMetric metric) {
    check_alpha_m(alpha, m);
    if (!(d >= 0.0)) throw std::invalid_argument("distortion budget d must be >= 0");
    const double tau = alpha / static_cast<double>(m);

    // Empty ball, or the clip level already dominates every mass.
    if (d == 0.0 || overhang(q, tau) == 0.0) {
        return {q, overhang(q, tau), 0.0, 0, 0.0, true};
    }
    return metric == DistortionMetric::tv ? minimize_overhang_tv(q, tau, d)
                                          : minimize_overhang_kl(q, tau, d);
}

OptimizerReport maximize_entropy(const Pmf& q, double d, DistortionMetric metric) {
    if (!(d >= 0.0)) throw std::invalid_argument("distortion budget d must be >= 0");
    if (d == 0.0) {
        return {q, entropy(q), 0.0, 0, 0.0, true};
    }
    return metric == DistortionMetric::tv ? maximize_entropy_tv(q, d)
                                          : maximize_entropy_kl(q, d);
}

double exponent_bound(const std::vector<Pmf>& joints, std::size_t j) {
    if (joints.size() < 2) {
        throw std::invalid_argument("exponent_bound: need at least two hypotheses");
    }
    if (j >= joints.size()) {
        throw std::invalid_argument("exponent_bound: hypothesis index out of range");
    }
    double best = kInf;
    for (std::size_t i = 0; i < joints.size(); ++i) {
        if (i == j) continue;
        best = std::min(best, kl_divergence(joints[i], joints[j]));
    }
    return best;
}

} // namespace dembed
