#include "dembed/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dembed {

namespace {

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t f = 2; f * f <= n; ++f) {
        if (n % f == 0) return false;
    }
    return true;
}

std::uint64_t mod_mul(std::uint64_t a, std::uint64_t b, std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % n);
}

std::uint64_t mod_inverse(std::uint64_t a, std::uint64_t n) {
    // extended Euclid; a and n are coprime by construction
    std::int64_t t = 0, new_t = 1;
    std::int64_t r = static_cast<std::int64_t>(n), new_r = static_cast<std::int64_t>(a % n);
    while (new_r != 0) {
        const std::int64_t quotient = r / new_r;
        t = std::exchange(new_t, t - quotient * new_t);
        r = std::exchange(new_r, r - quotient * new_r);
    }
    if (t < 0) t += static_cast<std::int64_t>(n);
    return static_cast<std::uint64_t>(t);
}

}  // namespace

const char* family_name(DecoderFamily f) {
    return f == DecoderFamily::cyclic ? "cyclic" : "modular_field";
}

DecoderFamily family_from_name(const std::string& name) {
    if (name == "cyclic") return DecoderFamily::cyclic;
    if (name == "modular_field" || name == "modular-field") return DecoderFamily::modular_field;
    throw std::invalid_argument("unknown decoder family '" + name + "'");
}

DecoderSpec::DecoderSpec(DecoderFamily family, std::uint64_t n, std::uint64_t m)
    : family_(family), n_(n), m_(m), redundant_(n) {
    if (n_ == 0) throw std::invalid_argument("decoder: n must be positive");
    if (m_ > n_) throw std::invalid_argument("decoder: message count exceeds n");
    if (family_ == DecoderFamily::modular_field) {
        if (!is_prime(n_)) {
            throw std::invalid_argument("modular_field decoder requires prime n, got " +
                                        std::to_string(n_));
        }
        scramble_ = n_ > 2 ? 2 : 1;
        scramble_inv_ = mod_inverse(scramble_, n_);
    }
}

std::uint64_t DecoderSpec::aux_rank(std::uint64_t zeta) const {
    if (zeta > n_ || zeta == redundant_) {
        throw std::invalid_argument("decoder: auxiliary index out of range");
    }
    return zeta > redundant_ ? zeta - 1 : zeta;
}

std::uint64_t DecoderSpec::aux_index(std::uint64_t rank) const {
    return rank >= redundant_ ? rank + 1 : rank;
}

std::uint64_t DecoderSpec::raw_value(std::uint64_t x, std::uint64_t zeta) const {
    if (x >= n_) throw std::invalid_argument("decoder: sequence index out of range");
    std::uint64_t v = (x + aux_rank(zeta)) % n_;
    if (family_ == DecoderFamily::modular_field) v = mod_mul(scramble_, v, n_);
    return v + 1;
}

std::uint64_t DecoderSpec::decode(std::uint64_t x, std::uint64_t zeta) const {
    if (x >= n_ || zeta > n_) throw std::invalid_argument("decoder: index out of range");
    if (zeta == redundant_) return 0;
    const std::uint64_t value = raw_value(x, zeta);
    return value <= m_ ? value : 0;
}

std::uint64_t DecoderSpec::matched_aux(std::uint64_t message, std::uint64_t x) const {
    if (message == 0 || message > m_) throw std::invalid_argument("decoder: bad message");
    if (x >= n_) throw std::invalid_argument("decoder: sequence index out of range");
    std::uint64_t v = message - 1;
    if (family_ == DecoderFamily::modular_field) v = mod_mul(scramble_inv_, v, n_);
    const std::uint64_t rank = (v + n_ - x % n_) % n_;
    return aux_index(rank);
}

std::optional<std::uint64_t> DecoderSpec::matched_seq(std::uint64_t message,
                                                      std::uint64_t zeta) const {
    if (message == 0 || message > m_) throw std::invalid_argument("decoder: bad message");
    if (zeta > n_) throw std::invalid_argument("decoder: auxiliary index out of range");
    if (zeta == redundant_) return std::nullopt;
    std::uint64_t v = message - 1;
    if (family_ == DecoderFamily::modular_field) v = mod_mul(scramble_inv_, v, n_);
    return (v + n_ - aux_rank(zeta)) % n_;
}

std::uint64_t DecoderSpec::aligned_seq(std::uint64_t rank) const {
    if (rank >= n_) throw std::invalid_argument("decoder: auxiliary rank out of range");
    return (n_ - rank) % n_;
}

std::vector<std::uint64_t> DecoderSpec::alignment() const {
    std::vector<std::uint64_t> map(n_);
    for (std::uint64_t k = 0; k < n_; ++k) map[k] = aligned_seq(k);
    return map;
}

bool is_latin_square(const DecoderSpec& spec) {
    const std::uint64_t n = spec.n();
    std::vector<bool> seen(n);
    for (std::uint64_t x = 0; x < n; ++x) {
        std::fill(seen.begin(), seen.end(), false);
        for (std::uint64_t zeta = 0; zeta <= n; ++zeta) {
            if (zeta == spec.redundant_index()) continue;
            const std::uint64_t v = spec.raw_value(x, zeta);
            if (v < 1 || v > n || seen[v - 1]) return false;
            seen[v - 1] = true;
        }
    }
    for (std::uint64_t zeta = 0; zeta <= n; ++zeta) {
        if (zeta == spec.redundant_index()) continue;
        std::fill(seen.begin(), seen.end(), false);
        for (std::uint64_t x = 0; x < n; ++x) {
            const std::uint64_t v = spec.raw_value(x, zeta);
            if (v < 1 || v > n || seen[v - 1]) return false;
            seen[v - 1] = true;
        }
    }
    return true;
}

Pmf build_aux_pmf(const Pmf& p_x, double alpha, std::uint64_t m,
                  std::span<const std::uint64_t> alignment) {
    if (!(alpha > 0.0) || !(alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    if (m == 0) throw std::invalid_argument("message count m must be positive");
    if (!alignment.empty() && alignment.size() != p_x.size()) {
        throw std::invalid_argument("alignment permutation has wrong size");
    }
    const double tau = alpha / static_cast<double>(m);
    const std::size_t n = p_x.size();
    std::vector<double> aux(n + 1, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t x = alignment.empty() ? k : static_cast<std::size_t>(alignment[k]);
        aux[k] = std::min(p_x[x], tau);
    }
    aux[n] = overhang(p_x, tau);
    return Pmf(std::move(aux));
}

CouplingTable build_coupling(std::uint64_t message, const Pmf& seq_pmf, const Pmf& aux_pmf,
                             const DecoderSpec& decoder) {
    const std::size_t n = seq_pmf.size();
    if (decoder.n() != n || aux_pmf.size() != n + 1) {
        throw std::invalid_argument("coupling: marginals inconsistent with decoder dimensions");
    }
    if (message == 0 || message > decoder.message_count()) {
        throw std::invalid_argument("coupling: message out of range");
    }

    std::vector<std::uint64_t> matched(n);
    std::vector<double> excess(n, 0.0);
    std::vector<double> deficit(n + 1, 0.0);
    double residual = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
        matched[x] = decoder.matched_aux(message, x);
        excess[x] = std::max(seq_pmf[x] - aux_pmf[matched[x]], 0.0);
        residual += excess[x];
    }
    for (std::size_t zeta = 0; zeta <= n; ++zeta) {
        const auto x = decoder.matched_seq(message, zeta);
        const double paired = x ? seq_pmf[*x] : 0.0;
        deficit[zeta] = std::max(aux_pmf[zeta] - paired, 0.0);
    }

    CouplingTable table;
    table.message = message;
    table.rows = n;
    table.cols = n + 1;
    table.cells.assign(n * (n + 1), 0.0);
    table.seq_marginal.assign(seq_pmf.begin(), seq_pmf.end());
    table.aux_marginal.assign(aux_pmf.begin(), aux_pmf.end());
    table.residual = residual;

    for (std::size_t x = 0; x < n; ++x) {
        double* row = table.cells.data() + x * table.cols;
        if (residual > 0.0 && excess[x] > 0.0) {
            const double scale = excess[x] / residual;
            for (std::size_t zeta = 0; zeta <= n; ++zeta) row[zeta] = scale * deficit[zeta];
        }
        row[matched[x]] = std::min(seq_pmf[x], aux_pmf[matched[x]]);
    }
    return table;
}

SchemeBundle build_finite_scheme(const SchemeParams& params, const Pmf& q, std::uint64_t limit) {
    const SequenceSpace space(params.alphabet_size, params.length);
    const std::uint64_t n = space.size();
    if (params.messages == 0) throw std::invalid_argument("scheme: m must be positive");
    if (params.messages > n) {
        throw std::invalid_argument("scheme: message set size m exceeds the sequence space");
    }
    if (n > limit || n * (n + 1) > limit) {
        throw std::invalid_argument("scheme: coupling tables exceed the materialization limit");
    }

    Pmf seq_q = [&] {
        if (q.size() == n) return q;
        if (q.size() == params.alphabet_size) return iid_extension(q, space, limit);
        throw std::invalid_argument("scheme: source pmf must have size V or V^T");
    }();

    OptimizerReport opt =
        minimize_overhang(seq_q, params.alpha, params.messages, params.distortion, params.metric);

    DecoderSpec decoder(params.family, n, params.messages);
    const auto alignment = decoder.alignment();
    Pmf aux = build_aux_pmf(opt.result, params.alpha, params.messages, alignment);

    std::vector<CouplingTable> couplings;
    couplings.reserve(params.messages);
    for (std::uint64_t j = 1; j <= params.messages; ++j) {
        couplings.push_back(build_coupling(j, opt.result, aux, decoder));
    }

    const double beta = beta_star_of(opt.result, params.alpha, params.messages);
    return SchemeBundle{params,    opt.result, std::move(aux), std::move(decoder),
                        std::move(couplings), beta,       std::move(opt)};
}

} // namespace dembed
