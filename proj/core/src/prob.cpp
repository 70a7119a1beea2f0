#include "dembed/prob.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace dembed {

Pmf::Pmf(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) {
        throw std::invalid_argument("pmf: empty support");
    }
    double sum = 0.0;
    for (double v : probs_) {
        if (!(v >= 0.0)) {  // also rejects NaN
            throw std::invalid_argument("pmf: negative or non-finite entry");
        }
        sum += v;
    }
    if (std::abs(sum - 1.0) >= kPmfSumTolerance) {
        throw std::invalid_argument("pmf: entries sum to " + std::to_string(sum) +
                                    ", outside the 1e-9 normalization window");
    }
    for (double& v : probs_) v /= sum;
}

Pmf Pmf::uniform(std::size_t n) {
    if (n == 0) throw std::invalid_argument("pmf: empty support");
    return Pmf(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Pmf Pmf::point_mass(std::size_t n, std::size_t at) {
    if (at >= n) throw std::invalid_argument("pmf: point mass outside support");
    std::vector<double> v(n, 0.0);
    v[at] = 1.0;
    return Pmf(std::move(v));
}

SequenceSpace::SequenceSpace(std::uint32_t alphabet_size, std::uint32_t length)
    : alphabet_(alphabet_size), length_(length) {
    if (alphabet_ == 0 || length_ == 0) {
        throw std::invalid_argument("sequence space: V and T must be positive");
    }
    std::uint64_t size = 1;
    for (std::uint32_t t = 0; t < length_; ++t) {
        if (size > std::numeric_limits<std::uint64_t>::max() / alphabet_) {
            throw std::invalid_argument("sequence space: V^T exceeds 64 bits");
        }
        size *= alphabet_;
    }
    size_ = size;
}

std::uint64_t SequenceSpace::to_index(std::span<const std::uint32_t> symbols) const {
    if (symbols.size() != length_) {
        throw std::invalid_argument("sequence space: wrong sequence length");
    }
    std::uint64_t index = 0;
    for (std::uint32_t s : symbols) {
        if (s >= alphabet_) throw std::invalid_argument("sequence space: symbol out of range");
        index = index * alphabet_ + s;
    }
    return index;
}

void SequenceSpace::from_index(std::uint64_t index, std::span<std::uint32_t> out) const {
    if (index >= size_) throw std::invalid_argument("sequence space: index out of range");
    if (out.size() != length_) throw std::invalid_argument("sequence space: wrong output length");
    for (std::uint32_t t = length_; t-- > 0;) {
        out[t] = static_cast<std::uint32_t>(index % alphabet_);
        index /= alphabet_;
    }
}

std::vector<std::uint32_t> SequenceSpace::symbols_of(std::uint64_t index) const {
    std::vector<std::uint32_t> out(length_);
    from_index(index, out);
    return out;
}

double entropy(const Pmf& p) {
    double h = 0.0;
    for (double v : p) {
        if (v > 0.0) h -= v * std::log(v);
    }
    return std::max(h, 0.0);
}

double kl_divergence(const Pmf& p, const Pmf& q) {
    if (p.size() != q.size()) {
        throw std::invalid_argument("kl_divergence: support size mismatch");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0) continue;
        if (q[i] == 0.0) return std::numeric_limits<double>::infinity();
        sum += p[i] * std::log(p[i] / q[i]);
    }
    return std::max(sum, 0.0);
}

double tv_distance(const Pmf& p, const Pmf& q) {
    if (p.size() != q.size()) {
        throw std::invalid_argument("tv_distance: support size mismatch");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double diff = p[i] - q[i];
        if (diff > 0.0) sum += diff;
    }
    return sum;
}

double overhang(const Pmf& p, double tau) {
    if (!(tau >= 0.0)) throw std::invalid_argument("overhang: tau must be >= 0");
    double sum = 0.0;
    for (double v : p) {
        const double diff = v - tau;
        if (diff > 0.0) sum += diff;
    }
    return sum;
}

Pmf iid_extension(const Pmf& p, const SequenceSpace& space, std::uint64_t limit) {
    if (p.size() != space.alphabet_size()) {
        throw std::invalid_argument("iid_extension: pmf support does not match alphabet");
    }
    if (space.size() > limit) {
        throw std::invalid_argument("iid_extension: table of " + std::to_string(space.size()) +
                                    " entries exceeds materialization limit " + std::to_string(limit));
    }
    // Build one symbol position at a time; index order stays lexicographic.
    std::vector<double> table = {1.0};
    table.reserve(space.size());
    for (std::uint32_t t = 0; t < space.length(); ++t) {
        std::vector<double> next(table.size() * p.size());
        std::size_t k = 0;
        for (double prefix : table) {
            for (double v : p) next[k++] = prefix * v;
        }
        table = std::move(next);
    }
    return Pmf(std::move(table));
}

IidLogProb::IidLogProb(const Pmf& p, SequenceSpace space) : space_(space) {
    if (p.size() != space.alphabet_size()) {
        throw std::invalid_argument("iid log-prob: pmf support does not match alphabet");
    }
    log_probs_.reserve(p.size());
    for (double v : p) {
        log_probs_.push_back(v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity());
    }
}

double IidLogProb::log_prob_index(std::uint64_t index) const {
    if (index >= space_.size()) throw std::invalid_argument("iid log-prob: index out of range");
    double sum = 0.0;
    const std::uint32_t v = space_.alphabet_size();
    for (std::uint32_t t = 0; t < space_.length(); ++t) {
        sum += log_probs_[index % v];
        index /= v;
    }
    return sum;
}

double IidLogProb::log_prob_symbols(std::span<const std::uint32_t> symbols) const {
    double sum = 0.0;
    for (std::uint32_t s : symbols) {
        if (s >= log_probs_.size()) throw std::invalid_argument("iid log-prob: symbol out of range");
        sum += log_probs_[s];
    }
    return sum;
}

std::size_t sample_index(const Pmf& p, RandomStream& rng) {
    const double u = rng.next_double();
    double cum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        cum += p[i];
        if (u < cum) return i;
    }
    return p.size() - 1;  // guards against rounding in the final bucket
}

CdfSampler::CdfSampler(std::span<const double> weights) {
    if (weights.empty()) throw std::invalid_argument("cdf sampler: empty weights");
    cumulative_.reserve(weights.size());
    double cum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw std::invalid_argument("cdf sampler: negative weight");
        cum += w;
        cumulative_.push_back(cum);
    }
    if (cum <= 0.0) throw std::invalid_argument("cdf sampler: zero total weight");
}

std::size_t CdfSampler::sample(RandomStream& rng) const {
    const double target = rng.next_double() * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
    if (it == cumulative_.end()) return cumulative_.size() - 1;
    return static_cast<std::size_t>(it - cumulative_.begin());
}

} // namespace dembed
