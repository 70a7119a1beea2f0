#include "dembed/typical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dembed {

namespace {

std::uint64_t checked_binomial(std::uint32_t n, std::uint32_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 result = 1;
    for (std::uint32_t i = 1; i <= k; ++i) {
        result = result * (n - k + i) / i;  // exact at every step
        if (result > std::numeric_limits<std::uint64_t>::max()) {
            throw std::overflow_error("typical index: multinomial exceeds 64 bits");
        }
    }
    return static_cast<std::uint64_t>(result);
}

std::uint64_t multinomial(std::uint32_t total, std::span<const std::uint32_t> parts) {
    unsigned __int128 result = 1;
    std::uint32_t remaining = total;
    for (std::uint32_t part : parts) {
        result *= checked_binomial(remaining, part);
        if (result > std::numeric_limits<std::uint64_t>::max()) {
            throw std::overflow_error("typical index: multinomial exceeds 64 bits");
        }
        remaining -= part;
    }
    return static_cast<std::uint64_t>(result);
}

}  // namespace

double TypicalIndex::default_eta(std::uint32_t length) {
    return std::pow(static_cast<double>(length), -0.25);
}

TypicalIndex::TypicalIndex(const Pmf& source, std::uint32_t length, double eta)
    : source_(source), length_(length), eta_(eta) {
    if (length_ == 0) throw std::invalid_argument("typical index: T must be positive");
    if (!(eta_ >= 0.0)) throw std::invalid_argument("typical index: eta must be >= 0");

    const std::size_t v = source_.size();
    const double h = entropy(source_);
    std::vector<double> log_p(v);
    for (std::size_t i = 0; i < v; ++i) {
        log_p[i] = source_[i] > 0.0 ? std::log(source_[i])
                                    : -std::numeric_limits<double>::infinity();
    }

    // Enumerate compositions of T into V parts in lexicographic order.
    std::vector<std::uint32_t> counts(v, 0);
    counts[v - 1] = length_;
    std::uint64_t enumerated = 0;
    constexpr std::uint64_t kClassCap = std::uint64_t{1} << 22;
    while (true) {
        if (++enumerated > kClassCap) {
            throw std::invalid_argument("typical index: too many type classes");
        }
        double log_prob = 0.0;
        for (std::size_t i = 0; i < v; ++i) {
            if (counts[i] > 0) log_prob += counts[i] * log_p[i];
        }
        const double rate = -log_prob / static_cast<double>(length_);
        if (std::isfinite(rate) && std::abs(rate - h) <= eta_) {
            TypeClass cls;
            cls.counts = counts;
            cls.size = multinomial(length_, counts);
            cls.log_prob_per_seq = log_prob;
            total_ += cls.size;
            mass_ += static_cast<double>(cls.size) * std::exp(log_prob);
            classes_.push_back(std::move(cls));
        }
        // next composition: move one unit left of the trailing block
        std::size_t i = v - 1;
        while (i > 0 && counts[i] == 0) --i;
        if (i == 0) break;
        const std::uint32_t tail = counts[i] - 1;
        counts[i] = 0;
        ++counts[i - 1];
        counts[v - 1] = tail;
    }
    mass_ = std::min(mass_, 1.0);
    // counts vectors are generated in increasing lex order already
}

const TypicalIndex::TypeClass* TypicalIndex::find_class(
    std::span<const std::uint32_t> counts) const {
    auto it = std::lower_bound(classes_.begin(), classes_.end(), counts,
                               [](const TypeClass& cls, std::span<const std::uint32_t> key) {
                                   return std::lexicographical_compare(
                                       cls.counts.begin(), cls.counts.end(), key.begin(), key.end());
                               });
    if (it == classes_.end() ||
        !std::equal(it->counts.begin(), it->counts.end(), counts.begin(), counts.end())) {
        return nullptr;
    }
    return &*it;
}

bool TypicalIndex::is_typical(std::span<const std::uint32_t> symbols) const {
    if (symbols.size() != length_) return false;
    std::vector<std::uint32_t> counts(source_.size(), 0);
    for (std::uint32_t s : symbols) {
        if (s >= source_.size()) return false;
        ++counts[s];
    }
    return find_class(counts) != nullptr;
}

std::uint64_t TypicalIndex::completions(std::span<const std::uint32_t> prefix_counts,
                                        std::uint32_t remaining) const {
    std::uint64_t count = 0;
    std::vector<std::uint32_t> diff(prefix_counts.size());
    for (const TypeClass& cls : classes_) {
        bool feasible = true;
        for (std::size_t i = 0; i < diff.size(); ++i) {
            if (cls.counts[i] < prefix_counts[i]) {
                feasible = false;
                break;
            }
            diff[i] = cls.counts[i] - prefix_counts[i];
        }
        if (feasible) count += multinomial(remaining, diff);
    }
    return count;
}

std::optional<std::uint64_t> TypicalIndex::rank(std::span<const std::uint32_t> symbols) const {
    if (!is_typical(symbols)) return std::nullopt;
    const std::size_t v = source_.size();
    std::vector<std::uint32_t> prefix(v, 0);
    std::uint64_t r = 0;
    for (std::uint32_t t = 0; t < length_; ++t) {
        const std::uint32_t remaining = length_ - t - 1;
        for (std::uint32_t s = 0; s < symbols[t]; ++s) {
            ++prefix[s];
            r += completions(prefix, remaining);
            --prefix[s];
        }
        ++prefix[symbols[t]];
    }
    return r;
}

void TypicalIndex::unrank(std::uint64_t rank, std::span<std::uint32_t> out) const {
    if (rank >= total_) throw std::invalid_argument("typical index: rank out of range");
    if (out.size() != length_) throw std::invalid_argument("typical index: wrong output length");
    const std::size_t v = source_.size();
    std::vector<std::uint32_t> prefix(v, 0);
    for (std::uint32_t t = 0; t < length_; ++t) {
        const std::uint32_t remaining = length_ - t - 1;
        bool placed = false;
        for (std::uint32_t s = 0; s < v; ++s) {
            ++prefix[s];
            const std::uint64_t below = completions(prefix, remaining);
            if (rank < below) {
                out[t] = s;
                placed = true;
                break;
            }
            rank -= below;
            --prefix[s];
        }
        if (!placed) throw std::logic_error("typical index: unrank walked off the set");
    }
}

std::vector<std::uint32_t> TypicalIndex::unrank(std::uint64_t rank) const {
    std::vector<std::uint32_t> out(length_);
    unrank(rank, out);
    return out;
}

TypicalSetScheme::TypicalSetScheme(const Pmf& source, std::uint32_t length,
                                   std::uint64_t messages, double alpha,
                                   std::optional<double> eta)
    : index_(source, length, eta.value_or(TypicalIndex::default_eta(length))),
      messages_(messages),
      alpha_(alpha) {
    if (messages_ == 0) throw std::invalid_argument("scheme: m must be positive");
    if (!(alpha_ > 0.0) || !(alpha_ < 1.0)) {
        throw std::invalid_argument("alpha must lie in (0, 1)");
    }
    if (messages_ > index_.total_size()) {
        throw std::invalid_argument("scheme: message count exceeds the typical set");
    }
    const double rate = (std::log(static_cast<double>(messages_)) - std::log(alpha_)) /
                        static_cast<double>(length);
    rate_ok_ = rate <= entropy(source);
}

TypicalSetScheme::Emission TypicalSetScheme::encode(std::uint64_t message,
                                                    RandomStream& rng) const {
    if (message == 0 || message > messages_) {
        throw std::invalid_argument("scheme: message out of range");
    }
    const std::uint32_t t_len = length();
    Emission emission;
    emission.seq.resize(t_len);
    for (auto& s : emission.seq) {
        s = static_cast<std::uint32_t>(sample_index(source(), rng));
    }
    const auto r = index_.rank(emission.seq);
    if (r) {
        const std::uint64_t target = (*r + message - 1) % index_.total_size();
        emission.aux = index_.unrank(target);
    } else {
        emission.aux.resize(t_len);
        for (auto& s : emission.aux) {
            s = static_cast<std::uint32_t>(sample_index(source(), rng));
        }
    }
    return emission;
}

std::uint64_t TypicalSetScheme::decode(std::span<const std::uint32_t> seq,
                                       std::span<const std::uint32_t> aux) const {
    const auto i = index_.rank(seq);
    if (!i) return 0;
    const auto k = index_.rank(aux);
    if (!k) return 0;
    const std::uint64_t n = index_.total_size();
    const std::uint64_t value = (*k + n - *i) % n + 1;
    return value <= messages_ ? value : 0;
}

} // namespace dembed
