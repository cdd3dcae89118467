#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <exception>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "errors.hpp"
#include "model.hpp"
#include "modes.hpp"

namespace fermispec {

/// E_1 = K − ½ Σ λ_k, summed in index order. Every other level is this plus a sum of λ's.
inline double ground_energy(const ExcitationSet& e) noexcept {
    double sum = 0.0;
    for (double l : e.lambdas) sum += l;
    return e.K - 0.5 * sum;
}

inline std::uint64_t binomial(unsigned n, unsigned m) noexcept {
    if (m > n) return 0;
    m = std::min(m, n - m);
    std::uint64_t r = 1;
    for (unsigned i = 1; i <= m; ++i) r = r * (n - m + i) / i;
    return r;
}

enum class LevelOrder { gray_code, sorted };

struct EnumerationLimits {
    unsigned max_stream_n = 30;  // streaming over all 2^n levels
    unsigned max_sorted_n = 26;  // materializing 2^n doubles (512 MiB at 26)
    bool override_guard = false;
};

namespace detail {

/**
 * Level of subset S (bit k ↔ λ_k) as T_low[S & low_mask] + T_high[S >> low_bits].
 * T_low[s] is the ground energy plus the λ's of s added in ascending index
 * order; T_high likewise from zero. The value of a level therefore depends only
 * on its subset, never on the path or partition used to reach it.
 */
class LevelTable {
public:
    static constexpr unsigned max_low_bits = 16;

    explicit LevelTable(const ExcitationSet& e)
        : n_(static_cast<unsigned>(e.n)), low_bits_(std::min(n_, max_low_bits)), lambdas_(e.lambdas) {
        low_.assign(std::size_t{1} << low_bits_, 0.0);
        low_[0] = ground_energy(e);
        fill(low_, 0, low_bits_);
        high_.assign(std::size_t{1} << (n_ - low_bits_), 0.0);
        fill(high_, low_bits_, n_ - low_bits_);
    }

    unsigned n() const noexcept { return n_; }
    unsigned low_bits() const noexcept { return low_bits_; }
    std::uint64_t low_mask() const noexcept { return (std::uint64_t{1} << low_bits_) - 1; }
    const std::vector<double>& lambdas() const noexcept { return lambdas_; }

    double level(std::uint64_t subset) const noexcept {
        return low_[subset & low_mask()] + high_[subset >> low_bits_];
    }
    double low(std::uint64_t s) const noexcept { return low_[s]; }
    double high(std::uint64_t s) const noexcept { return high_[s]; }
    std::size_t high_size() const noexcept { return high_.size(); }

private:
    void fill(std::vector<double>& t, unsigned first, unsigned count) {
        for (unsigned k = 0; k < count; ++k) {
            const std::size_t half = std::size_t{1} << k;
            const double l = lambdas_[first + k];
            for (std::size_t s = 0; s < half; ++s) t[s | half] = t[s] + l;
        }
    }

    unsigned n_;
    unsigned low_bits_;
    std::vector<double> lambdas_;
    std::vector<double> low_, high_;
};

/// m-subsets of {0..n−1} (as masks over `prefix`) in revolving-door order:
/// consecutive subsets differ by exchanging one element.
template <class F>
void revolving_door(unsigned n, unsigned m, std::uint64_t prefix, bool reversed, F& visit) {
    if (m == 0) {
        visit(prefix);
        return;
    }
    if (m == n) {
        visit(prefix | ((std::uint64_t{1} << n) - 1));
        return;
    }
    const std::uint64_t top = std::uint64_t{1} << (n - 1);
    if (!reversed) {
        revolving_door(n - 1, m, prefix, false, visit);
        revolving_door(n - 1, m - 1, prefix | top, true, visit);
    } else {
        revolving_door(n - 1, m - 1, prefix | top, false, visit);
        revolving_door(n - 1, m, prefix, true, visit);
    }
}

inline std::string guard_message(unsigned n, unsigned limit, const char* what) {
    return std::string(what) + " for n = " + std::to_string(n) + " exceeds the limit n <= " + std::to_string(limit) +
           "; pass --override-guard to proceed anyway";
}

}  // namespace detail

/**
 * The many-body levels E_S = K + ½(Σ_{k∈S} λ_k − Σ_{k∉S} λ_k) over all subsets S,
 * or over the subsets of one cardinality m (the m-particle sector).
 *
 * Gray-code streams are split into chunks of 2^16 consecutive Gray indices so
 * that workers can take disjoint chunks; each level is computed from the
 * shared table with one addition.
 */
class LevelStream {
public:
    LevelStream(const ExcitationSet& e, LevelOrder order, std::optional<unsigned> sector)
        : table_(std::make_shared<const detail::LevelTable>(e)), order_(order), sector_(sector) {}

    unsigned n() const noexcept { return table_->n(); }
    LevelOrder order() const noexcept { return order_; }
    std::optional<unsigned> sector() const noexcept { return sector_; }

    std::uint64_t size() const noexcept {
        return sector_ ? binomial(n(), *sector_) : (std::uint64_t{1} << n());
    }

    /// Level of an explicit subset mask.
    double level(std::uint64_t subset) const noexcept { return table_->level(subset); }
    double min_level() const noexcept { return table_->level(0); }
    double max_level() const noexcept {
        return table_->level(n() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n()) - 1);
    }

    /// Number of independently enumerable chunks (1 for sector streams).
    std::uint64_t chunk_count() const noexcept {
        if (sector_) return 1;
        return std::uint64_t{1} << (n() - table_->low_bits());
    }

    /// Visits (subset, level) for every subset in chunk `c`, in stream order.
    template <class F>
    void for_each_in_chunk(std::uint64_t c, F&& visit) const {
        if (sector_) {
            auto fn = [&](std::uint64_t s) { visit(s, table_->level(s)); };
            detail::revolving_door(n(), *sector_, 0, false, fn);
            return;
        }
        const std::uint64_t len = std::uint64_t{1} << table_->low_bits();
        const std::uint64_t begin = c * len;
        // Within a chunk the high bits of gray(i) = i ^ (i >> 1) are constant.
        const std::uint64_t mask = table_->low_mask();
        const std::uint64_t high = (begin ^ (begin >> 1)) >> table_->low_bits();
        const double base = table_->high(high);
        for (std::uint64_t i = begin; i < begin + len; ++i) {
            const std::uint64_t g = i ^ (i >> 1);
            visit(g, table_->low(g & mask) + base);
        }
    }

    /// Visits (subset, level) for the whole stream. Sorted streams materialize first (subset reported as 0).
    template <class F>
    void for_each(F&& visit) const {
        if (order_ == LevelOrder::sorted) {
            for (double v : materialize()) visit(std::uint64_t{0}, v);
            return;
        }
        for (std::uint64_t c = 0; c < chunk_count(); ++c) for_each_in_chunk(c, visit);
    }

    /// All levels in stream order, or ascending for sorted streams.
    std::vector<double> materialize() const {
        std::vector<double> out;
        out.reserve(size());
        if (sector_ || order_ == LevelOrder::gray_code) {
            for (std::uint64_t c = 0; c < chunk_count(); ++c)
                for_each_in_chunk(c, [&](std::uint64_t, double v) { out.push_back(v); });
        } else {
            const std::size_t low_n = std::size_t{1} << table_->low_bits();
            for (std::size_t h = 0; h < table_->high_size(); ++h) {
                const double base = table_->high(h);
                for (std::size_t l = 0; l < low_n; ++l) out.push_back(table_->low(l) + base);
            }
        }
        if (order_ == LevelOrder::sorted) std::sort(out.begin(), out.end());
        return out;
    }

private:
    std::shared_ptr<const detail::LevelTable> table_;
    LevelOrder order_;
    std::optional<unsigned> sector_;
};

inline LevelStream enumerate_levels(const ExcitationSet& e, LevelOrder order = LevelOrder::gray_code,
                                    const EnumerationLimits& limits = {}) {
    const auto n = static_cast<unsigned>(e.n);
    if (n > 63) throw ResourceGuardError("n = " + std::to_string(n) + " exceeds the 63-mode subset mask");
    if (!limits.override_guard) {
        if (n > limits.max_stream_n)
            throw ResourceGuardError(detail::guard_message(n, limits.max_stream_n, "full enumeration"));
        if (order == LevelOrder::sorted && n > limits.max_sorted_n)
            throw ResourceGuardError(detail::guard_message(n, limits.max_sorted_n, "sorted level output"));
    }
    return LevelStream(e, order, std::nullopt);
}

/// The binomial(n, m) levels with exactly m excited modes, in revolving-door order.
inline LevelStream sector_levels(const ExcitationSet& e, unsigned m, const EnumerationLimits& limits = {}) {
    const auto n = static_cast<unsigned>(e.n);
    if (m > n) throw std::out_of_range("sector m = " + std::to_string(m) + " outside 0.." + std::to_string(n));
    if (!limits.override_guard && n > limits.max_stream_n && binomial(n, m) > (std::uint64_t{1} << limits.max_stream_n))
        throw ResourceGuardError(detail::guard_message(n, limits.max_stream_n, "sector enumeration"));
    if (n > 40) throw ResourceGuardError("sector enumeration builds level tables of 2^(n-16) entries; n <= 40 only");
    return LevelStream(e, LevelOrder::gray_code, m);
}

// ---------------------------------------------------------------------------
// Histogram

/// Affine map x = (E − shift) / scale applied before binning.
struct Rescale {
    double shift = 0.0;
    double scale = 1.0;
    double operator()(double e) const noexcept { return (e - shift) / scale; }
};

/// Fixed-bin counter over [lo, hi); values outside go to underflow/overflow.
struct Histogram {
    double lo = 0.0;
    double hi = 1.0;
    std::vector<std::uint64_t> counts;
    std::uint64_t underflow = 0;
    std::uint64_t overflow = 0;
    std::uint64_t total = 0;

    Histogram() = default;
    Histogram(double lo_, double hi_, std::size_t bins) : lo(lo_), hi(hi_), counts(bins, 0) {
        if (bins == 0) throw std::invalid_argument("histogram needs at least one bin");
        if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi))
            throw std::invalid_argument("histogram range needs finite hi > lo");
    }

    std::size_t bins() const noexcept { return counts.size(); }
    double bin_width() const noexcept { return (hi - lo) / static_cast<double>(counts.size()); }
    double bin_left(std::size_t i) const noexcept { return lo + bin_width() * static_cast<double>(i); }
    double bin_right(std::size_t i) const noexcept {
        return i + 1 == counts.size() ? hi : lo + bin_width() * static_cast<double>(i + 1);
    }
    /// count / (total · width)
    double density(std::size_t i) const noexcept {
        return total == 0 ? 0.0 : static_cast<double>(counts[i]) / (static_cast<double>(total) * bin_width());
    }

    void add(double x) noexcept {
        ++total;
        if (!(x >= lo)) {
            ++underflow;
            return;
        }
        if (x >= hi) {
            ++overflow;
            return;
        }
        auto idx = static_cast<std::size_t>((x - lo) / (hi - lo) * static_cast<double>(counts.size()));
        if (idx >= counts.size()) idx = counts.size() - 1;
        ++counts[idx];
    }

    void merge(const Histogram& o) {
        if (o.lo != lo || o.hi != hi || o.counts.size() != counts.size())
            throw std::invalid_argument("histogram merge: geometry differs");
        for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += o.counts[i];
        underflow += o.underflow;
        overflow += o.overflow;
        total += o.total;
    }

    friend bool operator==(const Histogram&, const Histogram&) = default;
};

namespace detail {

/// Runs `work(chunk, state)` over all chunks with `threads` workers, chunk c going to worker c % threads.
template <class State, class Work>
std::vector<State> run_chunks(const LevelStream& s, unsigned threads, const State& init, Work work) {
    const std::uint64_t chunks = s.chunk_count();
    const unsigned workers = static_cast<unsigned>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(threads, chunks)));
    std::vector<State> states(workers, init);
    if (workers == 1) {
        for (std::uint64_t c = 0; c < chunks; ++c) work(c, states[0]);
        return states;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::uint64_t c = w; c < chunks; c += workers) work(c, states[w]);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return states;
}

}  // namespace detail

/// Bins every level of the stream after rescaling. Worker histograms are merged by integer addition,
/// so the result does not depend on `threads`.
inline Histogram accumulate_histogram(const LevelStream& s, double lo, double hi, std::size_t bins,
                                      const Rescale& rescale = {}, unsigned threads = 1) {
    if (!(rescale.scale > 0.0)) throw std::invalid_argument("rescale scale must be > 0");
    const Histogram empty(lo, hi, bins);
    if (s.order() == LevelOrder::sorted) {
        Histogram h = empty;
        s.for_each([&](std::uint64_t, double e) { h.add(rescale(e)); });
        return h;
    }
    auto parts = detail::run_chunks(s, threads, empty, [&](std::uint64_t c, Histogram& h) {
        s.for_each_in_chunk(c, [&](std::uint64_t, double e) { h.add(rescale(e)); });
    });
    Histogram h = empty;
    for (const auto& p : parts) h.merge(p);
    return h;
}

/// Raw moments of the rescaled levels x = (E − shift)/scale.
struct LevelMoments {
    std::uint64_t count = 0;
    double m1 = 0.0, m2 = 0.0, m3 = 0.0, m4 = 0.0;

    double variance() const noexcept { return m2 - m1 * m1; }
    /// Fourth standardized central moment (3 for a Gaussian).
    double kurtosis() const noexcept {
        const double var = variance();
        const double c4 = m4 - 4.0 * m3 * m1 + 6.0 * m2 * m1 * m1 - 3.0 * m1 * m1 * m1 * m1;
        return c4 / (var * var);
    }
};

/// Per-chunk partial sums are folded in chunk order, so the result is identical for any thread count.
inline LevelMoments level_moments(const LevelStream& s, const Rescale& rescale = {}, unsigned threads = 1) {
    struct Sums {
        double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
    };
    std::vector<Sums> per_chunk(s.chunk_count());
    detail::run_chunks(s, threads, 0, [&](std::uint64_t c, int&) {
        Sums acc;
        s.for_each_in_chunk(c, [&](std::uint64_t, double e) {
            const double x = rescale(e);
            const double x2 = x * x;
            acc.s1 += x;
            acc.s2 += x2;
            acc.s3 += x2 * x;
            acc.s4 += x2 * x2;
        });
        per_chunk[c] = acc;
    });
    Sums total;
    for (const auto& p : per_chunk) {
        total.s1 += p.s1;
        total.s2 += p.s2;
        total.s3 += p.s3;
        total.s4 += p.s4;
    }
    LevelMoments m;
    m.count = s.size();
    const double inv = 1.0 / static_cast<double>(m.count);
    m.m1 = total.s1 * inv;
    m.m2 = total.s2 * inv;
    m.m3 = total.s3 * inv;
    m.m4 = total.s4 * inv;
    return m;
}

/// e^{itK} Π_k cos(tλ_k/2): the Fourier transform of the normalized level counting measure.
inline std::complex<double> characteristic_function(const ExcitationSet& e, double t) {
    if (!std::isfinite(t)) throw std::invalid_argument("characteristic_function: t must be finite");
    double prod = 1.0;
    for (double l : e.lambdas) prod *= std::cos(0.5 * t * l);
    return std::polar(1.0, t * e.K) * prod;
}

struct TraceMoments {
    double mean;      // (1/2^n) Tr H     = ½ Σ A_ii
    double variance;  // (1/2^n) Tr H² − mean² = ¼ Σ (A_ij² + B_ij²)
};

inline TraceMoments trace_moments(const CoefficientPair& c) {
    if (const auto r = validate(c); !r.ok()) throw std::invalid_argument("trace_moments: " + r.message());
    return {0.5 * c.A.trace(), 0.25 * (c.A.frobenius_sq() + c.B.frobenius_sq())};
}

}  // namespace fermispec
