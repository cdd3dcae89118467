#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "modes.hpp"
#include "spectrum.hpp"
#include "stats.hpp"

namespace fermispec {

/// Everything the statistics module says about one excitation set.
struct SpectralReport {
    std::string model;
    std::size_t n = 0;
    std::uint64_t level_count = 0;
    double K = 0.0;
    double total_sigma = 0.0;  // √(Σλ²/4)

    /// (E − K)/√(Σλ²/4) against N(0,1); the quantity the Berry-Esseen bound controls.
    KolmogorovResult ks_finite;
    /// (E − K)/√n against the model's limiting Gaussian, when known.
    std::optional<double> limit_variance;
    std::optional<KolmogorovResult> ks_limit;

    std::optional<double> be_bound;
    std::optional<double> be_moment_form;
    GroundStateReport ground;
    std::optional<SpacingReport> spacings;
};

struct ReportOptions {
    std::optional<double> limit_variance;
    /// Exact KS from the sorted spectrum (n <= limits.max_sorted_n); otherwise from a histogram.
    bool exact = true;
    std::size_t bins = 4096;
    unsigned threads = 1;
    double s = 1.0;
    std::optional<SpacingOptions> spacings;
    UnfoldMethod unfolding = GaussianUnfolding{};
    EnumerationLimits limits{};
};

inline SpectralReport spectral_report(const ExcitationSet& e, const ReportOptions& opts = {}) {
    SpectralReport r;
    r.model = e.provenance.model;
    r.n = e.n;
    r.K = e.K;
    r.total_sigma = e.total_sigma();
    r.limit_variance = opts.limit_variance;
    r.be_bound = berry_esseen_bound(e);
    r.be_moment_form = berry_esseen_moment_form(e);
    r.ground = ground_state_report(e, opts.s);

    const double sqrt_n = std::sqrt(static_cast<double>(e.n));
    const bool need_sorted = opts.exact || opts.spacings.has_value();
    const LevelStream stream =
        enumerate_levels(e, need_sorted ? LevelOrder::sorted : LevelOrder::gray_code, opts.limits);
    r.level_count = stream.size();

    if (!(r.total_sigma > 0.0)) {
        // Every level equals K: the distance to any continuous law is 1/2.
        r.ks_finite = {0.5, 0.0};
        if (opts.limit_variance && *opts.limit_variance > 0.0) r.ks_limit = KolmogorovResult{0.5, 0.0};
        return r;
    }

    if (need_sorted) {
        const std::vector<double> levels = stream.materialize();
        if (opts.exact) {
            r.ks_finite = kolmogorov_distance_to_gaussian(levels, e.K, r.total_sigma, 1.0);
            if (opts.limit_variance && *opts.limit_variance > 0.0)
                r.ks_limit = kolmogorov_distance_to_gaussian(levels, e.K, sqrt_n, std::sqrt(*opts.limit_variance));
        }
        if (opts.spacings) {
            UnfoldMethod method = opts.unfolding;
            if (auto* g = std::get_if<GaussianUnfolding>(&method)) *g = {e.K, r.total_sigma};
            const std::vector<double> unfolded = unfold(levels, method);
            SpacingOptions so = *opts.spacings;
            if (so.degeneracy_tol == 0.0) so.degeneracy_tol = default_degeneracy_tolerance(levels.size());
            r.spacings = spacing_distribution(unfolded, so);
        }
    }
    if (!opts.exact) {
        const Histogram h = accumulate_histogram(stream, -8.0, 8.0, opts.bins, {e.K, r.total_sigma}, opts.threads);
        r.ks_finite = kolmogorov_distance_to_gaussian(h, 1.0);
        if (opts.limit_variance && *opts.limit_variance > 0.0) {
            const double sd = std::sqrt(*opts.limit_variance);
            const Histogram hl = accumulate_histogram(stream, -8.0 * sd, 8.0 * sd, opts.bins, {e.K, sqrt_n}, opts.threads);
            r.ks_limit = kolmogorov_distance_to_gaussian(hl, sd);
        }
    }
    return r;
}

}  // namespace fermispec
