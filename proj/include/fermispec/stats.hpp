#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "modes.hpp"
#include "normal.hpp"
#include "spectrum.hpp"

namespace fermispec {

// ---------------------------------------------------------------------------
// Empirical CDFs and Kolmogorov distances

struct EcdfSummary {
    std::vector<double> sorted;
    double mean = 0.0;
    double variance = 0.0;

    std::size_t count() const noexcept { return sorted.size(); }
};

inline EcdfSummary summarize(std::vector<double> sample) {
    if (sample.empty()) throw std::invalid_argument("summarize: empty sample");
    std::sort(sample.begin(), sample.end());
    double mean = 0.0;
    for (double v : sample) mean += v;
    mean /= static_cast<double>(sample.size());
    double var = 0.0;
    for (double v : sample) var += (v - mean) * (v - mean);
    var /= static_cast<double>(sample.size());
    return {std::move(sample), mean, var};
}

/**
 * sup_x |F_N(x) − F(x)| for a sorted sample. Both one-sided limits of the
 * empirical CDF are compared at every distinct sample value, so ties are handled.
 * `transform` maps a sample value to the argument of `cdf`.
 */
template <class Cdf, class Transform>
double ks_statistic(std::span<const double> sorted, Cdf&& cdf, Transform&& transform) {
    if (sorted.empty()) throw std::invalid_argument("ks_statistic: empty sample");
    const auto n = static_cast<double>(sorted.size());
    double d = 0.0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        if (j < sorted.size() && sorted[j] < sorted[i])
            throw std::invalid_argument("ks_statistic: sample not sorted ascending");
        const double f = cdf(transform(sorted[i]));
        d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(static_cast<double>(j) / n - f)});
        i = j;
    }
    return d;
}

template <class Cdf>
double ks_statistic(std::span<const double> sorted, Cdf&& cdf) {
    return ks_statistic(sorted, std::forward<Cdf>(cdf), [](double x) { return x; });
}

struct KolmogorovResult {
    double distance = 0.0;
    /// Largest single-bin probability when computed from a histogram (0 for exact samples).
    /// The exact distance lies within this of `distance`.
    double bin_resolution = 0.0;
};

/// Distance between the ECDF of (E − shift)/scale and the N(0, sigma²) CDF.
inline KolmogorovResult kolmogorov_distance_to_gaussian(std::span<const double> sorted_levels, double shift,
                                                        double scale, double sigma) {
    if (!(sigma > 0.0) || !(scale > 0.0)) throw std::invalid_argument("kolmogorov distance needs sigma, scale > 0");
    const double d = ks_statistic(
        sorted_levels, [sigma](double x) { return normal_cdf(x / sigma); },
        [shift, scale](double e) { return (e - shift) / scale; });
    return {d, 0.0};
}

/// Same distance evaluated at the bin edges of an already-rescaled histogram.
inline KolmogorovResult kolmogorov_distance_to_gaussian(const Histogram& h, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("kolmogorov distance needs sigma > 0");
    if (h.total == 0) throw std::invalid_argument("kolmogorov distance: empty histogram");
    const auto total = static_cast<double>(h.total);
    std::uint64_t below = h.underflow;
    double d = std::abs(static_cast<double>(below) / total - normal_cdf(h.lo / sigma));
    std::uint64_t largest = std::max(h.underflow, h.overflow);
    for (std::size_t i = 0; i < h.bins(); ++i) {
        below += h.counts[i];
        largest = std::max(largest, h.counts[i]);
        d = std::max(d, std::abs(static_cast<double>(below) / total - normal_cdf(h.bin_right(i) / sigma)));
    }
    return {d, static_cast<double>(largest) / total};
}

// ---------------------------------------------------------------------------
// Unfolding

/// N·Φ((E − mu)/sigma_total) with the finite-n Gaussian density.
struct GaussianUnfolding {
    double mu = 0.0;
    double sigma_total = 1.0;
};
/// Least-squares fit of the level rank by a polynomial (Chebyshev basis) in E.
struct EmpiricalFitUnfolding {
    unsigned degree = 9;
};
using UnfoldMethod = std::variant<GaussianUnfolding, EmpiricalFitUnfolding>;

namespace detail {

/// Solves the symmetric positive definite system g·x = b in place (Cholesky).
inline std::vector<double> cholesky_solve(std::vector<long double> g, std::vector<long double> b, std::size_t m) {
    for (std::size_t j = 0; j < m; ++j) {
        long double d = g[j * m + j];
        for (std::size_t k = 0; k < j; ++k) d -= g[j * m + k] * g[j * m + k];
        if (!(d > 0)) throw std::runtime_error("unfold: singular least-squares system (degree too high for the sample)");
        d = std::sqrt(d);
        g[j * m + j] = d;
        for (std::size_t i = j + 1; i < m; ++i) {
            long double s = g[i * m + j];
            for (std::size_t k = 0; k < j; ++k) s -= g[i * m + k] * g[j * m + k];
            g[i * m + j] = s / d;
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t k = 0; k < i; ++k) b[i] -= g[i * m + k] * b[k];
        b[i] /= g[i * m + i];
    }
    for (std::size_t i = m; i-- > 0;) {
        for (std::size_t k = i + 1; k < m; ++k) b[i] -= g[k * m + i] * b[k];
        b[i] /= g[i * m + i];
    }
    return {b.begin(), b.end()};
}

inline void chebyshev_basis(double t, std::span<double> out) {
    out[0] = 1.0;
    if (out.size() > 1) out[1] = t;
    for (std::size_t k = 2; k < out.size(); ++k) out[k] = 2.0 * t * out[k - 1] - out[k - 2];
}

}  // namespace detail

/**
 * Maps sorted levels to a sequence whose mean spacing is 1: either through the
 * Gaussian CDF or through a fitted smooth rank function. Throws if the fitted
 * rank function decreases anywhere on the sample.
 */
inline std::vector<double> unfold(std::span<const double> sorted, const UnfoldMethod& method) {
    if (sorted.empty()) throw std::invalid_argument("unfold: no levels");
    if (!std::is_sorted(sorted.begin(), sorted.end())) throw std::invalid_argument("unfold: levels not sorted");
    const auto n = static_cast<double>(sorted.size());
    std::vector<double> out(sorted.size());

    if (const auto* g = std::get_if<GaussianUnfolding>(&method)) {
        if (!(g->sigma_total > 0.0)) throw std::invalid_argument("unfold: sigma_total must be > 0");
        for (std::size_t k = 0; k < sorted.size(); ++k) out[k] = n * normal_cdf((sorted[k] - g->mu) / g->sigma_total);
        return out;
    }

    const auto& fit = std::get<EmpiricalFitUnfolding>(method);
    const std::size_t m = fit.degree + 1;
    const double a = sorted.front(), b = sorted.back();
    if (!(b > a)) throw std::invalid_argument("unfold: fit needs at least two distinct levels");
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);

    std::vector<long double> gram(m * m, 0.0L), rhs(m, 0.0L);
    std::vector<double> phi(m);
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        detail::chebyshev_basis((sorted[k] - mid) / half, phi);
        const double rank = static_cast<double>(k) + 0.5;
        for (std::size_t i = 0; i < m; ++i) {
            rhs[i] += static_cast<long double>(phi[i]) * rank;
            for (std::size_t j = 0; j <= i; ++j) gram[i * m + j] += static_cast<long double>(phi[i]) * phi[j];
        }
    }
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) gram[i * m + j] = gram[j * m + i];
    const auto coef = detail::cholesky_solve(std::move(gram), std::move(rhs), m);

    for (std::size_t k = 0; k < sorted.size(); ++k) {
        detail::chebyshev_basis((sorted[k] - mid) / half, phi);
        double v = 0.0;
        for (std::size_t i = 0; i < m; ++i) v += coef[i] * phi[i];
        out[k] = v;
        if (k > 0 && out[k] < out[k - 1])
            throw std::runtime_error("unfold: fitted rank function of degree " + std::to_string(fit.degree) +
                                     " is not monotone; lower the degree");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Level spacings

/// Exp(1) CDF, the spacing law of a Poisson process.
inline double exponential_cdf(double x) noexcept { return x <= 0.0 ? 0.0 : -std::expm1(-x); }

/// Degeneracy threshold in unfolded units equivalent to 1e-12·σ_total in energy at the Gaussian peak density.
inline double default_degeneracy_tolerance(std::size_t level_count) noexcept {
    return 1e-12 * static_cast<double>(level_count) / std::sqrt(2.0 * std::numbers::pi);
}

struct SpacingOptions {
    double window = 0.8;               // central fraction of levels by rank
    double degeneracy_tol = 0.0;       // spacings below this count as degenerate
    bool retain_degenerate = false;    // include degenerate spacings in the KS comparison
    double histogram_max = 5.0;
    std::size_t histogram_bins = 50;
};

struct SpacingReport {
    Histogram histogram;                 // of renormalized spacings
    double ks_vs_exponential = 0.0;
    std::size_t sample_count = 0;        // spacings in the KS comparison
    std::size_t degenerate_count = 0;
    double degenerate_fraction = 0.0;    // degenerate / all spacings in the window
    double mean_spacing = 0.0;           // after renormalization (1 up to rounding)
};

/**
 * Consecutive differences of the central `window` fraction of unfolded levels,
 * renormalized to mean 1, compared with Exp(1).
 */
inline SpacingReport spacing_distribution(std::span<const double> unfolded, const SpacingOptions& opts = {}) {
    if (!(opts.window > 0.0 && opts.window <= 1.0)) throw std::invalid_argument("spacing window must lie in (0,1]");
    const std::size_t n = unfolded.size();
    const auto cut = static_cast<std::size_t>(std::floor(static_cast<double>(n) * (1.0 - opts.window) / 2.0));
    const std::size_t lo = cut, hi = n - cut;
    if (hi < lo + 2) throw std::invalid_argument("spacing window holds fewer than 2 levels");

    std::vector<double> spacings;
    spacings.reserve(hi - lo - 1);
    std::size_t degenerate = 0;
    for (std::size_t k = lo + 1; k < hi; ++k) {
        const double s = unfolded[k] - unfolded[k - 1];
        if (s < 0.0) throw std::invalid_argument("spacing_distribution: unfolded levels not sorted");
        if (s < opts.degeneracy_tol || s == 0.0) {
            ++degenerate;
            if (!opts.retain_degenerate) continue;
        }
        spacings.push_back(s);
    }
    if (spacings.empty()) throw std::invalid_argument("spacing window holds only degenerate spacings");

    double mean = 0.0;
    for (double s : spacings) mean += s;
    mean /= static_cast<double>(spacings.size());
    if (!(mean > 0.0)) throw std::invalid_argument("spacing_distribution: zero mean spacing");
    double check = 0.0;
    for (double& s : spacings) {
        s /= mean;
        check += s;
    }

    SpacingReport r;
    r.histogram = Histogram(0.0, opts.histogram_max, opts.histogram_bins);
    for (double s : spacings) r.histogram.add(s);
    std::sort(spacings.begin(), spacings.end());
    r.ks_vs_exponential = ks_statistic(spacings, exponential_cdf);
    r.sample_count = spacings.size();
    r.degenerate_count = degenerate;
    r.degenerate_fraction = static_cast<double>(degenerate) / static_cast<double>(hi - lo - 1);
    r.mean_spacing = check / static_cast<double>(spacings.size());
    return r;
}

// ---------------------------------------------------------------------------
// Ground state and gap

struct GroundStateReport {
    double E1 = 0.0;   // K − ½ Σ λ
    double gap = 0.0;  // min λ
    double E1_over_n = 0.0;
    double E1_cubic_scaling = 0.0;  // 3π E1 / (2n)^{3/2}
    double gap_rescaled = 0.0;      // n Δ / √(2 s²)
    double gap_sqrt_scaling = 0.0;  // √(n / 2s²) Δ
};

/// Exact ground energy and gap from the excitations. `s` is the coefficient scale used in the rescalings.
inline GroundStateReport ground_state_report(const ExcitationSet& e, double s = 1.0) {
    if (e.n < 1) throw std::invalid_argument("ground_state_report needs n >= 1");
    const double n = static_cast<double>(e.n);
    GroundStateReport r;
    r.E1 = ground_energy(e);
    r.gap = *std::min_element(e.lambdas.begin(), e.lambdas.end());
    r.E1_over_n = r.E1 / n;
    r.E1_cubic_scaling = 3.0 * std::numbers::pi * r.E1 / std::pow(2.0 * n, 1.5);
    r.gap_rescaled = n * r.gap / std::sqrt(2.0 * s * s);
    r.gap_sqrt_scaling = std::sqrt(n / (2.0 * s * s)) * r.gap;
    return r;
}

/// Limit law of the rescaled gap: density (1 + x) e^{−x²/2 − x} on x >= 0.
inline double gap_law_pdf(double x) noexcept { return x < 0.0 ? 0.0 : (1.0 + x) * std::exp(-0.5 * x * x - x); }
inline double gap_law_cdf(double x) noexcept { return x <= 0.0 ? 0.0 : -std::expm1(-0.5 * x * x - x); }

/// Quantile of the gap law by bisection on the CDF.
inline double gap_law_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("gap_law_quantile: p outside (0,1)");
    double lo = 0.0, hi = 1.0;
    while (gap_law_cdf(hi) < p) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (gap_law_cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// KS statistic of rescaled gaps against the gap law.
inline double gap_law_check(std::vector<double> gaps) {
    if (gaps.size() < 100) throw std::invalid_argument("gap_law_check needs at least 100 gaps");
    for (double g : gaps)
        if (g < 0.0) throw std::invalid_argument("gap_law_check: negative gap");
    std::sort(gaps.begin(), gaps.end());
    return ks_statistic(gaps, gap_law_cdf);
}

/// CDF of the quarter-circle density (1/π)√(4 − x²) on (0, 2).
inline double quarter_circle_cdf(double x) noexcept {
    if (x <= 0.0) return 0.0;
    if (x >= 2.0) return 1.0;
    return (0.5 * x * std::sqrt(4.0 - x * x) + 2.0 * std::asin(0.5 * x)) / std::numbers::pi;
}

/// KS statistic of λ/(√2 s) against the quarter-circle law.
inline double quarter_law_check(const ExcitationSet& e, double s) {
    if (e.n < 100) throw std::invalid_argument("quarter_law_check needs n >= 100");
    if (!(s > 0.0)) throw std::invalid_argument("quarter_law_check needs s > 0");
    std::vector<double> x(e.lambdas.rbegin(), e.lambdas.rend());
    const double scale = std::numbers::sqrt2 * s;
    for (double& v : x) v /= scale;
    return ks_statistic(x, quarter_circle_cdf);
}

}  // namespace fermispec
