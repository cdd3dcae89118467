#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "model.hpp"
#include "modes.hpp"
#include "spectrum.hpp"
#include "stats.hpp"

namespace fermispec {

struct EnsembleOptions {
    std::uint64_t seed = 0;
    unsigned threads = 1;
    /// Enumerate each realization's levels (histogram + moments). Off for large n.
    bool density = true;
    /// Histogram range for x = (E − K)/√n.
    double lo = -4.0;
    double hi = 4.0;
    std::size_t bins = 200;
    /// Keep every rescaled level so the pooled ECDF can be compared exactly.
    bool pool_levels = false;
    EnumerationLimits limits{};
};

struct ScalarSummary {
    double mean = 0.0;
    double stderr_ = 0.0;  // standard error of the mean across realizations
    std::vector<double> values;
};

struct EnsembleReport {
    std::string model;
    std::size_t n = 0;
    std::size_t realizations = 0;
    std::uint64_t seed = 0;

    std::map<std::string, ScalarSummary> scalars;

    // Present when options.density is set.
    std::optional<Histogram> histogram;  // counts summed over realizations
    std::vector<double> density_stderr;  // per bin, across realizations
    LevelMoments averaged_moments;       // moments of the ensemble-averaged level density
    double kurtosis = 0.0;
    double kurtosis_stderr = 0.0;        // jackknife over realizations
    std::vector<double> pooled_levels;   // sorted, when pool_levels

    double averaged_density(std::size_t bin) const {
        return histogram ? histogram->density(bin) : 0.0;
    }
};

class EnsembleError : public std::runtime_error {
public:
    EnsembleError(std::size_t index, const std::string& what)
        : std::runtime_error("realization " + std::to_string(index) + ": " + what), realization(index) {}
    std::size_t realization;
};

namespace detail {

struct RealizationResult {
    std::map<std::string, double> scalars;
    LevelMoments moments;
    std::optional<Histogram> histogram;
    std::vector<double> levels;
};

inline RealizationResult run_realization(const ModelParams& params, std::size_t n, const SeedSpec& seed,
                                         const EnsembleOptions& opts) {
    const CoefficientPair c = build_model(params, n, seed);
    const ExcitationSet e = decompose(c);
    const double s = std::holds_alternative<GaussianParams>(params) ? std::get<GaussianParams>(params).s : 1.0;
    const auto gs = ground_state_report(e, s);
    const auto diag = theorem1_diagnostics(e);

    RealizationResult r;
    r.scalars["sigma_sq_hat"] = e.sigma_sq_hat;
    r.scalars["op_norm_over_n4"] = diag.op_norm_over_n4;
    r.scalars["E1_over_n"] = gs.E1_over_n;
    r.scalars["gap_rescaled"] = gs.gap_rescaled;
    r.scalars["K"] = e.K;

    if (opts.density) {
        const LevelStream stream = enumerate_levels(e, LevelOrder::gray_code, opts.limits);
        const Rescale rescale{e.K, std::sqrt(static_cast<double>(n))};
        r.histogram = accumulate_histogram(stream, opts.lo, opts.hi, opts.bins, rescale);
        r.moments = level_moments(stream, rescale);
        if (opts.pool_levels) {
            r.levels = stream.materialize();
            for (double& v : r.levels) v = rescale(v);
        }
    }
    return r;
}

inline ScalarSummary summarize_scalar(std::vector<double> values) {
    ScalarSummary s;
    const auto r = static_cast<double>(values.size());
    for (double v : values) s.mean += v;
    s.mean /= r;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.stderr_ = std::sqrt(ss / (r - 1.0) / r);
    }
    s.values = std::move(values);
    return s;
}

inline LevelMoments average_moments(const std::vector<RealizationResult>& rs, std::optional<std::size_t> skip) {
    LevelMoments m;
    double count = 0.0;
    for (std::size_t i = 0; i < rs.size(); ++i) {
        if (skip && *skip == i) continue;
        m.m1 += rs[i].moments.m1;
        m.m2 += rs[i].moments.m2;
        m.m3 += rs[i].moments.m3;
        m.m4 += rs[i].moments.m4;
        m.count += rs[i].moments.count;
        count += 1.0;
    }
    m.m1 /= count;
    m.m2 /= count;
    m.m3 /= count;
    m.m4 /= count;
    return m;
}

}  // namespace detail

/**
 * Runs build → decompose → statistics for realizations 0..R−1 of a model, each on
 * its own stream SeedSpec{seed, r}, and averages. Results are reduced in
 * realization order, so the report does not depend on options.threads.
 */
inline EnsembleReport ensemble_average(const ModelParams& params, std::size_t n, std::size_t realizations,
                                       const EnsembleOptions& opts = {}) {
    if (realizations < 1) throw std::invalid_argument("ensemble needs at least one realization");

    std::vector<detail::RealizationResult> results(realizations);
    std::vector<std::exception_ptr> errors(realizations);
    auto work = [&](std::size_t r) {
        try {
            results[r] = detail::run_realization(params, n, SeedSpec{opts.seed, r}, opts);
        } catch (...) {
            errors[r] = std::current_exception();
        }
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(realizations)));
    if (workers == 1) {
        for (std::size_t r = 0; r < realizations; ++r) work(r);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t r = w; r < realizations; r += workers) work(r);
            });
        for (auto& t : pool) t.join();
    }
    for (std::size_t r = 0; r < realizations; ++r) {
        if (!errors[r]) continue;
        try {
            std::rethrow_exception(errors[r]);
        } catch (const std::exception& ex) {
            throw EnsembleError(r, ex.what());
        }
    }

    EnsembleReport rep;
    rep.model = model_name(params);
    rep.n = n;
    rep.realizations = realizations;
    rep.seed = opts.seed;

    for (const auto& [name, _] : results.front().scalars) {
        std::vector<double> vals;
        vals.reserve(realizations);
        for (const auto& r : results) vals.push_back(r.scalars.at(name));
        rep.scalars[name] = detail::summarize_scalar(std::move(vals));
    }

    if (opts.density) {
        Histogram pooled(opts.lo, opts.hi, opts.bins);
        for (const auto& r : results) pooled.merge(*r.histogram);
        rep.histogram = pooled;

        const auto R = static_cast<double>(realizations);
        rep.density_stderr.assign(opts.bins, 0.0);
        if (realizations > 1) {
            for (std::size_t b = 0; b < opts.bins; ++b) {
                const double mean = pooled.density(b);
                double ss = 0.0;
                for (const auto& r : results) ss += std::pow(r.histogram->density(b) - mean, 2);
                rep.density_stderr[b] = std::sqrt(ss / (R - 1.0) / R);
            }
        }

        rep.averaged_moments = detail::average_moments(results, std::nullopt);
        rep.kurtosis = rep.averaged_moments.kurtosis();
        if (realizations > 1) {
            std::vector<double> loo(realizations);
            double mean = 0.0;
            for (std::size_t i = 0; i < realizations; ++i) {
                loo[i] = detail::average_moments(results, i).kurtosis();
                mean += loo[i];
            }
            mean /= R;
            double ss = 0.0;
            for (double k : loo) ss += (k - mean) * (k - mean);
            rep.kurtosis_stderr = std::sqrt((R - 1.0) / R * ss);
        }

        if (opts.pool_levels) {
            std::size_t total = 0;
            for (const auto& r : results) total += r.levels.size();
            rep.pooled_levels.reserve(total);
            for (auto& r : results) {
                rep.pooled_levels.insert(rep.pooled_levels.end(), r.levels.begin(), r.levels.end());
                std::vector<double>().swap(r.levels);
            }
            std::sort(rep.pooled_levels.begin(), rep.pooled_levels.end());
        }
    }
    return rep;
}

}  // namespace fermispec
