#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fermispec {

/// Identifies one disorder realization: the stream is a pure function of both fields.
struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t realization_index = 0;

    friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

/// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed of the engine for a realization: splitmix64(master ^ splitmix64(index)).
constexpr std::uint64_t realization_seed(const SeedSpec& spec) noexcept {
    return splitmix64(spec.master_seed ^ splitmix64(spec.realization_index));
}

/**
 * Deterministic variate source for one realization.
 *
 * Built on std::mt19937_64, whose output sequence is fixed by the standard.
 * The standard library distributions are implementation-defined, so every
 * variate here is derived from raw engine output:
 *   uniform()  : ((x >> 11) + 0.5) · 2⁻⁵³, strictly inside (0, 1)
 *   gaussian() : Marsaglia polar method on pairs of uniforms, caching the spare
 *   bernoulli(p): uniform() < p
 */
class VariateStream {
public:
    explicit VariateStream(const SeedSpec& spec) : engine_(realization_seed(spec)) {}

    double uniform() noexcept {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double gaussian() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    bool bernoulli(double p) noexcept { return uniform() < p; }

    /// Uniform on {0, ..., count-1}.
    std::size_t index(std::size_t count) noexcept {
        return static_cast<std::size_t>(uniform() * static_cast<double>(count)) % count;
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

inline VariateStream stream(const SeedSpec& spec) { return VariateStream(spec); }

enum class EntryLaw { gaussian, uniform, rademacher };

inline std::string_view to_string(EntryLaw l) {
    switch (l) {
        case EntryLaw::gaussian: return "gaussian";
        case EntryLaw::uniform: return "uniform";
        case EntryLaw::rademacher: return "rademacher";
    }
    return "?";
}

inline EntryLaw parse_entry_law(std::string_view s) {
    if (s == "gaussian") return EntryLaw::gaussian;
    if (s == "uniform") return EntryLaw::uniform;
    if (s == "rademacher") return EntryLaw::rademacher;
    throw std::invalid_argument("unknown distribution '" + std::string(s) + "'");
}

/// A scalar law given by its shape, mean and standard deviation.
/// uniform has support [mean - σ√3, mean + σ√3]; rademacher is mean ± σ.
struct DistributionSpec {
    EntryLaw law = EntryLaw::gaussian;
    double mean = 0.0;
    double std_dev = 1.0;

    double sample(VariateStream& rng) const {
        switch (law) {
            case EntryLaw::gaussian: return mean + std_dev * rng.gaussian();
            case EntryLaw::uniform: return mean + std_dev * std::sqrt(3.0) * (2.0 * rng.uniform() - 1.0);
            case EntryLaw::rademacher: return mean + (rng.bernoulli(0.5) ? std_dev : -std_dev);
        }
        return mean;
    }

    bool is_centred() const noexcept { return mean == 0.0; }
    bool is_standardized() const noexcept { return mean == 0.0 && std_dev == 1.0; }
};

}  // namespace fermispec
