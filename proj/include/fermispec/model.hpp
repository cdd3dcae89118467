#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <cstddef>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "dense_matrix.hpp"
#include "disorder.hpp"
#include "lattice.hpp"

namespace fermispec {

/// Where a coefficient pair came from: builder name, scalar parameters, and the seed for random builders.
struct Provenance {
    std::string model;
    std::map<std::string, double> params;
    std::optional<SeedSpec> seed;
};

/**
 * Coefficients of H = Σ A_ij c_i†c_j + ½ B_ij (c_i c_j − c_i†c_j†).
 * A is symmetric and B antisymmetric; builders construct them that way
 * entry by entry and never symmetrize after the fact.
 */
struct CoefficientPair {
    std::size_t n = 0;
    DenseMatrix A;
    DenseMatrix B;
    Provenance provenance;

    explicit CoefficientPair(std::size_t size = 0) : n(size), A(size), B(size) {}
    CoefficientPair(DenseMatrix a, DenseMatrix b, Provenance p = {})
        : n(a.size()), A(std::move(a)), B(std::move(b)), provenance(std::move(p)) {
        if (A.size() != B.size()) throw std::invalid_argument("CoefficientPair: A and B differ in size");
    }

    /// Sets A_ij = A_ji = v.
    void set_symmetric(std::size_t i, std::size_t j, double v) noexcept {
        A(i, j) = v;
        A(j, i) = v;
    }
    /// Sets B_ij = v, B_ji = −v (i ≠ j).
    void set_antisymmetric(std::size_t i, std::size_t j, double v) noexcept {
        B(i, j) = v;
        B(j, i) = -v;
    }
};

// ---------------------------------------------------------------------------
// Validation

enum class ViolationKind { non_finite, asymmetric_A, non_antisymmetric_B, size_mismatch };

struct Violation {
    ViolationKind kind;
    std::size_t i = 0;
    std::size_t j = 0;
};

struct ValidationReport {
    std::optional<Violation> violation;
    bool ok() const noexcept { return !violation.has_value(); }
    std::string message() const;
};

inline std::string ValidationReport::message() const {
    if (!violation) return "ok";
    const auto& v = *violation;
    const std::string at = " at (" + std::to_string(v.i) + "," + std::to_string(v.j) + ")";
    switch (v.kind) {
        case ViolationKind::non_finite: return "non-finite coefficient" + at;
        case ViolationKind::asymmetric_A: return "A not symmetric" + at;
        case ViolationKind::non_antisymmetric_B: return "B not antisymmetric" + at;
        case ViolationKind::size_mismatch: return "A and B sizes differ";
    }
    return "invalid";
}

/// Scans pairs (i, j), i <= j, row-major and reports the first violation. Comparisons are exact.
inline ValidationReport validate(const CoefficientPair& c) {
    if (c.A.size() != c.n || c.B.size() != c.n) return {Violation{ViolationKind::size_mismatch}};
    for (std::size_t i = 0; i < c.n; ++i) {
        for (std::size_t j = i; j < c.n; ++j) {
            const double aij = c.A(i, j), aji = c.A(j, i), bij = c.B(i, j), bji = c.B(j, i);
            if (!std::isfinite(aij) || !std::isfinite(aji) || !std::isfinite(bij) || !std::isfinite(bji))
                return {Violation{ViolationKind::non_finite, i, j}};
            if (aij != aji) return {Violation{ViolationKind::asymmetric_A, i, j}};
            if (bij != -bji) return {Violation{ViolationKind::non_antisymmetric_B, i, j}};
        }
    }
    return {};
}

// ---------------------------------------------------------------------------
// Model parameters

enum class IsingMode { closed_form, free_array };

struct XYParams {
    double gamma = 0.0;
};
struct IsingParams {
    double h = 1.0;
    IsingMode mode = IsingMode::closed_form;
};
struct PercolationParams {
    Lattice lattice;
    double p = 0.5;
};
struct AndersonParams {
    Lattice lattice;
    double t = 1.0;
    DistributionSpec potential{EntryLaw::uniform, 0.0, 1.0};
};
struct GaussianParams {
    double s = 1.0;
};
struct BandParams {
    std::size_t bandwidth = 1;
    DistributionSpec entries{EntryLaw::gaussian, 0.0, 1.0};
};
/// ξ·identity. With a non-empty support, ξ is drawn uniformly from it once per realization.
struct ConstantParams {
    double xi = 1.0;
    std::vector<double> xi_support;
};

using ModelParams =
    std::variant<XYParams, IsingParams, PercolationParams, AndersonParams, GaussianParams, BandParams, ConstantParams>;

inline std::string model_name(const ModelParams& p) {
    struct {
        std::string operator()(const XYParams&) const { return "xy"; }
        std::string operator()(const IsingParams&) const { return "ising"; }
        std::string operator()(const PercolationParams&) const { return "percolation"; }
        std::string operator()(const AndersonParams&) const { return "anderson"; }
        std::string operator()(const GaussianParams&) const { return "gaussian"; }
        std::string operator()(const BandParams&) const { return "band"; }
        std::string operator()(const ConstantParams&) const { return "constant"; }
    } v;
    return std::visit(v, p);
}

inline bool is_random_model(const ModelParams& p) {
    if (const auto* c = std::get_if<ConstantParams>(&p)) return !c->xi_support.empty();
    return std::holds_alternative<PercolationParams>(p) || std::holds_alternative<AndersonParams>(p) ||
           std::holds_alternative<GaussianParams>(p) || std::holds_alternative<BandParams>(p);
}

// ---------------------------------------------------------------------------
// Builders

namespace detail {
inline void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be finite");
}
}  // namespace detail

/// XY chain with free ends: A_{i,i±1} = 1, B_{i,i+1} = γ = −B_{i+1,i}.
inline CoefficientPair xy_chain(std::size_t n, double gamma) {
    if (n < 2) throw std::invalid_argument("xy_chain needs n >= 2");
    detail::require_finite(gamma, "gamma");
    CoefficientPair c(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        c.set_symmetric(i, i + 1, 1.0);
        c.set_antisymmetric(i, i + 1, gamma);
    }
    c.provenance = {"xy", {{"gamma", gamma}}, std::nullopt};
    return c;
}

/**
 * Closed-form excitations of the transverse-field Ising chain on equidistributed phases:
 * λ_k = 2√(1 − 2h cos θ_k + h²), θ_k = 2π(k−1)/n − π. Sorted descending.
 */
inline std::vector<double> ising_transverse_excitations(std::size_t n, double h) {
    if (n < 1) throw std::invalid_argument("ising needs n >= 1");
    if (!(h >= 0.0) || !std::isfinite(h)) throw std::invalid_argument("ising field h must be finite and >= 0");
    std::vector<double> lambdas(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n) - std::numbers::pi;
        const double r = 1.0 - 2.0 * h * std::cos(theta) + h * h;
        lambdas[k] = 2.0 * std::sqrt(std::max(r, 0.0));
    }
    std::sort(lambdas.begin(), lambdas.end(), std::greater<>());
    return lambdas;
}

/**
 * Transverse-field Ising chain with free ends as a coefficient array:
 * A + B = 2h·I − 2·(upper shift), i.e. A_ii = 2h, A_{i,i+1} = −1, B_{i,i+1} = −1.
 * Its excitations are not the equidistributed closed form (different boundary).
 */
inline CoefficientPair ising_free_chain(std::size_t n, double h) {
    if (n < 1) throw std::invalid_argument("ising needs n >= 1");
    if (!(h >= 0.0) || !std::isfinite(h)) throw std::invalid_argument("ising field h must be finite and >= 0");
    CoefficientPair c(n);
    for (std::size_t i = 0; i < n; ++i) c.A(i, i) = 2.0 * h;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        c.set_symmetric(i, i + 1, -1.0);
        c.set_antisymmetric(i, i + 1, -1.0);
    }
    c.provenance = {"ising", {{"h", h}}, std::nullopt};
    return c;
}

/// Lattice adjacency with each bond kept independently with probability `bond_probability` (edge order).
inline CoefficientPair bond_diluted_adjacency(const Lattice& lattice, double bond_probability, VariateStream& rng) {
    CoefficientPair c(lattice.size());
    for (const auto& [i, j] : lattice.edges()) c.set_symmetric(i, j, rng.bernoulli(bond_probability) ? 1.0 : 0.0);
    return c;
}

inline CoefficientPair percolation_model(const Lattice& lattice, double p, const SeedSpec& seed) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("percolation probability p must lie in (0,1)");
    VariateStream rng(seed);
    CoefficientPair c = bond_diluted_adjacency(lattice, p, rng);
    c.provenance = {"percolation", {{"p", p}}, seed};
    return c;
}

/// A_ii = v_i drawn from `potential` (site order), A_ij = t on lattice edges, B = 0.
inline CoefficientPair anderson_model(const Lattice& lattice, double t, const DistributionSpec& potential,
                                      const SeedSpec& seed) {
    if (!potential.is_centred()) throw std::invalid_argument("anderson potential must have mean zero");
    if (!(potential.std_dev >= 0.0) || !std::isfinite(potential.std_dev))
        throw std::invalid_argument("anderson potential needs finite variance");
    detail::require_finite(t, "hopping t");
    VariateStream rng(seed);
    CoefficientPair c(lattice.size());
    for (std::size_t i = 0; i < lattice.size(); ++i) c.A(i, i) = potential.sample(rng);
    for (const auto& [i, j] : lattice.edges()) c.set_symmetric(i, j, t);
    c.provenance = {"anderson", {{"t", t}, {"W", potential.std_dev}}, seed};
    return c;
}

/**
 * Gaussian quadratic form: A = a/√n, B = b/√n with a symmetric, Var a_ij = (1+δ_ij)s²,
 * and b antisymmetric, Var b_ij = (1−δ_ij)s². Draw order: for i, for j >= i: a_ij, then b_ij when j > i.
 * A + B then has i.i.d. N(0, 2s²/n) entries.
 */
inline CoefficientPair gaussian_qf(std::size_t n, double s, const SeedSpec& seed) {
    if (n < 1) throw std::invalid_argument("gaussian_qf needs n >= 1");
    if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("gaussian_qf needs s > 0");
    VariateStream rng(seed);
    const double scale = s / std::sqrt(static_cast<double>(n));
    CoefficientPair c(n);
    for (std::size_t i = 0; i < n; ++i) {
        c.A(i, i) = std::numbers::sqrt2 * scale * rng.gaussian();
        for (std::size_t j = i + 1; j < n; ++j) {
            c.set_symmetric(i, j, scale * rng.gaussian());
            c.set_antisymmetric(i, j, scale * rng.gaussian());
        }
    }
    c.provenance = {"gaussian", {{"s", s}}, seed};
    return c;
}

/**
 * Band random form: A_ij = a_ij/√W, B_ij = b_ij/√W for |i−j| <= W, zero outside.
 * a, b are i.i.d. draws from a standardized law (diagonal included for a).
 */
inline CoefficientPair band_random(std::size_t n, std::size_t bandwidth, const DistributionSpec& entries,
                                   const SeedSpec& seed) {
    if (n < 2 || bandwidth < 1 || bandwidth > n - 1)
        throw std::invalid_argument("band width must satisfy 1 <= W <= n-1");
    if (!entries.is_standardized()) throw std::invalid_argument("band entries must be standardized (mean 0, variance 1)");
    VariateStream rng(seed);
    const double scale = 1.0 / std::sqrt(static_cast<double>(bandwidth));
    CoefficientPair c(n);
    for (std::size_t i = 0; i < n; ++i) {
        c.A(i, i) = scale * entries.sample(rng);
        for (std::size_t j = i + 1; j < n && j <= i + bandwidth; ++j) {
            c.set_symmetric(i, j, scale * entries.sample(rng));
            c.set_antisymmetric(i, j, scale * entries.sample(rng));
        }
    }
    c.provenance = {"band",
                    {{"bandwidth", static_cast<double>(bandwidth)}, {"entry_law", static_cast<double>(entries.law)}},
                    seed};
    return c;
}

inline CoefficientPair constant_model(std::size_t n, double xi) {
    if (n < 1) throw std::invalid_argument("constant model needs n >= 1");
    detail::require_finite(xi, "xi");
    CoefficientPair c(n);
    for (std::size_t i = 0; i < n; ++i) c.A(i, i) = xi;
    c.provenance = {"constant", {{"xi", xi}}, std::nullopt};
    return c;
}

/// Dispatches on the parameter variant. Ising in closed-form mode has no array and is rejected here.
inline CoefficientPair build_model(const ModelParams& params, std::size_t n, const SeedSpec& seed) {
    struct Builder {
        std::size_t n;
        const SeedSpec& seed;
        CoefficientPair operator()(const XYParams& p) const { return xy_chain(n, p.gamma); }
        CoefficientPair operator()(const IsingParams& p) const {
            if (p.mode == IsingMode::closed_form)
                throw std::invalid_argument("closed-form Ising has no coefficient array; use ising_transverse_excitations");
            return ising_free_chain(n, p.h);
        }
        CoefficientPair operator()(const PercolationParams& p) const {
            if (p.lattice.size() != n) throw std::invalid_argument("lattice size differs from n");
            return percolation_model(p.lattice, p.p, seed);
        }
        CoefficientPair operator()(const AndersonParams& p) const {
            if (p.lattice.size() != n) throw std::invalid_argument("lattice size differs from n");
            return anderson_model(p.lattice, p.t, p.potential, seed);
        }
        CoefficientPair operator()(const GaussianParams& p) const { return gaussian_qf(n, p.s, seed); }
        CoefficientPair operator()(const BandParams& p) const { return band_random(n, p.bandwidth, p.entries, seed); }
        CoefficientPair operator()(const ConstantParams& p) const {
            if (p.xi_support.empty()) return constant_model(n, p.xi);
            VariateStream rng(seed);
            const double xi = p.xi_support[rng.index(p.xi_support.size())];
            CoefficientPair c = constant_model(n, xi);
            c.provenance.seed = seed;
            return c;
        }
    };
    return std::visit(Builder{n, seed}, params);
}

/// Limiting value of (1/4n)Σλ² where it is known in closed form.
inline std::optional<double> limiting_variance(const ModelParams& params) {
    struct {
        std::optional<double> operator()(const XYParams& p) const { return 0.5 * (1.0 + p.gamma * p.gamma); }
        std::optional<double> operator()(const IsingParams& p) const { return 1.0 + p.h * p.h; }
        std::optional<double> operator()(const PercolationParams& p) const {
            return static_cast<double>(p.lattice.coordination_number()) * p.p / 4.0;
        }
        std::optional<double> operator()(const AndersonParams& p) const {
            const double w = p.potential.std_dev;
            return (w * w + static_cast<double>(p.lattice.coordination_number()) * p.t * p.t) / 4.0;
        }
        std::optional<double> operator()(const GaussianParams& p) const { return p.s * p.s / 2.0; }
        std::optional<double> operator()(const BandParams&) const { return std::nullopt; }
        std::optional<double> operator()(const ConstantParams& p) const {
            if (!p.xi_support.empty()) return std::nullopt;
            return p.xi * p.xi / 4.0;
        }
    } v;
    return std::visit(v, params);
}

}  // namespace fermispec
