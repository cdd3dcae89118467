#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dense_matrix.hpp"
#include "jacobi.hpp"
#include "model.hpp"

namespace fermispec {

/**
 * Normal-mode data of a quadratic form: the elementary excitations λ_k
 * (singular values of X = A + B, sorted descending) and the shift K = Tr A / 2.
 * Derived quantities are filled in by make_excitations().
 */
struct ExcitationSet {
    std::size_t n = 0;
    std::vector<double> lambdas;
    double K = 0.0;
    double sigma_sq_hat = 0.0;  // (1/4n) Σ λ²  (= s_n²)
    double op_norm = 0.0;       // max λ
    double rho_n_cubed = 0.0;   // (1/(8 n^{3/2})) Σ λ³
    Provenance provenance;

    double s_n_sq() const noexcept { return sigma_sq_hat; }
    double sum_sq() const noexcept { return 4.0 * static_cast<double>(n) * sigma_sq_hat; }
    /// Standard deviation of the level density: √(Σλ²/4).
    double total_sigma() const noexcept { return std::sqrt(sum_sq() / 4.0); }
};

/// Builds an ExcitationSet from a list of excitations (any order, all >= 0) and a shift.
inline ExcitationSet make_excitations(std::vector<double> lambdas, double K, Provenance provenance = {}) {
    if (lambdas.empty()) throw std::invalid_argument("excitation set needs n >= 1");
    for (double l : lambdas) {
        if (!std::isfinite(l) || l < 0.0) throw std::invalid_argument("excitations must be finite and >= 0");
    }
    if (!std::isfinite(K)) throw std::invalid_argument("shift K must be finite");
    std::sort(lambdas.begin(), lambdas.end(), std::greater<>());
    ExcitationSet e;
    e.n = lambdas.size();
    e.K = K;
    const double n = static_cast<double>(e.n);
    double s2 = 0.0, s3 = 0.0;
    for (double l : lambdas) {
        s2 += l * l;
        s3 += l * l * l;
    }
    e.sigma_sq_hat = s2 / (4.0 * n);
    e.rho_n_cubed = s3 / (8.0 * std::pow(n, 1.5));
    e.op_norm = lambdas.front();
    e.lambdas = std::move(lambdas);
    e.provenance = std::move(provenance);
    return e;
}

struct DecomposeOptions {
    JacobiOptions jacobi{};
    /// Negative eigenvalues of XᵀX down to −clamp·max eigenvalue are rounding noise and become 0.
    double clamp_tolerance = 1e-12;
};

/**
 * Elementary excitations as singular values of X = A + B: eigenvalues of the
 * symmetric product XᵀX by cyclic Jacobi, then square roots.
 */
inline ExcitationSet decompose(const CoefficientPair& c, const DecomposeOptions& opts = {}) {
    if (const auto report = validate(c); !report.ok())
        throw std::invalid_argument("decompose: " + report.message());

    const DenseMatrix x = c.A + c.B;
    const auto eig = symmetric_eigenvalues(gram(x), opts.jacobi);
    const double largest = std::max(eig.eigenvalues.back(), 0.0);

    std::vector<double> lambdas;
    lambdas.reserve(c.n);
    for (double v : eig.eigenvalues) {
        if (v < 0.0) {
            if (-v > opts.clamp_tolerance * largest)
                throw std::runtime_error("decompose: XᵀX has eigenvalue " + std::to_string(v) +
                                         " below the rounding tolerance");
            v = 0.0;
        }
        lambdas.push_back(std::sqrt(v));
    }
    return make_excitations(std::move(lambdas), c.A.trace() / 2.0, c.provenance);
}

struct Theorem1Diagnostics {
    double op_norm_over_n4;  // n^{-1/4} max λ  (→ 0 required)
    double sigma_sq_hat;     // (1/4n) Σ λ²   (→ σ² < ∞ required)
};

inline Theorem1Diagnostics theorem1_diagnostics(const ExcitationSet& e) {
    return {e.op_norm / std::pow(static_cast<double>(e.n), 0.25), e.sigma_sq_hat};
}

/// Constant of the Berry-Esseen inequality for non-identically distributed summands.
inline constexpr double berry_esseen_constant = 6.0;

/**
 * Berry-Esseen bound on the Kolmogorov distance between the level CDF normalized by
 * √(Σλ²/4) and the standard normal: C · Σ(λ³/8) / (Σ λ²/4)^{3/2} = 6 Σλ³ / (Σλ²)^{3/2}.
 * Invariant under λ → cλ. Undefined (nullopt) when every λ is zero.
 */
inline std::optional<double> berry_esseen_bound(const ExcitationSet& e) {
    double s2 = 0.0, s3 = 0.0;
    for (double l : e.lambdas) {
        s2 += l * l;
        s3 += l * l * l;
    }
    if (s2 == 0.0) return std::nullopt;
    return berry_esseen_constant * s3 / std::pow(s2, 1.5);
}

/// The same bound written as (C/√n) ρ_n³ / s_n^{3/2}. Not scale invariant; kept for comparison only.
inline std::optional<double> berry_esseen_moment_form(const ExcitationSet& e) {
    if (e.sigma_sq_hat == 0.0) return std::nullopt;
    const double s_n = std::sqrt(e.sigma_sq_hat);
    return berry_esseen_constant / std::sqrt(static_cast<double>(e.n)) * e.rho_n_cubed / std::pow(s_n, 1.5);
}

}  // namespace fermispec
