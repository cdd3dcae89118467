#pragma once

// Brute-force check of the normal-mode pipeline: the Hamiltonian assembled
// directly on the 2^n occupation-number basis and diagonalized as a dense matrix.
// Memory grows as 4^n, so this is for tests and small manual runs only.

#include <bit>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dense_matrix.hpp"
#include "errors.hpp"
#include "jacobi.hpp"
#include "model.hpp"

namespace fermispec::fock {

inline constexpr std::size_t max_sites = 10;

/// Result of a ladder operator on a basis state: sign and target state, or nothing.
struct Amplitude {
    double sign;
    std::uint32_t state;
};

/// Occupation of site i is bit i. Operators on site i pick up (−1)^{#occupied sites below i}.
inline double string_sign(std::uint32_t state, std::size_t site) noexcept {
    const std::uint32_t below = state & ((std::uint32_t{1} << site) - 1);
    return (std::popcount(below) & 1) ? -1.0 : 1.0;
}

inline std::optional<Amplitude> annihilate(std::size_t site, std::uint32_t state) noexcept {
    const std::uint32_t bit = std::uint32_t{1} << site;
    if (!(state & bit)) return std::nullopt;
    return Amplitude{string_sign(state, site), state ^ bit};
}

inline std::optional<Amplitude> create(std::size_t site, std::uint32_t state) noexcept {
    const std::uint32_t bit = std::uint32_t{1} << site;
    if (state & bit) return std::nullopt;
    return Amplitude{string_sign(state, site), state | bit};
}

/// Dense matrices of every c_i and c_i† on the 2^n basis.
class FockOperatorSet {
public:
    explicit FockOperatorSet(std::size_t n) : n_(n) {
        if (n < 1 || n > max_sites) throw std::invalid_argument("FockOperatorSet supports 1 <= n <= 10");
        const std::size_t dim = std::size_t{1} << n;
        for (std::size_t i = 0; i < n; ++i) {
            DenseMatrix c(dim), cd(dim);
            for (std::uint32_t s = 0; s < dim; ++s) {
                if (auto a = annihilate(i, s)) c(a->state, s) = a->sign;
                if (auto a = create(i, s)) cd(a->state, s) = a->sign;
            }
            annihilators_.push_back(std::move(c));
            creators_.push_back(std::move(cd));
        }
    }

    std::size_t sites() const noexcept { return n_; }
    std::size_t dimension() const noexcept { return std::size_t{1} << n_; }
    const DenseMatrix& c(std::size_t i) const { return annihilators_.at(i); }
    const DenseMatrix& c_dag(std::size_t i) const { return creators_.at(i); }

private:
    std::size_t n_;
    std::vector<DenseMatrix> annihilators_, creators_;
};

/**
 * H = Σ A_ij c_i†c_j + ½ Σ B_ij (c_i c_j − c_i†c_j†) on the occupation basis, built
 * by applying each term to each basis state. Refuses n > 10.
 */
inline DenseMatrix build_hamiltonian(const CoefficientPair& coeffs) {
    const std::size_t n = coeffs.n;
    if (n > max_sites) throw ResourceGuardError("Fock-space Hamiltonian limited to n <= 10, got " + std::to_string(n));
    if (const auto r = validate(coeffs); !r.ok()) throw std::invalid_argument("build_hamiltonian: " + r.message());
    const std::size_t dim = std::size_t{1} << n;
    DenseMatrix h(dim);

    // Applies op2 then op1 to |s⟩ and accumulates coefficient·⟨out|op1 op2|s⟩.
    auto apply_pair = [&](auto op1, std::size_t i, auto op2, std::size_t j, double coefficient, std::uint32_t s) {
        if (coefficient == 0.0) return;
        const auto first = op2(j, s);
        if (!first) return;
        const auto second = op1(i, first->state);
        if (!second) return;
        h(second->state, s) += coefficient * first->sign * second->sign;
    };
    auto a = [](std::size_t site, std::uint32_t s) { return annihilate(site, s); };
    auto ad = [](std::size_t site, std::uint32_t s) { return create(site, s); };

    for (std::uint32_t s = 0; s < dim; ++s) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                apply_pair(ad, i, a, j, coeffs.A(i, j), s);
                apply_pair(a, i, a, j, 0.5 * coeffs.B(i, j), s);
                apply_pair(ad, i, ad, j, -0.5 * coeffs.B(i, j), s);
            }
        }
    }
    return h;
}

/// All 2^n eigenvalues, ascending, using the same Jacobi solver as the normal-mode decomposition.
inline std::vector<double> exact_spectrum(const DenseMatrix& h, const JacobiOptions& opts = {}) {
    for (std::size_t i = 0; i < h.size(); ++i)
        for (std::size_t j = i + 1; j < h.size(); ++j)
            if (std::abs(h(i, j) - h(j, i)) > 1e-12)
                throw std::invalid_argument("exact_spectrum: matrix not symmetric");
    return symmetric_eigenvalues(h, opts).eigenvalues;
}

}  // namespace fermispec::fock
