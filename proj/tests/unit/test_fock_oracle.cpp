#include <gtest/gtest.h>

#include <fermispec/fock_oracle.hpp>
#include <fermispec/modes.hpp>
#include <fermispec/spectrum.hpp>

#include <cmath>

#include "../support/oracles.hpp"

using namespace fermispec;

namespace {

double max_abs(const DenseMatrix& m) {
    double d = 0.0;
    for (double v : m.values()) d = std::max(d, std::abs(v));
    return d;
}

double trace_of(std::initializer_list<const DenseMatrix*> ops) {
    auto it = ops.begin();
    DenseMatrix p = **it;
    for (++it; it != ops.end(); ++it) p = multiply(p, **it);
    return p.trace();
}

}  // namespace

TEST(Fock, AnticommutationRelations) {
    for (std::size_t n = 1; n <= 6; ++n) {
        const fock::FockOperatorSet ops(n);
        const DenseMatrix id = DenseMatrix::identity(ops.dimension());
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                const DenseMatrix cc = multiply(ops.c(i), ops.c(j)) + multiply(ops.c(j), ops.c(i));
                EXPECT_LT(max_abs(cc), 1e-12);
                DenseMatrix ccd = multiply(ops.c(i), ops.c_dag(j)) + multiply(ops.c_dag(j), ops.c(i));
                if (i == j) ccd -= id;
                EXPECT_LT(max_abs(ccd), 1e-12);
            }
    }
}

TEST(Fock, CreatorIsTransposeOfAnnihilator) {
    const fock::FockOperatorSet ops(4);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(ops.c_dag(i), ops.c(i).transposed());
}

TEST(Fock, TraceIdentities) {
    for (std::size_t n = 2; n <= 5; ++n) {
        const fock::FockOperatorSet o(n);
        const double d = std::pow(2.0, static_cast<double>(n));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                EXPECT_NEAR(trace_of({&o.c_dag(i), &o.c(j)}), i == j ? d / 2 : 0.0, 1e-12);
                for (std::size_t k = 0; k < n; ++k)
                    for (std::size_t l = 0; l < n; ++l) {
                        const double dij = i == j, dkl = k == l, dil = i == l, djk = j == k, dik = i == k, djl = j == l;
                        EXPECT_NEAR(trace_of({&o.c_dag(i), &o.c(j), &o.c_dag(k), &o.c(l)}),
                                    d / 4 * (dij * dkl + dil * djk), 1e-12);
                        EXPECT_NEAR(trace_of({&o.c(i), &o.c(j), &o.c_dag(k), &o.c_dag(l)}),
                                    d / 4 * (dil * djk - dik * djl), 1e-12);
                    }
            }
    }
}

TEST(Fock, SingleModeNumberOperator) {
    CoefficientPair c(1);
    c.A(0, 0) = 1.7;
    const DenseMatrix h = fock::build_hamiltonian(c);
    EXPECT_EQ(h(0, 0), 0.0);
    EXPECT_EQ(h(1, 1), 1.7);
    EXPECT_EQ(h(0, 1), 0.0);
}

TEST(Fock, ConstantModelTwoModes) {
    const auto ev = fock::exact_spectrum(fock::build_hamiltonian(constant_model(2, 0.6)));
    const std::vector<double> expected{0.0, 0.6, 0.6, 1.2};
    EXPECT_LT(oracle::max_abs_diff(ev, expected), 1e-14);
}

TEST(Fock, HamiltonianSymmetricAndTraceMoments) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const CoefficientPair c = oracle::random_pair(6, 300 + seed);
        const DenseMatrix h = fock::build_hamiltonian(c);
        EXPECT_LT(max_abs(h - h.transposed()), 1e-12);
        const double d = 64.0;
        const double mean = h.trace() / d;
        const double second = multiply(h, h).trace() / d;
        const TraceMoments tm = trace_moments(c);
        EXPECT_NEAR(mean, tm.mean, 1e-9);
        EXPECT_NEAR(second - mean * mean, tm.variance, 1e-9 * std::max(1.0, tm.variance));
    }
}

TEST(Fock, DiagonalMatrixSpectrum) {
    DenseMatrix d(3);
    d(0, 0) = 2.0;
    d(1, 1) = -1.0;
    d(2, 2) = 0.5;
    EXPECT_EQ(fock::exact_spectrum(d), (std::vector<double>{-1.0, 0.5, 2.0}));
    d(0, 1) = 1.0;
    EXPECT_THROW(fock::exact_spectrum(d), std::invalid_argument);
}

TEST(Fock, MatchesSubsetSumSpectrum) {
    for (std::size_t n = 2; n <= 8; ++n)
        for (std::uint64_t r = 0; r < 4; ++r) {
            const CoefficientPair c = gaussian_qf(n, 1.0, {500 + n, r});
            const auto exact = fock::exact_spectrum(fock::build_hamiltonian(c));
            const auto levels = enumerate_levels(decompose(c), LevelOrder::sorted).materialize();
            EXPECT_LT(oracle::max_abs_diff(exact, levels), 1e-9) << n;
        }
}

TEST(Fock, RefusesLargeSystems) {
    EXPECT_THROW(fock::build_hamiltonian(constant_model(11, 1.0)), ResourceGuardError);
    EXPECT_THROW(fock::FockOperatorSet(11), std::invalid_argument);
}
