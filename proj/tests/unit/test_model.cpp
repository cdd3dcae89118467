#include <gtest/gtest.h>

#include <fermispec/model.hpp>

#include <cmath>
#include <map>

#include "../support/oracles.hpp"

using namespace fermispec;

namespace {

double frobenius_per_4n(const CoefficientPair& c) {
    return (c.A.frobenius_sq() + c.B.frobenius_sq()) / (4.0 * static_cast<double>(c.n));
}

Lattice ring(std::size_t n) { return build_lattice(LatticeKind::ring, {n}, Boundary::periodic); }

}  // namespace

TEST(Model, XYChainRows) {
    const CoefficientPair c = xy_chain(3, 0.5);
    EXPECT_EQ(c.A(0, 0), 0.0);
    EXPECT_EQ(c.A(0, 1), 1.0);
    EXPECT_EQ(c.A(0, 2), 0.0);
    EXPECT_EQ(c.B(0, 0), 0.0);
    EXPECT_EQ(c.B(0, 1), 0.5);
    EXPECT_EQ(c.B(0, 2), 0.0);
    EXPECT_EQ(c.B(1, 0), -0.5);
    EXPECT_EQ(c.B(1, 1), 0.0);
    EXPECT_EQ(c.B(1, 2), 0.5);
    EXPECT_TRUE(validate(c).ok());
    EXPECT_EQ(c.provenance.model, "xy");
}

TEST(Model, XYChainGammaZeroHasNoPairing) {
    const CoefficientPair c = xy_chain(9, 0.0);
    EXPECT_EQ(c.B.frobenius_sq(), 0.0);
}

TEST(Model, XYChainNormalization) {
    EXPECT_NEAR(frobenius_per_4n(xy_chain(4, 0.5)), 0.46875, 1e-15);
    EXPECT_THROW(xy_chain(1, 0.5), std::invalid_argument);
}

TEST(Model, IsingClosedForm) {
    const auto l4 = ising_transverse_excitations(4, 1.0);
    EXPECT_NEAR(l4.back(), 0.0, 1e-15);
    for (double l : ising_transverse_excitations(7, 0.0)) EXPECT_NEAR(l, 2.0, 1e-15);
    const auto l8 = ising_transverse_excitations(8, 2.0);
    double s2 = 0.0;
    for (double l : l8) {
        EXPECT_GE(l, 2.0 * std::abs(1.0 - 2.0) - 1e-12);
        EXPECT_LE(l, 2.0 * (1.0 + 2.0) + 1e-12);
        s2 += l * l;
    }
    EXPECT_NEAR(s2 / 32.0, 5.0, 5.0 / 8.0);
    EXPECT_TRUE(std::is_sorted(l8.rbegin(), l8.rend()));
    EXPECT_THROW(ising_transverse_excitations(4, -1.0), std::invalid_argument);
}

TEST(Model, IsingFreeChainStructure) {
    const CoefficientPair c = ising_free_chain(5, 0.7);
    EXPECT_TRUE(validate(c).ok());
    for (std::size_t i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(c.A(i, i), 1.4);
    EXPECT_EQ(c.A(1, 2), -1.0);
    EXPECT_EQ(c.B(1, 2), -1.0);
    EXPECT_EQ(c.B(2, 1), 1.0);
    EXPECT_EQ(c.A(0, 2), 0.0);
}

TEST(Model, ConstantModel) {
    const CoefficientPair c = constant_model(5, 1.5);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) EXPECT_EQ(c.A(i, j), i == j ? 1.5 : 0.0);
    EXPECT_EQ(c.B.frobenius_sq(), 0.0);
}

TEST(Model, ValidateReportsFirstViolation) {
    CoefficientPair c(3);
    c.A(0, 1) = 1.0;
    auto r = validate(c);
    ASSERT_FALSE(r.ok());
    EXPECT_EQ(r.violation->kind, ViolationKind::asymmetric_A);
    EXPECT_EQ(r.violation->i, 0u);
    EXPECT_EQ(r.violation->j, 1u);

    CoefficientPair d(3);
    d.B(0, 0) = 1.0;
    r = validate(d);
    ASSERT_FALSE(r.ok());
    EXPECT_EQ(r.violation->kind, ViolationKind::non_antisymmetric_B);
    EXPECT_EQ(r.violation->i, 0u);
    EXPECT_EQ(r.violation->j, 0u);

    CoefficientPair e(2);
    e.A(1, 1) = std::nan("");
    r = validate(e);
    ASSERT_FALSE(r.ok());
    EXPECT_EQ(r.violation->kind, ViolationKind::non_finite);
    EXPECT_FALSE(r.message().empty());
}

TEST(Model, PercolationWithCertainBondsIsAdjacency) {
    const Lattice l = build_lattice(LatticeKind::hypercubic, {3, 4}, Boundary::periodic);
    VariateStream rng = stream({1, 0});
    const CoefficientPair c = bond_diluted_adjacency(l, 1.0, rng);
    double ones = 0.0;
    for (const auto& [i, j] : l.edges()) {
        EXPECT_EQ(c.A(i, j), 1.0);
        EXPECT_EQ(c.A(j, i), 1.0);
    }
    for (double v : c.A.values()) ones += v;
    EXPECT_EQ(ones, 2.0 * static_cast<double>(l.edges().size()));
    EXPECT_EQ(c.B.frobenius_sq(), 0.0);
}

TEST(Model, PercolationReproducibleAndBounded) {
    const Lattice l = ring(6);
    const CoefficientPair a = percolation_model(l, 0.5, {11, 2});
    const CoefficientPair b = percolation_model(l, 0.5, {11, 2});
    EXPECT_EQ(a.A, b.A);
    for (double v : a.A.values()) EXPECT_TRUE(v == 0.0 || v == 1.0);
    for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(a.A(i, i), 0.0);
    EXPECT_THROW(percolation_model(l, 1.0, {0, 0}), std::invalid_argument);
    EXPECT_THROW(percolation_model(l, 0.0, {0, 0}), std::invalid_argument);
}

TEST(Model, PercolationNormalizationConverges) {
    const Lattice l = ring(200);
    double mean = 0.0;
    for (std::uint64_t r = 0; r < 200; ++r) mean += frobenius_per_4n(percolation_model(l, 0.5, {3, r}));
    mean /= 200.0;
    EXPECT_NEAR(mean, 0.25, 0.005);
}

TEST(Model, AndersonLimits) {
    const Lattice l = ring(8);
    const CoefficientPair clean = anderson_model(l, 1.3, {EntryLaw::uniform, 0.0, 0.0}, {1, 0});
    for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(clean.A(i, i), 0.0);
    for (const auto& [i, j] : l.edges()) EXPECT_EQ(clean.A(i, j), 1.3);

    const CoefficientPair local = anderson_model(l, 0.0, {EntryLaw::gaussian, 0.0, 1.0}, {1, 0});
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j)
            if (i != j) { EXPECT_EQ(local.A(i, j), 0.0); }

    EXPECT_THROW(anderson_model(l, 1.0, {EntryLaw::uniform, 0.5, 1.0}, {1, 0}), std::invalid_argument);
}

TEST(Model, AndersonNormalizationConverges) {
    const Lattice l = ring(200);
    double mean = 0.0;
    for (std::uint64_t r = 0; r < 200; ++r)
        mean += frobenius_per_4n(anderson_model(l, 1.0, {EntryLaw::uniform, 0.0, 1.0}, {5, r}));
    mean /= 200.0;
    EXPECT_NEAR(mean, 0.75, 0.01);
}

TEST(Model, GaussianSingleMode) {
    const CoefficientPair c = gaussian_qf(1, 2.0, {1, 0});
    EXPECT_EQ(c.B(0, 0), 0.0);
    double m2 = 0.0;
    for (std::uint64_t r = 0; r < 20000; ++r) {
        const double a = gaussian_qf(1, 2.0, {1, r}).A(0, 0);
        m2 += a * a;
    }
    EXPECT_NEAR(m2 / 20000.0, 8.0, 0.3);
}

TEST(Model, GaussianSumHasIidEntries) {
    // Every entry of A + B at n = 4 has variance 2s²/n and distinct entries are uncorrelated.
    const std::size_t n = 4, R = 100000;
    const double s = 1.0;
    std::vector<double> m1(16, 0.0), m2(16, 0.0);
    double c01_10 = 0.0, c01_00 = 0.0;
    for (std::uint64_t r = 0; r < R; ++r) {
        const CoefficientPair c = gaussian_qf(n, s, {99, r});
        for (std::size_t k = 0; k < 16; ++k) {
            const double x = c.A.values()[k] + c.B.values()[k];
            m1[k] += x;
            m2[k] += x * x;
        }
        const double x01 = c.A(0, 1) + c.B(0, 1), x10 = c.A(1, 0) + c.B(1, 0), x00 = c.A(0, 0);
        c01_10 += x01 * x10;
        c01_00 += x01 * x00;
    }
    for (std::size_t k = 0; k < 16; ++k) {
        const double var = m2[k] / R - std::pow(m1[k] / R, 2);
        EXPECT_NEAR(var, 2.0 * s * s / n, 0.03 * 2.0 * s * s / n) << "entry " << k;
    }
    // Correlation estimator standard error is 1/√R; allow 3 of them.
    const double tol = 3.0 / std::sqrt(static_cast<double>(R)) * (2.0 / n);
    EXPECT_NEAR(c01_10 / R, 0.0, tol);
    EXPECT_NEAR(c01_00 / R, 0.0, tol);
}

TEST(Model, GaussianNormalizationAtLargeN) {
    double mean = 0.0;
    for (std::uint64_t r = 0; r < 5; ++r) mean += frobenius_per_4n(gaussian_qf(400, 1.0, {8, r}));
    EXPECT_NEAR(mean / 5.0, 0.5, 0.01);
    EXPECT_THROW(gaussian_qf(3, 0.0, {0, 0}), std::invalid_argument);
}

TEST(Model, BandStructure) {
    const DistributionSpec g{EntryLaw::gaussian, 0.0, 1.0};
    const CoefficientPair tri = band_random(10, 1, g, {1, 0});
    EXPECT_TRUE(validate(tri).ok());
    for (std::size_t i = 0; i < 10; ++i)
        for (std::size_t j = 0; j < 10; ++j)
            if (i > j + 1 || j > i + 1) {
                EXPECT_EQ(tri.A(i, j), 0.0);
                EXPECT_EQ(tri.B(i, j), 0.0);
            }
    const CoefficientPair full = band_random(6, 5, g, {1, 0});
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j)
            if (i != j) { EXPECT_NE(full.A(i, j), 0.0); }
    EXPECT_THROW(band_random(6, 6, g, {1, 0}), std::invalid_argument);
    EXPECT_THROW(band_random(6, 0, g, {1, 0}), std::invalid_argument);
    EXPECT_THROW(band_random(6, 2, DistributionSpec{EntryLaw::gaussian, 0.0, 2.0}, {1, 0}), std::invalid_argument);
}

TEST(Model, BandNormalizationConcentrates) {
    std::vector<double> v;
    for (std::uint64_t r = 0; r < 50; ++r)
        v.push_back(frobenius_per_4n(band_random(256, 8, {EntryLaw::gaussian, 0.0, 1.0}, {4, r})));
    double mean = 0.0, sq = 0.0;
    for (double x : v) mean += x;
    mean /= 50.0;
    for (double x : v) sq += (x - mean) * (x - mean);
    EXPECT_LT(std::sqrt(sq / 49.0) / mean, 0.03);
}

TEST(Model, EveryBuilderValidates) {
    const Lattice l = ring(7);
    const DistributionSpec g{EntryLaw::gaussian, 0.0, 1.0};
    for (const CoefficientPair& c :
         {xy_chain(7, 0.3), ising_free_chain(7, 1.2), percolation_model(l, 0.4, {1, 1}),
          anderson_model(l, 1.0, g, {1, 1}), gaussian_qf(7, 0.8, {1, 1}), band_random(7, 3, g, {1, 1}),
          constant_model(7, -2.0)}) {
        EXPECT_TRUE(validate(c).ok()) << c.provenance.model;
    }
}

TEST(Model, BuildModelDispatchAndLimits) {
    const SeedSpec seed{6, 0};
    EXPECT_EQ(build_model(XYParams{0.5}, 6, seed).A, xy_chain(6, 0.5).A);
    EXPECT_THROW(build_model(IsingParams{1.0, IsingMode::closed_form}, 6, seed), std::invalid_argument);
    EXPECT_THROW(build_model(PercolationParams{ring(5), 0.5}, 6, seed), std::invalid_argument);

    EXPECT_DOUBLE_EQ(*limiting_variance(XYParams{1.0}), 1.0);
    EXPECT_DOUBLE_EQ(*limiting_variance(IsingParams{1.0}), 2.0);
    EXPECT_DOUBLE_EQ(*limiting_variance(PercolationParams{ring(18), 0.5}), 0.25);
    EXPECT_DOUBLE_EQ(*limiting_variance(AndersonParams{ring(18), 1.0, {EntryLaw::uniform, 0.0, 1.0}}), 0.75);
    EXPECT_DOUBLE_EQ(*limiting_variance(GaussianParams{1.0}), 0.5);
    EXPECT_DOUBLE_EQ(*limiting_variance(ConstantParams{2.0, {}}), 1.0);
    EXPECT_FALSE(limiting_variance(ConstantParams{1.0, {-2, -1, 1, 2}}).has_value());
    EXPECT_FALSE(limiting_variance(BandParams{}).has_value());
}

TEST(Model, RandomConstantDrawsFromSupport) {
    const std::vector<double> support{-2, -1, 1, 2};
    std::map<double, int> seen;
    for (std::uint64_t r = 0; r < 400; ++r) {
        const CoefficientPair c = build_model(ConstantParams{1.0, support}, 3, {1, r});
        EXPECT_EQ(c.A(0, 0), c.A(2, 2));
        ++seen[c.A(0, 0)];
    }
    EXPECT_EQ(seen.size(), 4u);
    for (const auto& [v, count] : seen) EXPECT_GT(count, 60) << v;
}
