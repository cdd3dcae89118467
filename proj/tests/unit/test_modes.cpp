#include <gtest/gtest.h>

#include <fermispec/jacobi.hpp>
#include <fermispec/modes.hpp>

#include <cmath>
#include <random>

#include "../support/oracles.hpp"

using namespace fermispec;

TEST(Jacobi, DiagonalInputIsItsDiagonal) {
    DenseMatrix d(4);
    d(0, 0) = 3.0;
    d(1, 1) = -1.0;
    d(2, 2) = 2.5;
    d(3, 3) = 0.0;
    const auto r = symmetric_eigenvalues(d);
    EXPECT_EQ(r.eigenvalues, (std::vector<double>{-1.0, 0.0, 2.5, 3.0}));
}

TEST(Jacobi, MatchesEigenOnRandomSymmetric) {
    for (std::size_t n : {2u, 5u, 17u, 64u, 100u}) {
        const CoefficientPair c = oracle::random_pair(n, n);
        const auto ours = symmetric_eigenvalues(c.A).eigenvalues;
        const auto ref = oracle::symmetric_eigenvalues(c.A);
        EXPECT_LT(oracle::max_abs_diff(ours, ref), 1e-11 * std::sqrt(c.A.frobenius_sq())) << n;
    }
}

TEST(Jacobi, SweepCapIsReported) {
    const CoefficientPair c = oracle::random_pair(30, 1);
    EXPECT_THROW(symmetric_eigenvalues(c.A, {1e-14, 1}), ConvergenceError);
}

TEST(Modes, ConstantModel) {
    for (double xi : {1.0, -0.7, 0.0}) {
        const ExcitationSet e = decompose(constant_model(6, xi));
        for (double l : e.lambdas) EXPECT_NEAR(l, std::abs(xi), 1e-15);
        EXPECT_DOUBLE_EQ(e.K, 6 * xi / 2);
        EXPECT_NEAR(e.sigma_sq_hat, xi * xi / 4, 1e-15);
    }
}

TEST(Modes, SingleMode) {
    CoefficientPair c(1);
    c.A(0, 0) = 2.5;
    const ExcitationSet e = decompose(c);
    EXPECT_DOUBLE_EQ(e.lambdas[0], 2.5);
    EXPECT_DOUBLE_EQ(e.K, 1.25);
}

TEST(Modes, TwoSiteXYClosedForm) {
    for (double g : {0.0, 0.3, 1.0, 1.7}) {
        const ExcitationSet e = decompose(xy_chain(2, g));
        EXPECT_NEAR(e.lambdas[0], std::max(1 + g, std::abs(1 - g)), 1e-14);
        EXPECT_NEAR(e.lambdas[1], std::min(1 + g, std::abs(1 - g)), 1e-14);
        EXPECT_EQ(e.K, 0.0);
    }
}

TEST(Modes, MatchesEigenSvd) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const std::size_t n = 3 + 7 * seed;
        const CoefficientPair c = oracle::random_pair(n, 1000 + seed);
        const ExcitationSet e = decompose(c);
        const auto ref = oracle::singular_values(c);
        EXPECT_LT(oracle::max_abs_diff(e.lambdas, ref), 1e-10 * ref.front()) << n;
    }
}

TEST(Modes, InvariantsOfTheExcitationSet) {
    const ExcitationSet e = decompose(gaussian_qf(40, 1.0, {3, 0}));
    EXPECT_TRUE(std::is_sorted(e.lambdas.rbegin(), e.lambdas.rend()));
    for (double l : e.lambdas) EXPECT_GE(l, 0.0);
    EXPECT_EQ(e.op_norm, e.lambdas.front());
}

TEST(Modes, SumRule) {
    for (std::size_t n : {5u, 50u, 200u, 512u}) {
        const CoefficientPair c = gaussian_qf(n, 1.0, {17, n});
        const ExcitationSet e = decompose(c);
        const double rhs = c.A.frobenius_sq() + c.B.frobenius_sq();
        EXPECT_NEAR(e.sum_sq() / rhs, 1.0, 1e-10) << n;
    }
}

TEST(Modes, ScaleEquivariance) {
    const CoefficientPair c = oracle::random_pair(12, 5);
    const ExcitationSet e = decompose(c);
    for (double k : {2.0, -0.5}) {
        CoefficientPair s(c.A * k, c.B * k);
        const ExcitationSet es = decompose(s);
        for (std::size_t i = 0; i < 12; ++i) EXPECT_NEAR(es.lambdas[i], std::abs(k) * e.lambdas[i], 1e-12);
        EXPECT_NEAR(es.K, k * e.K, 1e-12);
    }
}

TEST(Modes, OrthogonalSimilarityPreservesSingularValues) {
    const std::size_t n = 10;
    const CoefficientPair c = oracle::random_pair(n, 9);
    Eigen::MatrixXd g = Eigen::MatrixXd::Random(n, n);
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
    Eigen::MatrixXd x(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) x(i, j) = c.A(i, j) + c.B(i, j);
    const Eigen::MatrixXd y = q * x * q.transpose();
    CoefficientPair d(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            d.A(i, j) = 0.5 * (y(i, j) + y(j, i));
            d.B(i, j) = 0.5 * (y(i, j) - y(j, i));
        }
    for (std::size_t i = 0; i < n; ++i) d.A(i, i) = y(i, i), d.B(i, i) = 0.0;
    EXPECT_LT(oracle::max_abs_diff(decompose(d).lambdas, decompose(c).lambdas), 1e-10);
}

TEST(Modes, RejectsInvalidCoefficients) {
    CoefficientPair c(2);
    c.A(0, 1) = 1.0;
    EXPECT_THROW(decompose(c), std::invalid_argument);
    CoefficientPair d(2);
    d.A(0, 0) = INFINITY;
    EXPECT_THROW(decompose(d), std::invalid_argument);
}

TEST(Modes, Diagnostics) {
    for (std::size_t n : {8u, 64u, 256u}) {
        const ExcitationSet e = decompose(xy_chain(n, 0.6));
        EXPECT_LE(e.op_norm, 2.0 * (1 + 1e-12));
        EXPECT_NEAR(theorem1_diagnostics(e).op_norm_over_n4, e.op_norm / std::pow(n, 0.25), 1e-15);
    }
    const auto ising = make_excitations(ising_transverse_excitations(64, 0.5), 0.0);
    EXPECT_LE(ising.op_norm, 2.0 + 2.0 * 0.5 + 1e-12);
    EXPECT_DOUBLE_EQ(theorem1_diagnostics(decompose(constant_model(9, 3.0))).sigma_sq_hat, 9.0 / 4.0);
}

TEST(Modes, BerryEsseenBound) {
    EXPECT_NEAR(*berry_esseen_bound(decompose(constant_model(16, 1.0))), 1.5, 1e-14);
    EXPECT_NEAR(*berry_esseen_bound(decompose(constant_model(64, 2.0))), 0.75, 1e-14);
    std::vector<double> rank_one(9, 0.0);
    rank_one[0] = 2.0;
    EXPECT_NEAR(*berry_esseen_bound(make_excitations(rank_one, 0.0)), 6.0, 1e-14);
    EXPECT_FALSE(berry_esseen_bound(make_excitations(std::vector<double>(4, 0.0), 0.0)).has_value());
}

TEST(Modes, BerryEsseenScaleInvariantButMomentFormIsNot) {
    const ExcitationSet e = decompose(oracle::random_pair(15, 2));
    std::vector<double> scaled = e.lambdas;
    for (double& l : scaled) l *= 3.7;
    const ExcitationSet s = make_excitations(scaled, 0.0);
    EXPECT_NEAR(*berry_esseen_bound(s), *berry_esseen_bound(e), 1e-13);
    EXPECT_GT(std::abs(*berry_esseen_moment_form(s) - *berry_esseen_moment_form(e)), 1e-3);
}

TEST(Modes, MakeExcitationsValidates) {
    EXPECT_THROW(make_excitations({1.0, -0.1}, 0.0), std::invalid_argument);
    EXPECT_THROW(make_excitations({}, 0.0), std::invalid_argument);
    const ExcitationSet e = make_excitations({1.0, 3.0, 2.0}, 0.5);
    EXPECT_EQ(e.lambdas, (std::vector<double>{3.0, 2.0, 1.0}));
    EXPECT_DOUBLE_EQ(e.sigma_sq_hat, 14.0 / 12.0);
    EXPECT_DOUBLE_EQ(e.rho_n_cubed, 36.0 / (8.0 * std::pow(3.0, 1.5)));
}
