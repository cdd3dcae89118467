#include <gtest/gtest.h>

#include <fermispec/ensemble.hpp>

#include <cmath>

using namespace fermispec;

namespace {

Lattice ring(std::size_t n) { return build_lattice(LatticeKind::ring, {n}, Boundary::periodic); }

}  // namespace

TEST(Ensemble, SingleRealizationEqualsSingleRun) {
    const ModelParams p = GaussianParams{1.0};
    EnsembleOptions o;
    o.seed = 3;
    o.bins = 40;
    const EnsembleReport rep = ensemble_average(p, 10, 1, o);
    const ExcitationSet e = decompose(gaussian_qf(10, 1.0, {3, 0}));
    const Histogram h = accumulate_histogram(enumerate_levels(e), o.lo, o.hi, o.bins, {e.K, std::sqrt(10.0)});
    EXPECT_EQ(*rep.histogram, h);
    EXPECT_EQ(rep.scalars.at("sigma_sq_hat").mean, e.sigma_sq_hat);
    EXPECT_EQ(rep.scalars.at("sigma_sq_hat").stderr_, 0.0);
    EXPECT_EQ(rep.scalars.at("E1_over_n").mean, ground_energy(e) / 10.0);
}

TEST(Ensemble, IdenticalForAnyWorkerCount) {
    const ModelParams p = PercolationParams{ring(12), 0.5};
    EnsembleOptions o;
    o.seed = 7;
    o.pool_levels = true;
    const EnsembleReport one = ensemble_average(p, 12, 9, o);
    for (unsigned t : {2u, 4u, 5u}) {
        o.threads = t;
        const EnsembleReport many = ensemble_average(p, 12, 9, o);
        EXPECT_EQ(*many.histogram, *one.histogram);
        EXPECT_EQ(many.kurtosis, one.kurtosis);
        EXPECT_EQ(many.kurtosis_stderr, one.kurtosis_stderr);
        EXPECT_EQ(many.pooled_levels, one.pooled_levels);
        for (const auto& [name, s] : one.scalars) {
            EXPECT_EQ(many.scalars.at(name).mean, s.mean) << name;
            EXPECT_EQ(many.scalars.at(name).stderr_, s.stderr_) << name;
        }
    }
}

TEST(Ensemble, StandardErrorOfScalars) {
    const EnsembleReport rep = ensemble_average(GaussianParams{1.0}, 30, 40, {.seed = 2, .density = false});
    const auto& s = rep.scalars.at("sigma_sq_hat");
    ASSERT_EQ(s.values.size(), 40u);
    double mean = 0.0, ss = 0.0;
    for (double v : s.values) mean += v;
    mean /= 40.0;
    for (double v : s.values) ss += (v - mean) * (v - mean);
    EXPECT_NEAR(s.mean, mean, 1e-15);
    EXPECT_NEAR(s.stderr_, std::sqrt(ss / 39.0 / 40.0), 1e-15);
    EXPECT_NEAR(s.mean, 0.5, 5 * s.stderr_ + 0.02);
    EXPECT_FALSE(rep.histogram.has_value());
}

TEST(Ensemble, RandomConstantModelAveragedDensityIsNotGaussian) {
    EnsembleOptions o;
    o.seed = 1;
    o.lo = -6;
    o.hi = 6;
    const EnsembleReport rep = ensemble_average(ConstantParams{1.0, {-2, -1, 1, 2}}, 12, 60, o);
    EXPECT_GT(rep.kurtosis - 3.0, 3.0 * rep.kurtosis_stderr);

    const EnsembleReport fixed = ensemble_average(ConstantParams{2.0, {}}, 12, 5, o);
    EXPECT_NEAR(fixed.kurtosis, 3.0 - 2.0 / 12.0, 1e-9);
    EXPECT_NEAR(fixed.kurtosis_stderr, 0.0, 1e-9);
}

TEST(Ensemble, ErrorsCarryRealizationIndex) {
    // The lattice has 6 sites but n = 7, so every realization fails; the first index is reported.
    try {
        ensemble_average(PercolationParams{ring(6), 0.5}, 7, 3);
        FAIL() << "expected an error";
    } catch (const EnsembleError& ex) {
        EXPECT_EQ(ex.realization, 0u);
        EXPECT_NE(std::string(ex.what()).find("realization 0"), std::string::npos);
    }
    EXPECT_THROW(ensemble_average(GaussianParams{1.0}, 5, 0), std::invalid_argument);
}

TEST(Ensemble, PercolationAveragedVarianceNearLimit) {
    EnsembleOptions o;
    o.seed = 4;
    const EnsembleReport rep = ensemble_average(PercolationParams{ring(14), 0.5}, 14, 30, o);
    EXPECT_NEAR(rep.averaged_moments.variance(), 0.25, 0.05);
    EXPECT_NEAR(rep.scalars.at("sigma_sq_hat").mean, 0.25, 0.05);
}
