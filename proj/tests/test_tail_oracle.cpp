#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nlfront/errors.hpp"
#include "nlfront/tail_oracle.hpp"
#include "oracles.hpp"

using namespace nlfront;

TEST(TailConvolution, GaussianMatchesNormalTail) {
    const CumulantFunctions cf(Kernel::gaussian(1.0));
    for (long n : {1L, 2L, 10L, 50L, 200L}) {
        for (double zs : {0.3, 1.0, 3.0, 8.0}) {
            const double x = zs * std::sqrt(double(n));
            const TailEstimate e = tail_convolution(cf, n, x);
            EXPECT_NEAR(e.log_value, oracle::log_normal_sf(zs), 1e-8) << "n=" << n << " x=" << x;
        }
    }
}

TEST(TailConvolution, LaplacePairMatchesQuadrature) {
    const CumulantFunctions cf(Kernel::laplace(2.0));
    for (double x : {0.05, 0.7, 2.0, 6.0}) {
        const double ref = oracle::laplace_sum2_sf(2.0, x);
        EXPECT_NEAR(tail_convolution(cf, 2, x).value / ref, 1.0, 1e-6) << x;
    }
}

TEST(TailConvolution, LaplacePairMatchesPlainMonteCarlo) {
    const CumulantFunctions cf(Kernel::laplace(2.0));
    std::mt19937_64 rng(2024);
    std::exponential_distribution<double> e(2.0);
    std::bernoulli_distribution sign(0.5);
    const long N = 10000000;
    long hits = 0;
    for (long i = 0; i < N; ++i) {
        const double s = (sign(rng) ? 1 : -1) * e(rng) + (sign(rng) ? 1 : -1) * e(rng);
        hits += s >= 0.7;
    }
    const double p = double(hits) / N;
    const double hw = 1.96 * std::sqrt(p * (1 - p) / N);
    EXPECT_NEAR(tail_convolution(cf, 2, 0.7).value, p, 3 * hw);
}

TEST(TailConvolution, UniformPairIsTriangular) {
    const CumulantFunctions cf(Kernel::uniform(1.0));
    for (double x : {0.1, 0.5, 1.0, 1.6, 1.95})
        EXPECT_NEAR(tail_convolution(cf, 2, x).value / oracle::uniform_sum2_sf(1.0, x), 1.0, 1e-7) << x;
}

TEST(TailConvolution, SymmetryAndEdges) {
    const CumulantFunctions cf(Kernel::laplace(1.0));
    EXPECT_DOUBLE_EQ(tail_convolution(cf, 7, 0.0).value, 0.5);
    const double p = tail_convolution(cf, 7, 2.5).value;
    EXPECT_NEAR(tail_convolution(cf, 7, -2.5).value, 1.0 - p, 1e-12);
    const CumulantFunctions cu(Kernel::uniform(1.0));
    EXPECT_EQ(tail_convolution(cu, 3, 3.0).value, 0.0);
    EXPECT_EQ(tail_convolution(cu, 3, 3.5).value, 0.0);
}

TEST(TailConvolution, ExplicitGridTooSmallThrows) {
    const CumulantFunctions cf(Kernel::gaussian(1.0));
    GridSpec g;
    g.spacing = 0.5;
    g.size = 16;
    EXPECT_THROW(tail_convolution(cf, 400, 20.0, g), GridError);
}

TEST(TailBahadurRao, GaussianRatio) {
    const CumulantFunctions cf(Kernel::gaussian(1.0));
    const double ratio = std::exp(tail_bahadur_rao(cf, 100, 50.0).log_value - oracle::log_normal_sf(5.0));
    EXPECT_NEAR(ratio, 1.037, 0.005);
    double prev = ratio - 1.0;
    for (long n : {400L, 1600L, 6400L}) {
        const double dev = std::exp(tail_bahadur_rao(cf, n, 0.5 * n).log_value -
                                    oracle::log_normal_sf(0.5 * std::sqrt(double(n)))) - 1.0;
        EXPECT_LT(std::abs(dev), 3.0 / std::sqrt(double(n)));
        EXPECT_LT(std::abs(dev), std::abs(prev));
        prev = dev;
    }
}

TEST(TailBahadurRao, AgreesWithConvolutionForLargeN) {
    const CumulantFunctions cf(Kernel::laplace(2.0));
    const double a = tail_convolution(cf, 800, 400.0).log_value;
    const double b = tail_bahadur_rao(cf, 800, 400.0).log_value;
    EXPECT_NEAR(a, b, 5e-3);
}

TEST(TailMonteCarlo, GaussianWithinThreeHalfWidths) {
    const CumulantFunctions cf(Kernel::gaussian(1.0));
    Rng rng(99);
    const TailEstimate e = tail_tilted_mc(cf, 50, 25.0, 100000, rng);
    ASSERT_TRUE(e.has_error_bar());
    EXPECT_NEAR(e.value, oracle::normal_sf(25.0 / std::sqrt(50.0)), 3.0 * e.error_bar);
}

TEST(TailMonteCarlo, HalfWidthShrinksLikeInverseRoot) {
    const CumulantFunctions cf(Kernel::laplace(2.0));
    std::vector<double> hw;
    for (std::size_t n : {1000u, 10000u, 100000u}) {
        Rng rng(5);
        hw.push_back(tail_tilted_mc(cf, 20, 6.0, n, rng).error_bar);
    }
    EXPECT_NEAR(hw[0] / hw[1], std::sqrt(10.0), 0.3 * std::sqrt(10.0));
    EXPECT_NEAR(hw[1] / hw[2], std::sqrt(10.0), 0.3 * std::sqrt(10.0));
}

TEST(TailMonteCarlo, DeterministicPerSeed) {
    const CumulantFunctions cf(Kernel::uniform(1.0));
    Rng a(3), b(3);
    EXPECT_EQ(tail_tilted_mc(cf, 10, 3.0, 5000, a).value, tail_tilted_mc(cf, 10, 3.0, 5000, b).value);
}

TEST(TailBackend, NamesRoundTrip) {
    for (TailBackend b : {TailBackend::ConvolutionExact, TailBackend::BahadurRao, TailBackend::TiltedMC})
        EXPECT_EQ(parse_tail_backend(to_string(b)), b);
    EXPECT_THROW(parse_tail_backend("nope"), ConfigError);
}
