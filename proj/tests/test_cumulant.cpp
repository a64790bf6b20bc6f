#include <gtest/gtest.h>

#include <cmath>

#include "nlfront/cumulant.hpp"
#include "nlfront/errors.hpp"
#include "nlfront/selfcheck.hpp"
#include "oracles.hpp"

using namespace nlfront;

TEST(Cumulant, GaussianRateIsQuadratic) {
    const CumulantFunctions cf(Kernel::gaussian(1.0));
    for (double z = -3.0; z <= 3.0; z += 0.25) {
        const auto [rate, zeta] = cf.rate_function(z);
        EXPECT_NEAR(rate, 0.5 * z * z, 1e-12);
        EXPECT_NEAR(zeta, z, 1e-12);
        EXPECT_NEAR(cf.saddle_point(z).cgf_pp, 1.0, 1e-12);
    }
}

TEST(Cumulant, LaplaceRateMatchesClosedForm) {
    const CumulantFunctions cf(Kernel::laplace(2.0));
    for (double z : {-5.0, -1.0, -0.1, 0.0, 0.3, 1.0, 2.5, 10.0})
        EXPECT_NEAR(cf.rate_function(z).first, oracle::laplace_lambda_star(2.0, z), 1e-10 * (1.0 + std::abs(z)));
}

TEST(Cumulant, SaddleIsOdd) {
    const CumulantFunctions cf(Kernel::truncated_gaussian(1.0, 2.0));
    for (double z : {0.2, 0.9, 1.7}) EXPECT_DOUBLE_EQ(cf.saddle(-z), -cf.saddle(z));
}

TEST(Cumulant, CompactKernelLimits) {
    const CumulantFunctions cf(Kernel::uniform(1.0));
    EXPECT_NEAR(cf.z_limit(), 0.999, 1e-15);
    EXPECT_EQ(cf.dstar_bound(), 1.0);
    EXPECT_NO_THROW(cf.saddle(0.99));
    EXPECT_THROW(cf.saddle(1.0), DomainError);
    EXPECT_THROW(cf.saddle(-1.2), DomainError);
}

TEST(Cumulant, DerivativesFromMoments) {
    // Laplace: Λ'(λ) = 2λ/(a²−λ²), Λ''(λ) = 2(a²+λ²)/(a²−λ²)²
    const CumulantFunctions cf(Kernel::laplace(2.0));
    for (double l : {-1.5, 0.0, 0.5, 1.9}) {
        const auto [d1, d2] = cf.lambda_derivs(l);
        EXPECT_NEAR(d1, 2 * l / (4 - l * l), 1e-10 * (1 + std::abs(d1)));
        EXPECT_NEAR(d2, 2 * (4 + l * l) / ((4 - l * l) * (4 - l * l)), 1e-9 * d2);
    }
}

TEST(Cumulant, MemoDoesNotChangeResults) {
    const CumulantFunctions cf(Kernel::laplace(1.0));
    const SaddlePoint a = cf.saddle_point(0.73);
    const SaddlePoint b = cf.saddle_point(0.73);
    cf.clear_cache();
    const SaddlePoint c = cf.saddle_point(0.73);
    EXPECT_EQ(a.zeta, b.zeta);
    EXPECT_EQ(a.zeta, c.zeta);
    EXPECT_EQ(a.rate, c.rate);
}

TEST(Cumulant, DualityOnBundledKernels) {
    for (const Kernel& k : bundled_kernels()) {
        const RateFunctionCheck rc = check_rate_function(CumulantFunctions(k));
        EXPECT_LT(rc.max_roundtrip, 1e-9) << k.name();
        EXPECT_LT(rc.max_legendre_gap, 1e-8) << k.name();
        EXPECT_LT(rc.max_derivative_error, 1e-6) << k.name();
    }
}

TEST(Cumulant, RateIsConvexAndZeroAtOrigin) {
    const CumulantFunctions cf(Kernel::truncated_gaussian(1.0, 2.5));
    EXPECT_NEAR(cf.rate_function(0.0).first, 0.0, 1e-15);
    double prev_slope = -1e300;
    for (double z = -2.0; z <= 2.0; z += 0.1) {
        const double slope = cf.rate_function(z).second;
        EXPECT_GT(slope, prev_slope);
        prev_slope = slope;
    }
}
