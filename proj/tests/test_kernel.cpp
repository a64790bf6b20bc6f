#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "nlfront/errors.hpp"
#include "nlfront/kernel.hpp"

using namespace nlfront;

TEST(Kernel, GaussianMgfClosedForm) {
    const Kernel k = Kernel::gaussian(1.3);
    for (double l : {-2.0, -0.4, 0.0, 0.7, 3.0}) EXPECT_NEAR(k.mgf(l) / std::exp(0.5 * 1.69 * l * l), 1.0, 1e-14);
    EXPECT_NEAR(k.variance(), 1.69, 1e-14);
}

TEST(Kernel, LaplaceMgfAndDomain) {
    const Kernel k = Kernel::laplace(2.0);
    EXPECT_NEAR(k.mgf(1.0), 4.0 / 3.0, 1e-14);
    EXPECT_NEAR(k.mgf(-1.5), 4.0 / (4.0 - 2.25), 1e-13);
    EXPECT_EQ(k.mgf_domain_bound(), 2.0);
    EXPECT_THROW(k.mgf(2.0), DomainError);
    EXPECT_THROW(k.mgf(-2.5), DomainError);
    EXPECT_NEAR(k.variance(), 0.5, 1e-14);
}

TEST(Kernel, UniformMgfSmallArgumentStable) {
    const Kernel k = Kernel::uniform(1.5);
    EXPECT_NEAR(k.mgf(1e-9), 1.0, 1e-15);
    EXPECT_NEAR(k.mgf(2.0), std::sinh(3.0) / 3.0, 1e-13);
    EXPECT_EQ(k.support_sup(), 1.5);
    EXPECT_NEAR(k.log_mgf(200.0), std::log(std::sinh(300.0) / 300.0), 1e-10 * 300);
}

TEST(Kernel, TruncatedGaussianMatchesQuadrature) {
    const Kernel k = Kernel::truncated_gaussian(1.0, 2.0);
    for (double l : {0.3, 1.0, 4.0}) EXPECT_NEAR(k.mgf(l) / k.mgf_quadrature(l), 1.0, 1e-10);
    EXPECT_EQ(k.support_sup(), 2.0);
}

TEST(Kernel, DensitiesIntegrateToOne) {
    for (const Kernel& k : {Kernel::gaussian(0.7), Kernel::laplace(3.0), Kernel::uniform(2.0),
                            Kernel::truncated_gaussian(1.0, 1.5)}) {
        double s = 0.0;
        const double h = 1e-4;
        for (double x = -30.0; x < 30.0; x += h) s += k.density(x + 0.5 * h) * h;
        EXPECT_NEAR(s, 1.0, 1e-6) << k.name();
    }
}

TEST(Kernel, ParseSpecs) {
    EXPECT_EQ(Kernel::parse("gaussian:2").family(), KernelFamily::Gaussian);
    EXPECT_EQ(Kernel::parse("laplace:1.5").family(), KernelFamily::Laplace);
    EXPECT_EQ(Kernel::parse("uniform:1").family(), KernelFamily::UniformCompact);
    EXPECT_EQ(Kernel::parse("truncgauss:1,3").family(), KernelFamily::TruncatedGaussian);
    EXPECT_THROW(Kernel::parse("cauchy:1"), ConfigError);
    EXPECT_THROW(Kernel::parse("gaussian:-1"), ConfigError);
    EXPECT_THROW(Kernel::parse("gaussian:abc"), ConfigError);
}

TEST(Kernel, TabulatedFromCsv) {
    const std::string path = ::testing::TempDir() + "/nlfront_tab_kernel.csv";
    {
        std::ofstream out(path);
        out << "# triangle kernel\nx,J\n";
        for (int i = -10; i <= 10; ++i) out << i * 0.1 << "," << 2.0 * (1.0 - std::abs(i) * 0.1) << "\n";
    }
    const Kernel k = Kernel::from_csv(path);
    EXPECT_EQ(k.family(), KernelFamily::Tabulated);
    EXPECT_NEAR(k.mgf(0.0), 1.0, 1e-12);           // renormalized
    EXPECT_NEAR(k.density(0.0), 1.0, 1e-12);
    EXPECT_NEAR(k.variance(), 1.0 / 6.0, 1e-10);   // triangle on [−1, 1]
    EXPECT_EQ(k.support_sup(), 1.0);

    {
        std::ofstream out(path);
        out << "x,J\n0,1\nnot,a number\n";
    }
    EXPECT_THROW(Kernel::from_csv(path), ConfigError);
    EXPECT_THROW(Kernel::from_csv(path + ".missing"), ConfigError);
    std::remove(path.c_str());
}

TEST(Kernel, SamplesMatchMoments) {
    Rng rng(7);
    for (const Kernel& k : {Kernel::gaussian(1.0), Kernel::laplace(2.0), Kernel::uniform(1.0)}) {
        const auto xs = k.sample(rng, 200000);
        const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
        double var = 0.0;
        for (double x : xs) var += (x - mean) * (x - mean);
        var /= xs.size();
        EXPECT_NEAR(mean, 0.0, 5.0 * std::sqrt(k.variance() / xs.size())) << k.name();
        EXPECT_NEAR(var / k.variance(), 1.0, 0.02) << k.name();
    }
}

TEST(Kernel, TiltedSamplerMean) {
    // Laplace(2) at θ = 1: tilted mean Λ'(1) = 2θ/(a²−θ²) = 2/3
    Rng rng(11);
    const TiltedSampler lap(Kernel::laplace(2.0), 1.0);
    double s = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) s += lap(rng);
    EXPECT_NEAR(s / n, 2.0 / 3.0, 0.01);
    // uniform(1) at θ = 2: coth(2) − 1/2
    const TiltedSampler uni(Kernel::uniform(1.0), 2.0);
    s = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = uni(rng);
        ASSERT_LE(std::abs(x), 1.0);
        s += x;
    }
    EXPECT_NEAR(s / n, 1.0 / std::tanh(2.0) - 0.5, 0.005);
}

TEST(Kernel, SamplingIsDeterministicPerSeed) {
    Rng a(42), b(42);
    EXPECT_EQ(Kernel::laplace(1.0).sample(a, 100), Kernel::laplace(1.0).sample(b, 100));
}

TEST(Kernel, HypothesisReport) {
    const ValidationReport g = validate_hypotheses(Kernel::gaussian(1.0));
    EXPECT_TRUE(g.all_passed());
    const ValidationReport u = validate_hypotheses(Kernel::uniform(1.0));
    EXPECT_FALSE(u.passed("continuity"));
    EXPECT_TRUE(u.usable_for_theory());

    std::vector<double> x, v;
    for (int i = -50; i <= 50; ++i) {
        x.push_back(i * 0.1);
        v.push_back(std::exp(-0.5 * (i * 0.1 - 0.8) * (i * 0.1 - 0.8)));
    }
    const ValidationReport skew = validate_hypotheses(Kernel::tabulated(x, v));
    EXPECT_FALSE(skew.passed("symmetry"));
    EXPECT_FALSE(skew.usable_for_theory());
}
