#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <numeric>

#include "nlfront/errors.hpp"
#include "nlfront/front_analysis.hpp"
#include "nlfront/pde.hpp"
#include "nlfront/series.hpp"
#include "nlfront/snapshot.hpp"

using namespace nlfront;

TEST(Reaction, LogisticProperties) {
    const ReactionTerm f = ReactionTerm::logistic(2.0);
    EXPECT_EQ(f(0.0), 0.0);
    EXPECT_EQ(f(1.0), 0.0);
    EXPECT_DOUBLE_EQ(f(0.5), 0.5);
    EXPECT_EQ(f.r_at_zero(), 2.0);
    EXPECT_TRUE(f.kpp());
    EXPECT_THROW(ReactionTerm::logistic(0.0), DomainError);
}

TEST(Reaction, CustomTableAndKppFlag) {
    std::vector<double> kpp(101), hump(101);
    for (int i = 0; i <= 100; ++i) {
        const double u = i / 100.0;
        kpp[i] = u * (1 - u);
        hump[i] = u * (1 - u) * (0.2 + u);
    }
    EXPECT_TRUE(ReactionTerm::custom(kpp).kpp());
    EXPECT_NEAR(ReactionTerm::custom(kpp).r_at_zero(), 0.99, 1e-12);  // one-sided slope of the table
    EXPECT_FALSE(ReactionTerm::custom(hump).kpp());
    kpp[50] = -0.1;
    EXPECT_THROW(ReactionTerm::custom(kpp), DomainError);
    EXPECT_THROW(ReactionTerm::parse("bistable:1"), ConfigError);
    EXPECT_EQ(ReactionTerm::parse("logistic:1.5").r_at_zero(), 1.5);
}

TEST(Pde, ConstantStatesAreSteady) {
    const Kernel k = Kernel::laplace(2.0);
    EvolveOptions opts;
    opts.check_guard = false;
    Field one = Field::step(-10, 10, 0.05, Frame::Raw);
    std::fill(one.values.begin(), one.values.end(), 1.0);
    Field zero = one;
    std::fill(zero.values.begin(), zero.values.end(), 0.0);
    opts.left_pad = opts.right_pad = 1.0;
    one = evolve(one, k, ReactionTerm::logistic(1.0), 0.05, 3.0, opts);
    opts.left_pad = opts.right_pad = 0.0;
    zero = evolve(zero, k, ReactionTerm::logistic(1.0), 0.05, 3.0, opts);
    for (double v : one.values) EXPECT_NEAR(v, 1.0, 1e-13);
    for (double v : zero.values) EXPECT_NEAR(v, 0.0, 1e-13);
    EXPECT_DOUBLE_EQ(one.time, 3.0);
}

TEST(Pde, StepDatum) {
    const Field f = Field::step(-1.0, 1.0, 0.5, Frame::Raw);
    ASSERT_EQ(f.size(), 5u);
    EXPECT_EQ(f.values[1], 1.0);
    EXPECT_EQ(f.values[2], 0.5);
    EXPECT_EQ(f.values[3], 0.0);
    EXPECT_NEAR(level_position(f, 0.5), 0.0, 1e-15);
}

TEST(Pde, LinearFramesMatchSeries) {
    const Kernel k = Kernel::gaussian(1.0);
    const CumulantFunctions cf(k);
    const FrontParams fp = critical_speed(cf, 1.0);
    const SeriesEngine se(cf, fp);
    const double t = 10.0, xmax = linear_front_extent(cf, fp, t) + 25.0;
    Field un = Field::step(-30, xmax, 0.05, Frame::NormalizedLinear, 1.0);
    Field ut = Field::step(-30, xmax, 0.05, Frame::TiltedLinear, 1.0, fp.lambda_r, fp.c);
    un = evolve(un, k, LinearRate{1.0}, 0.01, t);
    ut = evolve(ut, k, LinearRate{1.0}, 0.01, t);
    const auto lu = combined_log_linear(un, ut);
    for (double x : {-5.0, 0.0, 4.0, 9.0, 15.0, 21.0}) {
        const std::size_t i = std::lround((x + 30.0) / 0.05);
        const double ref = se.u_linear(t, un.x(i)).log_value;
        EXPECT_NEAR(std::exp(ref - t), un.values[i], 1e-4) << x;
        EXPECT_NEAR(lu[i], ref, 2e-3) << x;  // relative accuracy far ahead, from the tilted frame
    }
}

TEST(Pde, StabilityBoundEnforced) {
    const Field f = Field::step(-20, 40, 0.1, Frame::Raw);
    EXPECT_THROW(PdeSolver(Kernel::gaussian(1.0), ReactionTerm::logistic(1.0), f, 0.3), DomainError);
    EXPECT_NO_THROW(PdeSolver(Kernel::gaussian(1.0), ReactionTerm::logistic(1.0), f, 0.25));
}

TEST(Pde, GuardBandDetected) {
    const Field f = Field::step(-20, 40, 0.1, Frame::Raw);
    EXPECT_THROW(evolve(f, Kernel::gaussian(1.0), ReactionTerm::logistic(1.0), 0.1, 30.0), DomainError);
}

TEST(Pde, FrameMismatchRejected) {
    const Field f = Field::step(-20, 40, 0.1, Frame::NormalizedLinear, 1.0);
    EXPECT_THROW(PdeSolver(Kernel::gaussian(1.0), ReactionTerm::logistic(1.0), f, 0.1), DomainError);
}

TEST(Pde, OrderAndMonotonicityPreserved) {
    const Kernel k = Kernel::laplace(2.0);
    Field lo = Field::step(-30, 60, 0.05, Frame::Raw);
    Field hi = lo;
    for (std::size_t i = 0; i < hi.size(); ++i)
        if (hi.x(i) > 0 && hi.x(i) <= 2.0) hi.values[i] = 0.7;
    lo = evolve(lo, k, ReactionTerm::logistic(1.0), 0.05, 8.0);
    hi = evolve(hi, k, ReactionTerm::logistic(1.0), 0.05, 8.0);
    for (std::size_t i = 0; i < lo.size(); ++i) {
        EXPECT_LE(lo.values[i], hi.values[i] + 1e-10);
        if (i > 0) EXPECT_LE(lo.values[i], lo.values[i - 1] + 1e-10);
    }
}

TEST(Pde, NormalizedMassConserved) {
    const Kernel k = Kernel::gaussian(1.0);
    Field f = Field::step(-40, 40, 0.05, Frame::NormalizedLinear, 1.0);
    EvolveOptions opts;
    const double before = std::accumulate(f.values.begin(), f.values.end(), 0.0) * f.dx;
    const double T = 5.0;
    f = evolve(f, k, LinearRate{1.0}, 0.05, T, opts);
    const double after = std::accumulate(f.values.begin(), f.values.end(), 0.0) * f.dx;
    EXPECT_LT(std::abs(after - before) / before / T, 1e-6);
}

TEST(Pde, GridRefinementMovesLevelLittle) {
    const Kernel k = Kernel::gaussian(1.0);
    double pos[2];
    const double dxs[2] = {0.1, 0.05};
    for (int j = 0; j < 2; ++j) {
        Field f = Field::step(-30, 60, dxs[j], Frame::Raw);
        f = evolve(f, k, ReactionTerm::logistic(1.0), dxs[j], 10.0);
        pos[j] = level_position(f, 0.5);
    }
    EXPECT_LT(std::abs(pos[0] - pos[1]), 0.5 * 0.1);
}

TEST(Pde, ComparisonPrinciple) {
    const ComparisonReport cr =
        comparison_check(Kernel::gaussian(1.0), ReactionTerm::logistic(1.0), 0.05, 20.0, {5.0, 20.0});
    EXPECT_TRUE(cr.kpp);
    EXPECT_TRUE(cr.certified);
    for (const auto& p : cr.probes) EXPECT_LE(p.max_excess, 1e-6);
    // far left: v stays at 1 while u has grown like e^{rt}
    EXPECT_NEAR(cr.nonlinear.back().values.front(), 1.0, 1e-9);
    EXPECT_NEAR(cr.linear_log.back().front(), 20.0, 1e-6);
}

TEST(Pde, ComparisonRefusesNonKpp) {
    std::vector<double> hump(101);
    for (int i = 0; i <= 100; ++i) {
        const double u = i / 100.0;
        hump[i] = u * (1 - u) * (0.2 + u);
    }
    const ComparisonReport cr = comparison_check(Kernel::gaussian(1.0), ReactionTerm::custom(hump), 0.05, 5.0, {5.0});
    EXPECT_FALSE(cr.kpp);
    EXPECT_FALSE(cr.certified);
    EXPECT_TRUE(cr.probes.empty());
}

TEST(Snapshot, RoundTrip) {
    Field f = Field::step(-3, 3, 0.25, Frame::TiltedLinear, 1.5, 0.8, 1.2);
    f.time = 2.5;
    const std::string path = ::testing::TempDir() + "/nlfront_snap.nlfs";
    write_snapshot(path, f);
    const Field g = read_snapshot(path);
    EXPECT_EQ(g.values, f.values);
    EXPECT_EQ(g.frame, f.frame);
    EXPECT_EQ(g.x_min, f.x_min);
    EXPECT_EQ(g.dx, f.dx);
    EXPECT_EQ(g.time, 2.5);
    EXPECT_EQ(g.tilt, 0.8);
    std::FILE* fp = std::fopen(path.c_str(), "rb");
    std::fseek(fp, 0, SEEK_END);
    EXPECT_EQ(std::ftell(fp), long(64 + 8 * f.size()));
    std::fclose(fp);
    std::remove(path.c_str());
}
