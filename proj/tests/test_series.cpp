#include <gtest/gtest.h>

#include <cmath>

#include "nlfront/numeric.hpp"
#include "nlfront/series.hpp"
#include "oracles.hpp"

using namespace nlfront;

namespace {

SeriesEngine make(const Kernel& k, double r = 1.0, SeriesConfig cfg = {}) {
    const CumulantFunctions cf(k);
    return SeriesEngine(cf, critical_speed(cf, r), cfg);
}

}  // namespace

TEST(Series, GaussianMatchesDirectSum) {
    // every generation on the exact backend
    SeriesConfig exact;
    exact.n0 = 1L << 30;
    const SeriesEngine se = make(Kernel::gaussian(1.0), 1.0, exact);
    const SeriesEngine mixed = make(Kernel::gaussian(1.0));
    for (double t : {0.5, 3.0, 10.0, 40.0, 200.0}) {
        for (double frac : {-0.5, 0.0, 0.5, 1.0, 1.3}) {
            const double x = frac * se.params().c * t + (frac == 0.0 ? 0.3 : 0.0);
            const double ref = oracle::gaussian_log_u(1.0, 1.0, t, x);
            EXPECT_NEAR(se.u_linear(t, x).log_value, ref, 1e-7) << "t=" << t << " x=" << x;
            // Bahadur-Rao terms carry a relative error of order 1/(n ζ² Λ''), at most 1/50 by the switch rule
            EXPECT_NEAR(mixed.u_linear(t, x).log_value, ref, 0.02) << "t=" << t << " x=" << x;
        }
    }
}

TEST(Series, InitialDatum) {
    const SeriesEngine se = make(Kernel::laplace(2.0));
    EXPECT_EQ(se.u_linear(0.0, -1.0).value, 1.0);
    EXPECT_EQ(se.u_linear(0.0, 0.0).value, 1.0);
    EXPECT_EQ(se.u_linear(0.0, 0.1).value, 0.0);
}

TEST(Series, FarLeftIsExponentialGrowth) {
    for (const Kernel& k : {Kernel::gaussian(1.0), Kernel::laplace(2.0), Kernel::uniform(1.0)}) {
        const SeriesEngine se = make(k);
        EXPECT_NEAR(se.u_linear(5.0, -1e6).value / std::exp(5.0), 1.0, 1e-10) << k.name();
    }
}

TEST(Series, MonotoneInX) {
    const SeriesEngine se = make(Kernel::laplace(2.0));
    double prev = 1e300;
    for (double x = -5.0; x < 60.0; x += 1.7) {
        const double v = se.u_linear(30.0, x).log_value;
        EXPECT_LT(v, prev);
        prev = v;
    }
}

TEST(Series, BackendInvariance) {
    SeriesConfig wide;
    wide.n0 = 256;
    for (const Kernel& k : {Kernel::gaussian(1.0), Kernel::laplace(2.0)}) {
        const SeriesEngine a = make(k), b = make(k, 1.0, wide);
        for (double t : {10.0, 20.0})
            for (double x : {0.5 * a.params().c * t, a.params().c * t, 1.4 * a.params().c * t})
                EXPECT_NEAR(a.u_linear(t, x).log_value, b.u_linear(t, x).log_value, 1e-6) << k.name() << " t=" << t;
    }
}

TEST(Series, MatchesJumpProcessMonteCarlo) {
    const SeriesEngine se = make(Kernel::gaussian(1.0));
    const oracle::McEstimate mc = oracle::jump_process_u(oracle::Jump::Gaussian, 1.0, 1.0, 5.0, 3.0, 1000000, 17);
    EXPECT_NEAR(se.u_linear(5.0, 3.0).value, mc.value, 3.0 * mc.half_width);
}

TEST(Series, PartialSumsAddUp) {
    const SeriesEngine se = make(Kernel::laplace(2.0));
    const double t = 50.0, x = se.params().c * t;
    const double total = se.u_linear(t, x).log_value;
    const double parts = log_add(log_add(se.partial_sum(t, x, 0.0, 1.0), se.partial_sum(t, x, 1.0, 2.0)),
                                 se.partial_sum(t, x, 2.0, kInf));
    EXPECT_NEAR(parts, total, 1e-10);
}

TEST(Series, DominantBlockNearAlpha) {
    const SeriesEngine se = make(Kernel::gaussian(1.0));
    const double a = se.params().alpha;
    const PartialSumReport rep = se.six_part_diagnostic(200.0, 0.0, 0.2, 0.2, 0.5 * a, 2.0 * a);
    ASSERT_EQ(rep.segments.size(), 6u);
    EXPECT_TRUE(rep.dominant == 2 || rep.dominant == 3);
    EXPECT_NEAR(double(rep.n_star) / 200.0, a, 0.05);
    for (std::size_t i : {0u, 1u, 4u, 5u}) EXPECT_LT(rep.segments[i].log_sum, rep.log_total - 5.0);
    EXPECT_GE(rep.log_head_bound, rep.segments[0].log_sum - 1e-9);
}

TEST(Series, CentralBehaviorIsBounded) {
    const SeriesEngine se = make(Kernel::laplace(2.0));
    const auto rows = se.central_behavior({50, 100, 200, 400, 800}, [](double) { return 0.0; });
    double lo = 1e300, hi = -1e300;
    for (const auto& r : rows) {
        lo = std::min(lo, r.log_normalized);
        hi = std::max(hi, r.log_normalized);
    }
    EXPECT_LT(hi - lo, std::log(5.0));
}

TEST(Series, PeakGenerationIsMaximal) {
    const SeriesEngine se = make(Kernel::laplace(2.0));
    const double t = 80.0, x = 100.0;
    const long n = se.peak_generation(t, x);
    const double top = se.log_term(n, t, x);
    for (long d : {-3L, -1L, 1L, 3L}) EXPECT_LE(se.log_term(n + d, t, x), top + 1e-12);
}
