// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cli_runner.hpp"
#include "nlfront/front_analysis.hpp"
#include "nlfront/selfcheck.hpp"
#include "nlfront/tail_oracle.hpp"
#include "oracles.hpp"

using namespace nlfront;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [FAILED: " << what << "]";
        }
    }
};

struct Criterion {
    int id;
    std::string title;
    double budget_s;
    std::function<void(Outcome&)> body;
};

FrontParams params(const Kernel& k, double r = 1.0) { return critical_speed(CumulantFunctions(k), r); }

void front_constants(Outcome& o) {
    using clock = std::chrono::steady_clock;
    auto t0 = clock::now();
    const FrontParams g = params(Kernel::gaussian(1.0));
    const double tg = std::chrono::duration<double>(clock::now() - t0).count();
    t0 = clock::now();
    const FrontParams l = params(Kernel::laplace(2.0));
    const double tl = std::chrono::duration<double>(clock::now() - t0).count();
    const double eg = std::max({std::abs(g.c - std::exp(0.5)), std::abs(g.lambda_r - 1.0), std::abs(g.alpha - std::exp(0.5))});
    const double el = std::max({std::abs(l.lambda_r - 2.0 / std::sqrt(3.0)), std::abs(l.c - 3.0 * std::sqrt(3.0) / 4.0),
                                std::abs(l.alpha - 1.5)});
    o.detail << "gaussian max err " << eg << " (" << tg << " s), laplace max err " << el << " (" << tl << " s)";
    o.require(eg <= 1e-8 && el <= 1e-8, "constants within 1e-8");
    o.require(tg < 1.0 && tl < 1.0, "each under 1 s");
}

void rate_function(Outcome& o) {
    const CumulantFunctions g(Kernel::gaussian(1.0));
    double worst = 0.0;
    for (int i = 0; i <= 600; ++i) {
        const double z = -3.0 + 0.01 * i;
        worst = std::max(worst, std::abs(g.rate_function(z).first - 0.5 * z * z));
    }
    o.detail << "gaussian |Λ*−z²/2| " << worst;
    o.require(worst <= 1e-8, "gaussian rate within 1e-8");
    for (const Kernel& k : bundled_kernels()) {
        const RateFunctionCheck rc = check_rate_function(CumulantFunctions(k));
        const bool ok = rc.max_roundtrip < 1e-9 && rc.max_legendre_gap < 1e-8 && rc.max_derivative_error < 1e-6;
        o.detail << "; " << k.name() << " dual " << rc.max_legendre_gap << " deriv " << rc.max_derivative_error;
        o.require(ok, k.name() + " duality/derivative");
    }
    // closed-form cross-check for a second family
    const CumulantFunctions l(Kernel::laplace(2.0));
    double lw = 0.0;
    for (double z = -3.0; z <= 3.0; z += 0.1) lw = std::max(lw, std::abs(l.rate_function(z).first - oracle::laplace_lambda_star(2.0, z)));
    o.detail << "; laplace closed form " << lw;
    o.require(lw < 1e-9, "laplace closed form");
}

void bahadur_rao(Outcome& o) {
    const CumulantFunctions cf(Kernel::gaussian(1.0));
    std::vector<double> dev;
    for (long n : {100L, 400L, 1600L, 6400L}) {
        const double ratio = std::exp(tail_bahadur_rao(cf, n, 0.5 * n).log_value - oracle::log_normal_sf(0.5 * std::sqrt(double(n))));
        dev.push_back(ratio - 1.0);
        o.detail << (n == 100 ? "" : ", ") << "n=" << n << " ratio " << ratio;
        o.require(std::abs(ratio - 1.0) <= 3.0 / std::sqrt(double(n)), "ratio−1 within 3/√n at n=" + std::to_string(n));
    }
    o.require(std::abs(dev[0] + 1.0 - 1.037) <= 0.005, "n=100 ratio 1.037 ± 0.005");
    for (std::size_t i = 1; i < dev.size(); ++i) o.require(std::abs(dev[i]) < std::abs(dev[i - 1]), "monotone shrink");
}

void triangle(Outcome& o) {
    const Kernel k = Kernel::gaussian(1.0);
    const CumulantFunctions cf(k);
    const FrontParams fp = critical_speed(cf, 1.0);
    const SeriesEngine se(cf, fp);
    const double t = 10.0, dx = 0.05, dt = 0.01;
    const double xmax = linear_front_extent(cf, fp, t) + 20.0 * k.scale() + 5.0;
    Field un = Field::step(-30.0, xmax, dx, Frame::NormalizedLinear, 1.0);
    un = evolve(un, k, LinearRate{1.0}, dt, t);
    const double lo = -5.0, hi = fp.c * t + 5.0;
    double worst = 0.0;
    for (int j = 0; j < 40; ++j) {
        const double x = lo + (hi - lo) * j / 39.0;
        const auto i = static_cast<std::size_t>(std::lround((x - un.x_min) / dx));
        const double series_norm = std::exp(se.u_linear(t, un.x(i)).log_value - t);  // e^{−rt} u
        worst = std::max(worst, std::abs(series_norm - un.values[i]));
    }
    o.detail << "series vs normalized PDE max abs " << worst;
    o.require(worst <= 1e-4, "PDE agreement 1e-4");
    int k_ok = 0;
    const double probes[5] = {-2.0, 0.0, 2.0, 4.0, 7.0};
    for (int j = 0; j < 5; ++j) {
        const auto mc = oracle::jump_process_u(oracle::Jump::Gaussian, 1.0, 1.0, t, probes[j], 1000000, 1000 + j);
        const double s = se.u_linear(t, probes[j]).value;
        const double z = std::abs(s - mc.value) / mc.half_width;
        k_ok += z <= 3.0;
        o.detail << (j ? ", " : "; MC |Δ|/hw: ") << z;
    }
    o.require(k_ok == 5, "MC within 3 half-widths at 5 probes");
}

void dominant_block(Outcome& o) {
    for (const Kernel& k : {Kernel::gaussian(1.0), Kernel::laplace(2.0)}) {
        const CumulantFunctions cf(k);
        const SeriesEngine se(cf, critical_speed(cf, 1.0));
        const double a = se.params().alpha;
        const PartialSumReport rep = se.six_part_diagnostic(200.0, 0.0, 0.2, 0.2, 0.5 * a, 2.0 * a);
        const double center = log_add(rep.segments[2].log_sum, rep.segments[3].log_sum);
        const double share = std::exp(center - rep.log_total);
        double gap = 1e300;
        for (std::size_t i : {0u, 1u, 4u, 5u}) gap = std::min(gap, rep.log_total - rep.segments[i].log_sum);
        o.detail << (k.family() == KernelFamily::Gaussian ? "" : "; ") << k.name() << " center share " << share
                 << ", off-center gap " << gap << " nats";
        o.require(share > 0.99, k.name() + " share > 99%");
        o.require(gap >= 5.0, k.name() + " off-center ≥ 5 nats below");
    }
}

void sandwich(Outcome& o) {
    const std::vector<double> ts = {50, 100, 200, 400, 800, 1600};
    for (const Kernel& k : {Kernel::gaussian(1.0), Kernel::laplace(2.0)}) {
        const CumulantFunctions cf(k);
        const SeriesEngine se(cf, critical_speed(cf, 1.0));
        const FrontParams& fp = se.params();
        const auto c0 = se.central_behavior(ts, [](double) { return 0.0; });
        double lo = 1e300, hi = -1e300;
        for (const auto& r : c0) {
            lo = std::min(lo, r.log_u + 0.5 * std::log(r.t));
            hi = std::max(hi, r.log_u + 0.5 * std::log(r.t));
        }
        o.detail << (k.family() == KernelFamily::Gaussian ? "" : "; ") << k.name() << " band ratio " << std::exp(hi - lo);
        o.require(hi - lo <= std::log(5.0), k.name() + " factor-5 band");
        // x_t = ct − β ln t: u → ∞ for β = s + 0.1, → 0 for β = s − 0.1
        for (double sign : {1.0, -1.0}) {
            const double beta = fp.s + 0.1 * sign;
            const auto rows = se.central_behavior(ts, [beta](double t) { return beta * std::log(t); });
            bool mono = true;
            for (std::size_t i = 1; i < rows.size(); ++i)
                mono = mono && (sign > 0 ? rows[i].log_u > rows[i - 1].log_u : rows[i].log_u < rows[i - 1].log_u);
            o.detail << ", β=s" << (sign > 0 ? "+" : "−") << "0.1 log u " << rows.front().log_u << "→" << rows.back().log_u;
            o.require(mono, k.name() + " dichotomy trend");
        }
    }
}

void delay_slope(Outcome& o) {
    const auto ts = log_spaced_times(100.0, 6400.0, 13);
    for (const Kernel& k : {Kernel::gaussian(1.0), Kernel::laplace(2.0)}) {
        const CumulantFunctions cf(k);
        const SeriesEngine se(cf, critical_speed(cf, 1.0));
        const DelayFit fit = delay_fit(series_trace(se, 1.0, ts, 4), se.params());
        o.detail << (k.family() == KernelFamily::Gaussian ? "" : "; ") << k.name() << " s_hat " << fit.s_hat << " vs "
                 << fit.s_theory << " (rel " << fit.relative_error() << ")";
        o.require(fit.relative_error() <= 0.15, k.name() + " within 15%");
    }
}

void nonlinear_bound(Outcome& o) {
    const DelayBoundReport rep = delay_bound_check(Kernel::gaussian(1.0), ReactionTerm::logistic(1.0), 0.05,
                                                   log_spaced_times(20.0, 160.0, 7), 0.5);
    o.detail << "min slack σ−θ " << rep.min_slack << ", max(v−u) " << rep.max_excess << " over " << rep.rows.size()
             << " probes";
    o.require(rep.kpp, "KPP flag");
    o.require(rep.min_slack >= -1e-6, "θ ≤ σ with slack ≥ −1e−6");
    o.require(rep.max_excess <= 1e-6, "v ≤ u within 1e−6");
}

void determinism(Outcome& o) {
    const fs::path root = fs::temp_directory_path() / "nlfront_acceptance_det";
    fs::remove_all(root);
    fs::create_directories(root);
    {
        std::ofstream cfg(root / "run.cfg");
        cfg << "kernel = laplace:2\nr = 1\nseed = 77\n[analysis]\nrho = 1, 0.5\nt_min = 100\nt_max = 1600\npoints = 9\n";
    }
    const std::string cfg = (root / "run.cfg").string();
    const CliResult a = run_nlfront("--threads 1 reproduce-theorem --config '" + cfg + "'", root.string(),
                                    "NLFRONT_OUTPUT_DIR='" + (root / "a").string() + "'");
    const CliResult b = run_nlfront("--threads 4 reproduce-theorem --config '" + cfg + "'", root.string(),
                                    "NLFRONT_OUTPUT_DIR='" + (root / "b").string() + "'");
    o.require(a.code == 0 && b.code == 0, "both runs succeed");
    bool same = true;
    std::size_t bytes = 0;
    for (const char* f : {"trace.csv", "report.csv"}) {
        const std::string x = slurp((root / "a" / f).string()), y = slurp((root / "b" / f).string());
        same = same && !x.empty() && x == y;
        bytes += x.size();
    }
    o.detail << "trace.csv + report.csv " << bytes << " bytes, identical: " << (same ? "yes" : "no");
    o.require(same, "byte-identical CSVs");
    fs::remove_all(root);
}

}  // namespace

int main() {
    const std::vector<Criterion> all = {
        {1, "front constants", 2.0, front_constants},
        {2, "rate function", 5.0, rate_function},
        {3, "Bahadur-Rao envelope", 10.0, bahadur_rao},
        {4, "series/PDE/jump-process triangle", 300.0, triangle},
        {5, "dominant block", 60.0, dominant_block},
        {6, "sandwich and dichotomy", 120.0, sandwich},
        {7, "delay slope", 600.0, delay_slope},
        {8, "nonlinear bound", 600.0, nonlinear_bound},
        {9, "determinism", 600.0, determinism},
    };
    int failures = 0;
    for (const auto& c : all) {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.body(o);
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        o.require(secs <= c.budget_s, "runtime budget " + std::to_string(c.budget_s) + " s");
        failures += !o.pass;
        std::printf("%s criterion %d (%s): %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.title.c_str(),
                    o.detail.str().c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(all.size()) - failures, all.size());
    return failures == 0 ? 0 : 1;
}
