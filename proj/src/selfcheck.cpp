#include "nlfront/selfcheck.hpp"

#include <cmath>
#include <cstdio>

#include "nlfront/errors.hpp"
#include "nlfront/front_analysis.hpp"
#include "nlfront/front_theory.hpp"
#include "nlfront/pde.hpp"
#include "nlfront/series.hpp"
#include "nlfront/tail_oracle.hpp"

namespace nlfront {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

// max of λz − Λ(λ) by golden section on a bracket of the concave objective
double legendre_sup(const CumulantFunctions& cf, double z) {
    const double bound = std::isfinite(cf.domain_bound()) ? 0.999999 * cf.domain_bound() : kInf;
    auto obj = [&](double l) { return l * z - cf.lambda_cgf(l); };
    double a = 0.0, b = z >= 0 ? 1.0 : -1.0;
    while (std::abs(b) < bound && obj(b) > obj(b / 2.0)) b *= 2.0;
    b = std::copysign(std::min(std::abs(b), bound), b);
    double lo = std::min(a, b), hi = std::max(a, b);
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = obj(x1), f2 = obj(x2);
    for (int i = 0; i < 200 && hi - lo > 1e-12 * (1.0 + std::abs(hi)); ++i) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = obj(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = obj(x1);
        }
    }
    return std::max(f1, f2);
}

}  // namespace

std::vector<Kernel> bundled_kernels() {
    std::vector<Kernel> ks = {Kernel::gaussian(1.0), Kernel::laplace(2.0), Kernel::uniform(1.0),
                              Kernel::truncated_gaussian(1.0, 2.5)};
    std::vector<double> x, v;
    for (int i = -800; i <= 800; ++i) {
        const double xi = i * 0.01;
        x.push_back(xi);
        v.push_back(std::exp(-0.5 * xi * xi));
    }
    ks.push_back(Kernel::tabulated(std::move(x), std::move(v)));
    return ks;
}

RateFunctionCheck check_rate_function(const CumulantFunctions& cf, std::size_t points) {
    RateFunctionCheck out;
    const double sd = std::sqrt(cf.kernel().variance());
    out.z_range = std::min(3.0 * sd, 0.9 * cf.z_limit());
    out.points = points;
    for (std::size_t i = 0; i < points; ++i) {
        const double z = -out.z_range + 2.0 * out.z_range * static_cast<double>(i) / static_cast<double>(points - 1);
        const SaddlePoint sp = cf.saddle_point(z);
        const double zp = cf.lambda_derivs(sp.zeta).first;
        out.max_roundtrip = std::max(out.max_roundtrip, std::abs(zp - z));
        out.max_legendre_gap = std::max(out.max_legendre_gap, std::abs(sp.rate - legendre_sup(cf, z)));
        const double room = std::isfinite(cf.z_limit()) ? cf.z_limit() - std::abs(z) : kInf;
        const double h = 1e-3 * std::min(1.0 + std::abs(z), room);
        auto rate = [&](double zz) { return cf.rate_function(zz).first; };
        const double fd = (8.0 * (rate(z + h) - rate(z - h)) - (rate(z + 2 * h) - rate(z - 2 * h))) / (12.0 * h);
        out.max_derivative_error = std::max(out.max_derivative_error, std::abs(fd - sp.zeta) / (1.0 + std::abs(sp.zeta)));
    }
    return out;
}

bool SelfCheckReport::ok() const {
    for (const auto& r : rows)
        if (r.fatal && !r.passed) return false;
    return true;
}

SelfCheckReport run_selfcheck() {
    SelfCheckReport rep;
    auto add = [&](std::string group, std::string name, bool passed, std::string detail, bool fatal = true) {
        rep.rows.push_back({std::move(group), std::move(name), passed, fatal, std::move(detail)});
    };
    auto guarded = [&](const std::string& group, const std::string& name, auto&& body) {
        try {
            body();
        } catch (const std::exception& e) {
            add(group, name, false, std::string("error: ") + e.what());
        }
    };

    for (const Kernel& k : bundled_kernels()) {
        const std::string kn = k.name();
        guarded(kn, "hypotheses", [&] {
            const ValidationReport vr = validate_hypotheses(k);
            for (const auto& c : vr.checks) add(kn, "hypothesis." + c.name, c.passed, c.detail, c.name != "continuity");
        });
        guarded(kn, "mgf", [&] {
            const double lam = std::isfinite(k.mgf_domain_bound()) ? 0.5 * k.mgf_domain_bound() : 1.0;
            const double a = k.mgf(lam), b = k.mgf_quadrature(lam);
            const double err = std::abs(a - b) / b;
            add(kn, "mgf.closed_vs_quadrature", err < 1e-8, "rel " + num(err));
        });
        guarded(kn, "rate_function", [&] {
            const CumulantFunctions cf(k);
            const RateFunctionCheck rc = check_rate_function(cf);
            add(kn, "rate.roundtrip", rc.max_roundtrip < 1e-9, num(rc.max_roundtrip));
            add(kn, "rate.legendre", rc.max_legendre_gap < 1e-8, num(rc.max_legendre_gap));
            add(kn, "rate.derivative", rc.max_derivative_error < 1e-6, num(rc.max_derivative_error));
        });
        guarded(kn, "front", [&] {
            const CumulantFunctions cf(k);
            const FrontParams fp = critical_speed(cf, 1.0);
            const FrontResiduals res = front_residuals(cf, fp);
            const double worst = std::max({std::abs(res.speed), std::abs(res.alpha), std::abs(res.first_order),
                                           std::abs(res.tilt_identity)});
            add(kn, "front.residuals", worst < 1e-9, "c=" + num(fp.c) + " max residual " + num(worst));
        });
    }

    guarded("tail", "bahadur_rao_gaussian", [&] {
        const CumulantFunctions cf(Kernel::gaussian(1.0));
        const double exact = normal_sf(0.5 * std::sqrt(100.0));
        const double ratio = tail_bahadur_rao(cf, 100, 50.0).value / exact;
        add("tail", "bahadur_rao.ratio_n100", std::abs(ratio - 1.037) < 0.005, "ratio " + num(ratio));
    });
    guarded("tail", "convolution_gaussian", [&] {
        const CumulantFunctions cf(Kernel::gaussian(1.0));
        const double exact = normal_sf(25.0 / std::sqrt(50.0));
        const double err = std::abs(tail_convolution(cf, 50, 25.0).value / exact - 1.0);
        add("tail", "convolution.gaussian_n50", err < 1e-8, "rel " + num(err));
    });
    guarded("tail", "backends_laplace", [&] {
        const CumulantFunctions cf(Kernel::laplace(2.0));
        const double a = tail_convolution(cf, 400, 200.0).log_value;
        const double b = tail_bahadur_rao(cf, 400, 200.0).log_value;
        add("tail", "backends.laplace_n400", std::abs(a - b) < 0.01, "log diff " + num(a - b));
    });
    guarded("series", "normalization", [&] {
        const CumulantFunctions cf(Kernel::gaussian(1.0));
        const SeriesEngine se(cf, critical_speed(cf, 1.0));
        const double err = std::abs(se.u_linear(5.0, -1e6).log_value - 5.0);
        add("series", "series.far_left", err < 1e-10, "log err " + num(err));
    });
    guarded("pde", "steady_states", [&] {
        const Kernel k = Kernel::gaussian(1.0);
        EvolveOptions opts;
        opts.check_guard = false;
        Field one = Field::step(-10.0, 10.0, 0.1, Frame::Raw);
        Field zero = one;
        std::fill(one.values.begin(), one.values.end(), 1.0);
        std::fill(zero.values.begin(), zero.values.end(), 0.0);
        opts.left_pad = opts.right_pad = 1.0;
        one = evolve(one, k, ReactionTerm::logistic(1.0), 0.05, 2.0, opts);
        opts.left_pad = opts.right_pad = 0.0;
        zero = evolve(zero, k, ReactionTerm::logistic(1.0), 0.05, 2.0, opts);
        double d1 = 0.0, d0 = 0.0;
        for (double v : one.values) d1 = std::max(d1, std::abs(v - 1.0));
        for (double v : zero.values) d0 = std::max(d0, std::abs(v));
        add("pde", "pde.steady_one", d1 < 1e-12, num(d1));
        add("pde", "pde.steady_zero", d0 < 1e-12, num(d0));
    });
    guarded("pde", "kpp_flag", [&] {
        std::vector<double> f(101);
        for (int i = 0; i <= 100; ++i) {
            const double u = i / 100.0;
            f[i] = u * (1.0 - u) * (0.2 + u);  // f'(0) = 0.2 but f(u) > 0.2u near u = 0.5
        }
        const ComparisonReport cr =
            comparison_check(Kernel::gaussian(1.0), ReactionTerm::custom(f), 0.05, 1.0, {1.0});
        add("pde", "comparison.refuses_non_kpp", !cr.certified && !cr.kpp, cr.note);
    });
    guarded("analysis", "synthetic_fit", [&] {
        FrontParams fp;
        fp.c = 1.5;
        fp.s = 0.5;
        FrontTrace tr;
        tr.times = log_spaced_times(10.0, 1000.0, 10);
        for (double t : tr.times) tr.positions.push_back(fp.c * t - 0.5 * std::log(t) + 0.3);
        const DelayFit fit = delay_fit(tr, fp);
        const double err = std::max(std::abs(fit.s_hat - 0.5), std::abs(fit.intercept + 0.3));
        add("analysis", "delay_fit.synthetic", err < 1e-10, num(err));
    });
    return rep;
}

}  // namespace nlfront
