#include "nlfront/front_theory.hpp"

#include <cmath>

#include "nlfront/errors.hpp"
#include "nlfront/numeric.hpp"

namespace nlfront {

namespace {

struct MgfDerivs {
    double m, m1, m2;  // M, M', M''
};

MgfDerivs mgf_derivs(const CumulantFunctions& cf, double lambda) {
    const double m = std::exp(cf.lambda_cgf(lambda));
    const auto [d1, d2] = cf.lambda_derivs(lambda);
    return {m, m * d1, m * (d2 + d1 * d1)};
}

}  // namespace

FrontParams critical_speed(const CumulantFunctions& cf, double r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("critical_speed: r must be positive");
    const double bound = cf.domain_bound();
    // N(λ) = λM' − M − (r−1) has the sign of A'(λ); N(0) = −r < 0 and N is increasing.
    auto foc = [&](double lambda) {
        const auto d = mgf_derivs(cf, lambda);
        return lambda * d.m1 - d.m - (r - 1.0);
    };
    auto objective = [&](double lambda) { return (std::exp(cf.lambda_cgf(lambda)) + r - 1.0) / lambda; };

    double lo = 0.0;
    double hi = std::isfinite(bound) ? std::min(1.0, 0.5 * bound) : 1.0;
    for (int k = 0; foc(hi) <= 0.0; ++k) {
        lo = hi;
        hi = std::isfinite(bound) ? 0.5 * (hi + bound) : 2.0 * hi;
        if (k > 200) throw ConvergenceError("critical_speed: no interior minimizer found");
    }
    if (lo == 0.0) {
        lo = 0.5 * hi;
        for (int k = 0; foc(lo) >= 0.0; ++k) {
            hi = lo;
            lo *= 0.5;
            if (k > 200) throw ConvergenceError("critical_speed: minimizer collapses to 0");
        }
    }

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
    double f1 = objective(x1), f2 = objective(x2);
    while (b - a > 1e-6 * hi) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = objective(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = objective(x2);
        }
    }

    double lambda = 0.5 * (a + b);
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
        const auto d = mgf_derivs(cf, lambda);
        const double n = lambda * d.m1 - d.m - (r - 1.0);
        if (std::abs(n) < 1e-14 * (d.m + std::abs(r - 1.0))) {
            converged = true;
            break;
        }
        if (n < 0)
            lo = std::max(lo, lambda);
        else
            hi = std::min(hi, lambda);
        double next = lambda - n / (lambda * d.m2);
        if (!(next >= lo && next <= hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - lambda) <= 1e-15 * lambda) {
            lambda = next;
            converged = true;
            break;
        }
        lambda = next;
    }
    if (!converged) throw ConvergenceError("critical_speed: Newton polish did not converge");

    FrontParams fp;
    fp.r = r;
    fp.lambda_r = lambda;
    const double m = std::exp(cf.lambda_cgf(lambda));
    fp.c = (m + r - 1.0) / lambda;
    fp.alpha = fp.c * lambda - (r - 1.0);
    fp.s = 0.5 / lambda;
    return fp;
}

FrontResiduals front_residuals(const CumulantFunctions& cf, const FrontParams& fp) {
    const auto d = mgf_derivs(cf, fp.lambda_r);
    FrontResiduals res;
    res.speed = (fp.c - (d.m + fp.r - 1.0) / fp.lambda_r) / fp.c;
    res.alpha = (fp.alpha - d.m) / fp.alpha;
    res.first_order = fp.lambda_r * d.m1 - d.m - (fp.r - 1.0);
    res.tilt_identity = fp.lambda_r - cf.rate_function(fp.c / fp.alpha).second;
    return res;
}

double g_domain_min(const FrontParams& fp, const CumulantFunctions& cf) {
    const double zl = cf.z_limit();
    return std::isfinite(zl) ? fp.c / zl : 0.0;
}

double g_function(const FrontParams& fp, const CumulantFunctions& cf, double y) {
    if (!(y > 0.0)) throw DomainError("g: y must be positive");
    if (y < g_domain_min(fp, cf)) throw DomainError("g: c/y outside the domain of the rate function");
    const double rate = cf.rate_function(fp.c / y).first;
    return y * (1.0 - std::log(y) - rate) + fp.r - 1.0;
}

double g_derivative(const FrontParams& fp, const CumulantFunctions& cf, double y) {
    if (!(y > 0.0)) throw DomainError("g': y must be positive");
    if (y < g_domain_min(fp, cf)) throw DomainError("g': c/y outside the domain of the rate function");
    const double z = fp.c / y;
    const auto [rate, zeta] = cf.rate_function(z);
    return -std::log(y) - rate + z * zeta;
}

LogValue h_weight(const FrontParams& fp, const CumulantFunctions& cf, double s_anchor, double t, double y,
                  double m_t) {
    if (!(t > 0.0)) throw DomainError("h: t must be positive");
    if (!(s_anchor > 0.0) || s_anchor < g_domain_min(fp, cf)) throw DomainError("h: anchor outside domain");
    const double tilt = cf.rate_function(fp.c / s_anchor).second;
    const double lv = tilt * m_t - std::log(t) + t * g_function(fp, cf, y);
    return {lv, std::exp(lv)};
}

double local_delay_constant(double r) {
    if (!(r > 0.0)) throw DomainError("local delay constant needs r > 0");
    return 0.5 / std::sqrt(r);
}

}  // namespace nlfront
