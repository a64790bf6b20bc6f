#pragma once

#include <map>
#include <memory>
#include <shared_mutex>
#include <utility>

#include "nlfront/kernel.hpp"

namespace nlfront {

/// Everything known about the tilt that solves Λ'(ζ) = z.
struct SaddlePoint {
    double z = 0.0;
    double zeta = 0.0;       ///< ζ_m(z)
    double cgf = 0.0;        ///< Λ(ζ)
    double cgf_pp = 0.0;     ///< Λ''(ζ)
    double rate = 0.0;       ///< Λ*(z) = ζz − Λ(ζ)
    int iterations = 0;
};

/// Λ = ln M for a kernel, its derivatives, the saddle map and the rate function.
class CumulantFunctions {
public:
    explicit CumulantFunctions(Kernel kernel);

    const Kernel& kernel() const { return kernel_; }

    /// Half-width of the domain D of Λ (L_max).
    double domain_bound() const { return kernel_.mgf_domain_bound(); }
    /// Half-width of the natural domain D* of Λ* (A = sup supp J).
    double dstar_bound() const { return kernel_.support_sup(); }
    /// Largest |z| accepted by saddle(): 0.999 A for compact kernels, the image
    /// of 0.999 L_max for kernels with a finite mgf bound, else +inf.
    double z_limit() const { return z_limit_; }

    double lambda_cgf(double zeta) const;
    /// (Λ'(ζ), Λ''(ζ)) from exponentially weighted moments.
    std::pair<double, double> lambda_derivs(double zeta) const;

    double saddle(double z) const { return saddle_point(z).zeta; }
    SaddlePoint saddle_point(double z) const;
    /// (Λ*(z), (Λ*)'(z) = ζ_m(z)).
    std::pair<double, double> rate_function(double z) const;

    /// Drop memoized saddle solves.
    void clear_cache() const;

private:
    SaddlePoint solve(double z) const;

    Kernel kernel_;
    double z_limit_;
    // Exact-key memo: a hit returns the same bits a fresh solve would.
    struct Memo {
        std::shared_mutex mutex;
        std::map<double, SaddlePoint> table;
    };
    std::shared_ptr<Memo> memo_;
};

}  // namespace nlfront
