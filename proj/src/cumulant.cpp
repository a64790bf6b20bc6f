#include "nlfront/cumulant.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include "nlfront/errors.hpp"
#include "nlfront/numeric.hpp"

namespace nlfront {

namespace {

constexpr int kMaxIterations = 200;
constexpr double kEdgeFraction = 0.999;
constexpr std::size_t kMemoCapacity = 1 << 18;

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

}  // namespace

CumulantFunctions::CumulantFunctions(Kernel kernel)
    : kernel_(std::move(kernel)), z_limit_(kInf), memo_(std::make_shared<Memo>()) {
    const double a = kernel_.support_sup();
    if (std::isfinite(a)) {
        z_limit_ = kEdgeFraction * a;
    } else if (kernel_.family() == KernelFamily::Tabulated && std::isfinite(kernel_.mgf_domain_bound())) {
        z_limit_ = lambda_derivs(kEdgeFraction * kernel_.mgf_domain_bound()).first;
    }
}

double CumulantFunctions::lambda_cgf(double zeta) const { return kernel_.log_mgf(zeta); }

std::pair<double, double> CumulantFunctions::lambda_derivs(double zeta) const {
    if (std::abs(zeta) >= domain_bound())
        throw DomainError("cumulant: zeta = " + fmt(zeta) + " outside D = (-" + fmt(domain_bound()) + ", " +
                          fmt(domain_bound()) + ")");
    const auto wm = kernel_.weighted_moments(zeta);
    return {wm.mean(), wm.variance()};
}

SaddlePoint CumulantFunctions::saddle_point(double z) const {
    if (!std::isfinite(z) || std::abs(z) > z_limit_)
        throw DomainError("saddle: z = " + fmt(z) + " outside the usable range |z| <= " + fmt(z_limit_));
    {
        std::shared_lock lock(memo_->mutex);
        auto it = memo_->table.find(z);
        if (it != memo_->table.end()) return it->second;
    }
    SaddlePoint sp = solve(std::abs(z));
    if (z < 0) {
        sp.z = z;
        sp.zeta = -sp.zeta;
    }
    std::unique_lock lock(memo_->mutex);
    if (memo_->table.size() >= kMemoCapacity) memo_->table.clear();
    memo_->table.emplace(z, sp);
    return sp;
}

SaddlePoint CumulantFunctions::solve(double z) const {
    SaddlePoint sp;
    sp.z = z;
    if (z == 0.0) {
        sp.cgf_pp = lambda_derivs(0.0).second;
        return sp;
    }
    const double tol = 1e-12 * std::max(1.0, z);
    const double bound = domain_bound();

    // Bracket [lo, hi] with Λ'(lo) < z < Λ'(hi); Λ' is odd and increasing.
    double lo = 0.0, hi = 0.0;
    double d_hi = 0.0, dd_hi = 0.0;
    const double var0 = lambda_derivs(0.0).second;
    double guess = z / var0;
    if (std::isfinite(bound)) {
        guess = std::min(guess, 0.5 * bound);
        hi = guess;
        for (int k = 0;; ++k) {
            std::tie(d_hi, dd_hi) = lambda_derivs(hi);
            if (d_hi > z) break;
            lo = hi;
            hi = 0.5 * (hi + bound);
            if (k > 60) throw ConvergenceError("saddle: no bracket below the mgf bound for z = " + fmt(z));
        }
    } else {
        hi = std::max(guess, 1e-3);
        for (int k = 0;; ++k) {
            std::tie(d_hi, dd_hi) = lambda_derivs(hi);
            if (d_hi > z) break;
            lo = hi;
            hi *= 2.0;
            if (k > 200) throw ConvergenceError("saddle: no bracket for z = " + fmt(z));
        }
    }

    double zeta = std::clamp(guess, lo, hi);
    if (zeta == hi && lo < hi) zeta = 0.5 * (lo + hi);
    for (int it = 1; it <= kMaxIterations; ++it) {
        const auto [d1, d2] = lambda_derivs(zeta);
        const double res = d1 - z;
        if (std::abs(res) < tol) {
            sp.zeta = zeta;
            sp.cgf = lambda_cgf(zeta);
            sp.cgf_pp = d2;
            sp.rate = zeta * z - sp.cgf;
            sp.iterations = it;
            return sp;
        }
        if (res < 0)
            lo = zeta;
        else
            hi = zeta;
        double next = zeta - res / d2;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == zeta) break;
        zeta = next;
    }
    throw ConvergenceError("saddle: residual target not met for z = " + fmt(z));
}

std::pair<double, double> CumulantFunctions::rate_function(double z) const {
    const auto sp = saddle_point(z);
    return {sp.rate, sp.zeta};
}

void CumulantFunctions::clear_cache() const {
    std::unique_lock lock(memo_->mutex);
    memo_->table.clear();
}

}  // namespace nlfront
