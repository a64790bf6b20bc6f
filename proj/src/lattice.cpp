#include "nlfront/lattice.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

#include "nlfront/errors.hpp"
#include "nlfront/numeric.hpp"

namespace nlfront {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

bool on_node(double x, double h) { return std::abs(x / h - std::round(x / h)) < 1e-9; }

constexpr std::size_t kMaxNodes = std::size_t{1} << 22;

}  // namespace

KernelLattice discretize_kernel(const Kernel& kernel, double theta, double h) {
    if (!(h > 0.0)) throw DomainError("discretize_kernel: spacing must be positive");
    const auto [lo, hi] = kernel.tilted_range(theta);
    const long first = static_cast<long>(std::floor(lo / h));
    const long last = static_cast<long>(std::ceil(hi / h));
    if (static_cast<std::size_t>(last - first + 1) > kMaxNodes)
        throw GridError("discretize_kernel: lattice too fine for the kernel range");

    KernelLattice lat;
    lat.h = h;
    lat.first = first;
    const std::size_t count = static_cast<std::size_t>(last - first + 1);
    std::vector<double> logf(count, kLogZero);
    double shift = kLogZero;
    for (std::size_t i = 0; i < count; ++i) {
        const double x = static_cast<double>(first + static_cast<long>(i)) * h;
        const double ld = kernel.log_density(x);
        if (ld != kLogZero) {
            logf[i] = theta * x + ld;
            shift = std::max(shift, logf[i]);
        }
    }
    // Corrections reach two nodes to each side, so neighbouring singular points must be >= 4h apart.
    const auto singular = kernel.singular_points();
    std::vector<double> xs;
    for (const auto& sp : singular) xs.push_back(sp.x);
    std::sort(xs.begin(), xs.end());
    bool separated = true;
    for (std::size_t i = 1; i < xs.size(); ++i) separated = separated && xs[i] - xs[i - 1] >= 4.0 * h * (1 - 1e-9);
    lat.corrected =
        separated && std::all_of(singular.begin(), singular.end(), [h](const auto& sp) { return on_node(sp.x, h); });
    for (const auto& sp : singular) {
        const double top = std::max(sp.mid_value + 0.5 * std::abs(sp.value_jump), 1e-300);
        shift = std::max(shift, theta * sp.x + std::log(top));
    }
    if (shift == kLogZero) throw DomainError("discretize_kernel: kernel has no mass on the lattice");

    std::vector<double> f(count, 0.0);
    for (std::size_t i = 0; i < count; ++i)
        if (logf[i] != kLogZero) f[i] = std::exp(logf[i] - shift);
    lat.mass.assign(count, 0.0);
    for (std::size_t i = 0; i < count; ++i) lat.mass[i] = h * f[i];
    if (lat.corrected) {
        // One-sided fourth-order Gregory end weights 3/8, 7/6, 23/24 on each side of the singular node.
        for (const auto& sp : singular) {
            const long node = std::lround(sp.x / h);
            const double e = std::exp(theta * sp.x - shift);
            const double left = e * (sp.mid_value - 0.5 * sp.value_jump);
            const double right = e * (sp.mid_value + 0.5 * sp.value_jump);
            auto at = [&](long j) -> double* {
                if (j < first || j > last) return nullptr;
                return &lat.mass[static_cast<std::size_t>(j - first)];
            };
            if (double* m = at(node)) *m = h * 0.375 * (left + right);
            for (int side : {-1, 1}) {
                if (double* m = at(node + side)) *m += h / 6.0 * f[static_cast<std::size_t>(node + side - first)];
                if (double* m = at(node + 2 * side))
                    *m -= h / 24.0 * f[static_cast<std::size_t>(node + 2 * side - first)];
            }
        }
    }

    double total = 0.0;
    for (double m : lat.mass) total += m;
    if (!(total > 0.0)) throw DomainError("discretize_kernel: vanishing lattice mass");
    double mean = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        lat.mass[i] /= total;
        mean += lat.mass[i] * static_cast<double>(first + static_cast<long>(i)) * h;
    }
    double var = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const double d = static_cast<double>(first + static_cast<long>(i)) * h - mean;
        var += lat.mass[i] * d * d;
    }
    lat.mean = mean;
    lat.variance = var;
    return lat;
}

double singular_base_spacing(const Kernel& kernel) {
    const auto pts = kernel.singular_points();
    std::vector<double> xs;
    for (const auto& p : pts) xs.push_back(p.x);
    std::sort(xs.begin(), xs.end());
    double d = kInf;
    for (double x : xs)
        if (std::abs(x) > 0.0) d = std::min(d, std::abs(x));
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (xs[i] > xs[i - 1]) d = std::min(d, xs[i] - xs[i - 1]);
    if (!std::isfinite(d)) return 0.0;  // only a singular point at 0 (or none)
    for (int k = 0; k < 12; ++k, d *= 0.5) {
        if (std::all_of(xs.begin(), xs.end(), [d](double x) { return on_node(x, d); })) return d;
    }
    return 0.0;
}

double lattice_spacing(const CumulantFunctions& cf, double theta) {
    const Kernel& k = cf.kernel();
    const double target = cf.lambda_derivs(theta).second;
    const double scale = std::sqrt(target);
    double h = 0.5 * scale;
    const double base = singular_base_spacing(k);
    if (base > 0.0) {
        double b = 0.25 * base;
        while (b > h) b *= 0.5;
        h = b;
    }
    double best = h;
    for (int k2 = 0; k2 < 16; ++k2, h *= 0.5) {
        KernelLattice lat;
        try {
            lat = discretize_kernel(k, theta, h);
        } catch (const GridError&) {
            break;
        }
        best = h;
        if (std::abs(lat.variance - target) <= 1e-8 * target) break;
    }
    return best;
}

RealFFT::RealFFT(std::size_t n) : n_(n) {
    if (n < 2) throw DomainError("RealFFT: length must be at least 2");
    real_ = fftw_alloc_real(n);
    spec_ = fftw_alloc_complex(n / 2 + 1);
    std::lock_guard lock(planner_mutex());
    plan_fwd_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), real_, static_cast<fftw_complex*>(spec_), FFTW_ESTIMATE);
    plan_bwd_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), static_cast<fftw_complex*>(spec_), real_, FFTW_ESTIMATE);
}

RealFFT::~RealFFT() {
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
        fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
    }
    fftw_free(real_);
    fftw_free(spec_);
}

void RealFFT::forward() { fftw_execute(static_cast<fftw_plan>(plan_fwd_)); }
void RealFFT::backward() { fftw_execute(static_cast<fftw_plan>(plan_bwd_)); }

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

std::complex<double> ipow(std::complex<double> z, unsigned long n) {
    std::complex<double> acc(1.0, 0.0);
    while (n > 0) {
        if (n & 1UL) acc *= z;
        n >>= 1;
        if (n > 0) z *= z;
    }
    return acc;
}

}  // namespace nlfront
