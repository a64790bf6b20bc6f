#include "nlfront/tail_oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "nlfront/errors.hpp"
#include "nlfront/lattice.hpp"
#include "nlfront/numeric.hpp"
#include "nlfront/quadrature.hpp"

namespace nlfront {

namespace {

constexpr double kSdWidth = 12.0;
constexpr double kAliasTol = 1e-12;
constexpr double kMaxTiltStep = 0.25;
constexpr double kNodesPerSd = 32.0;
constexpr std::size_t kMaxGrid = std::size_t{1} << 24;

constexpr std::array<double, 4> kGlNode = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                           0.8611363115940526};
constexpr std::array<double, 4> kGlWeight = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                             0.3478548451374538};

// Quintic Lagrange basis on nodes -2..3 evaluated at u.
std::array<double, 6> quintic_basis(double u) {
    std::array<double, 6> l{};
    for (int i = 0; i < 6; ++i) {
        double num = 1.0, den = 1.0;
        for (int j = 0; j < 6; ++j) {
            if (j == i) continue;
            num *= u - (j - 2);
            den *= i - j;
        }
        l[static_cast<std::size_t>(i)] = num / den;
    }
    return l;
}

TailEstimate make_estimate(double log_value, TailBackend backend) {
    TailEstimate e;
    e.backend = backend;
    e.log_value = log_value;
    e.value = std::exp(std::min(log_value, 0.0));
    e.exceeds_one = log_value > 0.0;
    return e;
}

// ∫_x^∞ e^{−θ(y−x)} g(y) dy for lattice density samples g = mass/h, with the
// density interpolated by quintics between nodes and integrated by 4-point Gauss.
double tilted_tail_integral(const WalkLaw& law, double x, double theta) {
    const double h = law.h;
    const long n = static_cast<long>(law.mass.size());
    auto g = [&](long k) {
        const long i = k - law.first;
        return (i >= 0 && i < n) ? law.mass[static_cast<std::size_t>(i)] / h : 0.0;
    };
    auto dot = [&](const std::array<double, 6>& l, long k) {
        double v = 0.0;
        for (int i = 0; i < 6; ++i) v += l[static_cast<std::size_t>(i)] * g(k - 2 + i);
        return v;
    };
    const long m = static_cast<long>(std::floor(x / h));
    if (m - 2 < law.first || m + 3 > law.first + n - 1)
        throw GridError("tail_convolution: threshold outside the convolution window");

    double total = 0.0;
    {
        // Partial first cell [x, y_{m+1}].
        const double y0 = static_cast<double>(m) * h;
        const double a = x, b = static_cast<double>(m + 1) * h;
        const double half = 0.5 * (b - a);
        for (std::size_t q = 0; q < 4; ++q) {
            const double y = 0.5 * (a + b) + half * kGlNode[q];
            total += half * kGlWeight[q] * std::exp(-theta * (y - x)) * dot(quintic_basis((y - y0) / h), m);
        }
    }
    // Whole cells share the basis and exponential factors.
    std::array<double, 6> w{};
    for (std::size_t q = 0; q < 4; ++q) {
        const double u = 0.5 + 0.5 * kGlNode[q];
        const auto l = quintic_basis(u);
        const double d = std::exp(-theta * h * u) * 0.5 * h * kGlWeight[q];
        for (std::size_t i = 0; i < 6; ++i) w[i] += d * l[i];
    }
    const long last_cell = law.first + n - 4;
    double cell_factor = std::exp(-theta * (static_cast<double>(m + 1) * h - x));
    const double step = std::exp(-theta * h);
    for (long k = m + 1; k <= last_cell; ++k) {
        total += cell_factor * dot(w, k);
        cell_factor *= step;
        if (cell_factor < 1e-300) break;
    }
    return total;
}

TailEstimate tail_single_step(const CumulantFunctions& cf, double x) {
    const Kernel& k = cf.kernel();
    const double sup = k.support_sup();
    if (x >= sup) return make_estimate(kLogZero, TailBackend::ConvolutionExact);
    // Integrate e^{log J(y) − log J(x)} over [x, x + reach], reach set by the local decay.
    const double zeta = cf.saddle(std::min(x, cf.z_limit()));
    const double hi0 = k.tilted_range(0.0).second;
    double b = std::max(hi0, x + 40.0 * k.scale());
    if (zeta > 0.0) b = std::min(b, x + std::max(45.0 / zeta, 9.0 * k.scale()));
    b = std::min(b, sup);
    const double ref = k.log_density(x) != kLogZero ? k.log_density(x) : 0.0;
    const auto bps = k.breakpoints();
    std::vector<double> inner;
    for (double p : bps)
        if (p > x && p < b) inner.push_back(p);
    const double v = quad::integrate_scalar(
        [&](double y) {
            const double ld = k.log_density(y);
            return ld == kLogZero ? 0.0 : std::exp(ld - ref);
        },
        x, b, inner, 1e-13);
    return make_estimate(ref + std::log(v), TailBackend::ConvolutionExact);
}

}  // namespace

std::string to_string(TailBackend b) {
    switch (b) {
        case TailBackend::ConvolutionExact:
            return "convolution";
        case TailBackend::BahadurRao:
            return "bahadur-rao";
        case TailBackend::TiltedMC:
            return "tilted-mc";
    }
    return "unknown";
}

TailBackend parse_tail_backend(const std::string& name) {
    if (name == "convolution" || name == "exact") return TailBackend::ConvolutionExact;
    if (name == "bahadur-rao" || name == "br") return TailBackend::BahadurRao;
    if (name == "tilted-mc" || name == "mc") return TailBackend::TiltedMC;
    throw ConfigError("unknown tail backend '" + name + "'");
}

WalkLaw walk_law(const CumulantFunctions& cf, long n, double theta, double center, const GridSpec& grid) {
    if (n < 1) throw DomainError("walk_law: n must be >= 1");
    double h = grid.spacing;
    if (h == 0.0) {
        // Resolve the kernel, the exponential weight and the law of S_n itself.
        h = lattice_spacing(cf, theta);
        const double sd_n = std::sqrt(static_cast<double>(n) * cf.lambda_derivs(theta).second);
        while (h * std::abs(theta) > kMaxTiltStep || h > sd_n / kNodesPerSd) h *= 0.5;
    }
    const KernelLattice lat = discretize_kernel(cf.kernel(), theta, h);
    const double nd = static_cast<double>(n);
    const double mean = nd * lat.mean;
    const double sd = std::sqrt(nd * lat.variance);
    const double kernel_width = static_cast<double>(lat.last() - lat.first + 4) * h;
    const double half_width = kSdWidth * sd + std::abs(center - mean) + kernel_width;

    std::size_t size = grid.size;
    if (size == 0) size = std::max<std::size_t>(64, next_pow2(static_cast<std::size_t>(2.0 * half_width / h) + 8));
    if (size > kMaxGrid) throw GridError("walk_law: convolution grid would exceed 2^24 nodes");
    if (lat.mass.size() >= size) throw GridError("walk_law: grid shorter than the kernel lattice");

    const long mid = std::lround(0.5 * (center + mean) / h);
    WalkLaw law;
    law.h = h;
    law.first = mid - static_cast<long>(size / 2);
    RealFFT fft(size);
    const long ns = static_cast<long>(size);
    std::fill(fft.real(), fft.real() + size, 0.0);
    for (std::size_t j = 0; j < lat.mass.size(); ++j) {
        const long k = lat.first + static_cast<long>(j);
        fft.real()[static_cast<std::size_t>(((k % ns) + ns) % ns)] += lat.mass[j];
    }
    fft.forward();
    auto* spec = fft.spectrum();
    for (std::size_t i = 0; i < fft.spectrum_size(); ++i) spec[i] = ipow(spec[i], static_cast<unsigned long>(n));
    fft.backward();
    law.mass.resize(size);
    const double inv = 1.0 / static_cast<double>(size);
    for (std::size_t i = 0; i < size; ++i) {
        const long k = law.first + static_cast<long>(i);
        law.mass[i] = fft.real()[static_cast<std::size_t>(((k % ns) + ns) % ns)] * inv;
    }
    const std::size_t band = size / 16;
    double outer = 0.0;
    for (std::size_t i = 0; i < band; ++i) outer += std::abs(law.mass[i]) + std::abs(law.mass[size - 1 - i]);
    law.outer_mass = outer;
    return law;
}

TailEstimate tail_convolution(const CumulantFunctions& cf, long n, double x, const GridSpec& grid) {
    if (n < 0) throw DomainError("tail_convolution: n must be >= 0");
    if (!std::isfinite(x)) throw DomainError("tail_convolution: x must be finite");
    if (n == 0) return make_estimate(x <= 0.0 ? 0.0 : kLogZero, TailBackend::ConvolutionExact);
    if (x == 0.0) return make_estimate(-std::numbers::ln2, TailBackend::ConvolutionExact);
    if (x < 0.0) {
        // Symmetry: P(S_n >= x) = 1 − P(S_n >= −x).
        const TailEstimate up = tail_convolution(cf, n, -x, grid);
        return make_estimate(std::log1p(-std::min(up.value, 1.0)), TailBackend::ConvolutionExact);
    }
    if (n == 1) return tail_single_step(cf, x);

    const double nd = static_cast<double>(n);
    const double z = x / nd;
    if (z >= cf.dstar_bound()) return make_estimate(kLogZero, TailBackend::ConvolutionExact);
    const double theta = cf.saddle(std::min(z, cf.z_limit()));

    GridSpec g = grid;
    for (int attempt = 0;; ++attempt) {
        const WalkLaw law = walk_law(cf, n, theta, x, g);
        if (law.outer_mass >= kAliasTol) {
            if (!grid.automatic() || attempt >= 3)
                throw GridError("tail_convolution: aliasing check failed (outer mass " +
                                std::to_string(law.outer_mass) + ")");
            g.spacing = law.h;
            g.size = 2 * law.mass.size();
            continue;
        }
        const double integral = tilted_tail_integral(law, x, theta);
        if (!(integral > 0.0)) return make_estimate(kLogZero, TailBackend::ConvolutionExact);
        return make_estimate(nd * cf.lambda_cgf(theta) - theta * x + std::log(integral),
                             TailBackend::ConvolutionExact);
    }
}

TailEstimate tail_bahadur_rao(const CumulantFunctions& cf, long n, double x) {
    if (n < 1) throw DomainError("tail_bahadur_rao: n must be >= 1");
    const double nd = static_cast<double>(n);
    const double z = x / nd;
    if (!(z > 0.0)) throw DomainError("tail_bahadur_rao: the asymptotic is for z = x/n > 0");
    const SaddlePoint sp = cf.saddle_point(z);
    const double lv =
        -nd * sp.rate - std::log(sp.zeta) - 0.5 * std::log(2.0 * std::numbers::pi * nd * sp.cgf_pp);
    return make_estimate(lv, TailBackend::BahadurRao);
}

TailEstimate tail_tilted_mc(const CumulantFunctions& cf, long n, double x, std::size_t samples, Rng& rng) {
    if (n < 1) throw DomainError("tail_tilted_mc: n must be >= 1");
    if (samples < 2) throw DomainError("tail_tilted_mc: need at least 2 samples");
    const double nd = static_cast<double>(n);
    const double z = x / nd;
    if (std::abs(z) > cf.z_limit()) throw DomainError("tail_tilted_mc: x/n outside the usable range");
    const SaddlePoint sp = cf.saddle_point(z);
    const double theta = sp.zeta;
    TiltedSampler draw(cf.kernel(), theta);
    // Weights exp(nΛ(θ) − θS) are split as exp(nΛ − θx) · exp(−θ(S − x)).
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        double s = 0.0;
        for (long j = 0; j < n; ++j) s += draw(rng);
        if (s >= x) {
            const double w = std::exp(-theta * (s - x));
            sum += w;
            sum_sq += w * w;
        }
    }
    const double ns = static_cast<double>(samples);
    const double mean = sum / ns;
    const double var = std::max(0.0, (sum_sq / ns - mean * mean) * ns / (ns - 1.0));
    const double log_pref = nd * sp.cgf - theta * x;
    TailEstimate e;
    e.backend = TailBackend::TiltedMC;
    e.log_value = mean > 0.0 ? log_pref + std::log(mean) : kLogZero;
    e.value = std::exp(e.log_value);
    e.error_bar = 1.959963984540054 * std::exp(log_pref) * std::sqrt(var / ns);
    return e;
}

}  // namespace nlfront
