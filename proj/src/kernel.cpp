#include "nlfront/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "nlfront/errors.hpp"
#include "nlfront/numeric.hpp"
#include "nlfront/quadrature.hpp"

namespace nlfront {

namespace {

constexpr double kSqrt2Pi = 2.5066282746310002;
// ln(1e17): tails beyond this many e-folds are dropped from quadrature ranges.
constexpr double kTailFolds = 39.14;
constexpr double kGaussTailSigmas = 9.0;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double tab_density(const TabulatedData& t, double x) {
    if (x < t.x.front() || x > t.x.back()) return 0.0;
    auto it = std::upper_bound(t.x.begin(), t.x.end(), x);
    if (it == t.x.end()) return t.value.back();
    const std::size_t i = static_cast<std::size_t>(it - t.x.begin());
    if (i == 0) return t.value.front();
    const double w = (x - t.x[i - 1]) / (t.x[i] - t.x[i - 1]);
    return (1.0 - w) * t.value[i - 1] + w * t.value[i];
}

// Exponential decay rate of the table on one side, measured between two nodes.
double log_slope(const TabulatedData& t, std::size_t i, std::size_t j) {
    if (t.value[i] <= 0.0 || t.value[j] <= 0.0) return 0.0;
    return -(std::log(t.value[j]) - std::log(t.value[i])) / std::abs(t.x[j] - t.x[i]);
}

std::string format_number(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

}  // namespace

double WeightedMoments::log_mass() const { return log_scale + std::log(m[0]); }

Kernel Kernel::gaussian(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("gaussian kernel needs sigma > 0");
    return Kernel(Gaussian{sigma});
}

Kernel Kernel::laplace(double a) {
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("laplace kernel needs a > 0");
    return Kernel(Laplace{a});
}

Kernel Kernel::uniform(double halfwidth) {
    if (!(halfwidth > 0.0) || !std::isfinite(halfwidth)) throw DomainError("uniform kernel needs halfwidth > 0");
    return Kernel(UniformCompact{halfwidth});
}

Kernel Kernel::truncated_gaussian(double sigma, double radius) {
    if (!(sigma > 0.0) || !(radius > 0.0)) throw DomainError("truncated gaussian needs sigma > 0 and radius > 0");
    const double norm = std::erf(radius / (sigma * std::numbers::sqrt2));
    return Kernel(TruncatedGaussian{sigma, radius, norm});
}

Kernel Kernel::tabulated(std::vector<double> x, std::vector<double> values) {
    if (x.size() != values.size() || x.size() < 3) throw DomainError("tabulated kernel needs >= 3 (x, J) pairs");
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(values[i]) || values[i] < 0.0)
            throw DomainError("tabulated kernel values must be finite and nonnegative");
        if (i > 0 && !(x[i] > x[i - 1])) throw DomainError("tabulated kernel grid must be strictly increasing");
    }
    double mass = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) mass += 0.5 * (values[i] + values[i - 1]) * (x[i] - x[i - 1]);
    if (!(mass > 0.0)) throw DomainError("tabulated kernel has zero mass");
    for (double& v : values) v /= mass;

    auto data = std::make_shared<TabulatedData>();
    data->x = std::move(x);
    data->value = std::move(values);
    const auto& t = *data;
    const std::size_t n = t.x.size();
    data->compact = t.value.front() == 0.0 && t.value.back() == 0.0;

    Kernel k(Tabulated{data});
    if (!data->compact) {
        // Decay rate over the outermost ~5% of nodes on each side, and at 75% of the way out.
        const std::size_t span = std::max<std::size_t>(2, n / 20);
        const std::size_t q = n / 8;  // 75% of the half-table from the centre
        const double right_end = log_slope(t, n - 1 - span, n - 1);
        const double left_end = log_slope(t, span, 0);
        const double right_mid = log_slope(t, n - 1 - q - span, n - 1 - q);
        const double left_mid = log_slope(t, q + span, q);
        data->decay_rate = std::min(right_end, left_end);
        const double trend_r = right_mid > 0.0 ? right_end / right_mid : 0.0;
        const double trend_l = left_mid > 0.0 ? left_end / left_mid : 0.0;
        data->decay_trend = std::min(trend_r, trend_l);
        k.warning_ = "tabulated kernel: mgf domain bound estimated from the table's tail decay rate " +
                     format_number(std::max(data->decay_rate, 0.0));
    }
    return k;
}

Kernel Kernel::from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open tabulated kernel file: " + path);
    std::vector<double> xs, js;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double x, j;
        if (!(ls >> x >> j)) {
            if (first) {
                first = false;
                continue;
            }
            throw ConfigError("malformed line in " + path + ": " + line);
        }
        first = false;
        xs.push_back(x);
        js.push_back(j);
    }
    return tabulated(std::move(xs), std::move(js));
}

Kernel Kernel::parse(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw ConfigError("kernel spec must be FAMILY:PARAMS, got '" + spec + "'");
    const std::string family = spec.substr(0, colon);
    const std::string rest = spec.substr(colon + 1);
    if (family == "tabulated") return from_csv(rest);
    std::vector<double> args;
    std::stringstream ss(rest);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            args.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ConfigError("bad kernel parameter '" + tok + "' in '" + spec + "'");
        }
    }
    auto need = [&](std::size_t count) {
        if (args.size() != count)
            throw ConfigError("kernel '" + family + "' takes " + std::to_string(count) + " parameter(s)");
    };
    try {
        if (family == "gaussian") {
            need(1);
            return gaussian(args[0]);
        }
        if (family == "laplace") {
            need(1);
            return laplace(args[0]);
        }
        if (family == "uniform") {
            need(1);
            return uniform(args[0]);
        }
        if (family == "truncgauss") {
            need(2);
            return truncated_gaussian(args[0], args[1]);
        }
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    throw ConfigError("unknown kernel family '" + family + "'");
}

KernelFamily Kernel::family() const {
    return std::visit(Overloaded{[](const Gaussian&) { return KernelFamily::Gaussian; },
                                 [](const Laplace&) { return KernelFamily::Laplace; },
                                 [](const UniformCompact&) { return KernelFamily::UniformCompact; },
                                 [](const TruncatedGaussian&) { return KernelFamily::TruncatedGaussian; },
                                 [](const Tabulated&) { return KernelFamily::Tabulated; }},
                      params_);
}

std::string Kernel::name() const {
    return std::visit(
        Overloaded{[](const Gaussian& g) { return "gaussian:" + format_number(g.sigma); },
                   [](const Laplace& l) { return "laplace:" + format_number(l.a); },
                   [](const UniformCompact& u) { return "uniform:" + format_number(u.halfwidth); },
                   [](const TruncatedGaussian& t) {
                       return "truncgauss:" + format_number(t.sigma) + "," + format_number(t.radius);
                   },
                   [](const Tabulated& t) { return "tabulated[" + std::to_string(t.data->x.size()) + "]"; }},
        params_);
}

double Kernel::density(double x) const {
    return std::visit(
        Overloaded{[x](const Gaussian& g) {
                       const double u = x / g.sigma;
                       return std::exp(-0.5 * u * u) / (g.sigma * kSqrt2Pi);
                   },
                   [x](const Laplace& l) { return 0.5 * l.a * std::exp(-l.a * std::abs(x)); },
                   [x](const UniformCompact& u) { return std::abs(x) <= u.halfwidth ? 0.5 / u.halfwidth : 0.0; },
                   [x](const TruncatedGaussian& t) {
                       if (std::abs(x) > t.radius) return 0.0;
                       const double u = x / t.sigma;
                       return std::exp(-0.5 * u * u) / (t.sigma * kSqrt2Pi * t.norm);
                   },
                   [x](const Tabulated& t) { return tab_density(*t.data, x); }},
        params_);
}

double Kernel::log_density(double x) const {
    return std::visit(Overloaded{[x](const Gaussian& g) {
                                     const double u = x / g.sigma;
                                     return -0.5 * u * u - std::log(g.sigma * kSqrt2Pi);
                                 },
                                 [x](const Laplace& l) { return std::log(0.5 * l.a) - l.a * std::abs(x); },
                                 [x](const TruncatedGaussian& t) {
                                     if (std::abs(x) > t.radius) return kLogZero;
                                     const double u = x / t.sigma;
                                     return -0.5 * u * u - std::log(t.sigma * kSqrt2Pi * t.norm);
                                 },
                                 [this, x](const auto&) {
                                     const double d = density(x);
                                     return d > 0.0 ? std::log(d) : kLogZero;
                                 }},
                      params_);
}

bool Kernel::has_closed_form_mgf() const { return family() != KernelFamily::Tabulated; }

double Kernel::mgf_domain_bound() const {
    return std::visit(Overloaded{[](const Laplace& l) { return l.a; },
                                 [](const Tabulated& t) { return t.data->compact ? kInf : t.data->decay_rate; },
                                 [](const auto&) { return kInf; }},
                      params_);
}

double Kernel::support_sup() const {
    return std::visit(Overloaded{[](const UniformCompact& u) { return u.halfwidth; },
                                 [](const TruncatedGaussian& t) { return t.radius; },
                                 [](const Tabulated& t) {
                                     const auto& d = *t.data;
                                     for (std::size_t i = d.x.size(); i-- > 0;)
                                         if (d.value[i] > 0.0) return i + 1 < d.x.size() ? d.x[i + 1] : d.x[i];
                                     return d.x.back();
                                 },
                                 [](const auto&) { return kInf; }},
                      params_);
}

double Kernel::log_mgf(double lambda) const {
    if (std::abs(lambda) >= mgf_domain_bound())
        throw DomainError("mgf: |lambda| = " + format_number(std::abs(lambda)) + " outside the domain bound " +
                          format_number(mgf_domain_bound()));
    if (lambda == 0.0) return 0.0;
    const double closed = std::visit(
        Overloaded{[lambda](const Gaussian& g) { return 0.5 * lambda * lambda * g.sigma * g.sigma; },
                   [lambda](const Laplace& l) { return -std::log1p(-(lambda / l.a) * (lambda / l.a)); },
                   [lambda](const UniformCompact& u) {
                       const double y = std::abs(lambda) * u.halfwidth;
                       if (y < 1e-4) return y * y / 6.0 - y * y * y * y / 180.0;
                       // ln(sinh(y)/y) = y - ln(2y) + ln(1 - e^{-2y})
                       return y - std::log(2.0 * y) + std::log1p(-std::exp(-2.0 * y));
                   },
                   [lambda](const TruncatedGaussian& t) {
                       const double s = t.sigma;
                       const double mu = lambda * s * s;
                       const double hi = (t.radius - mu) / s;
                       const double lo = (-t.radius - mu) / s;
                       // P(lo < N < hi) written with survival functions on the side that keeps precision.
                       const double p = lo > 0.0 ? normal_sf(lo) - normal_sf(hi) : normal_sf(-hi) - normal_sf(-lo);
                       if (!(p > 1e-280)) return kNaN;
                       return 0.5 * mu * lambda + std::log(p / t.norm);
                   },
                   [](const Tabulated&) { return kNaN; }},
        params_);
    if (std::isfinite(closed)) return closed;
    return weighted_moments(lambda).log_mass();
}

double Kernel::mgf(double lambda) const { return std::exp(log_mgf(lambda)); }

double Kernel::mgf_quadrature(double lambda) const {
    if (std::abs(lambda) >= mgf_domain_bound())
        throw DomainError("mgf: lambda outside the domain bound");
    return std::exp(weighted_moments(lambda).log_mass());
}

double Kernel::variance() const {
    return std::visit(Overloaded{[](const Gaussian& g) { return g.sigma * g.sigma; },
                                 [](const Laplace& l) { return 2.0 / (l.a * l.a); },
                                 [](const UniformCompact& u) { return u.halfwidth * u.halfwidth / 3.0; },
                                 [](const TruncatedGaussian& t) {
                                     const double r = t.radius / t.sigma;
                                     const double phi = std::exp(-0.5 * r * r) / kSqrt2Pi;
                                     return t.sigma * t.sigma * (1.0 - 2.0 * r * phi / t.norm);
                                 },
                                 [this](const Tabulated&) { return weighted_moments(0.0).variance(); }},
                      params_);
}

double Kernel::scale() const { return std::sqrt(variance()); }

std::pair<double, double> Kernel::tilted_range(double lambda) const {
    return std::visit(
        Overloaded{[lambda](const Gaussian& g) {
                       const double mu = lambda * g.sigma * g.sigma;
                       return std::pair{mu - kGaussTailSigmas * g.sigma, mu + kGaussTailSigmas * g.sigma};
                   },
                   [lambda](const Laplace& l) {
                       const double right = l.a - lambda;
                       const double left = l.a + lambda;
                       return std::pair{-kTailFolds / left, kTailFolds / right};
                   },
                   [lambda](const UniformCompact& u) {
                       const double w = u.halfwidth;
                       const double reach = std::abs(lambda) > 0.0 ? kTailFolds / std::abs(lambda) : kInf;
                       if (reach >= 2.0 * w) return std::pair{-w, w};
                       return lambda > 0 ? std::pair{w - reach, w} : std::pair{-w, -w + reach};
                   },
                   [lambda](const TruncatedGaussian& t) {
                       const double s2 = t.sigma * t.sigma;
                       const double mu = lambda * s2;
                       double lo = std::max(-t.radius, mu - kGaussTailSigmas * t.sigma);
                       double hi = std::min(t.radius, mu + kGaussTailSigmas * t.sigma);
                       // Mode beyond the edge: the tilted density decays from the edge at this rate.
                       if (mu > t.radius) lo = std::max(lo, t.radius - kTailFolds / (lambda - t.radius / s2));
                       if (mu < -t.radius) hi = std::min(hi, -t.radius + kTailFolds / (-lambda - t.radius / s2));
                       if (lo >= hi) lo = std::max(-t.radius, hi - kGaussTailSigmas * t.sigma);
                       if (lo >= hi) hi = std::min(t.radius, lo + kGaussTailSigmas * t.sigma);
                       return std::pair{lo, hi};
                   },
                   [](const Tabulated& t) { return std::pair{t.data->x.front(), t.data->x.back()}; }},
        params_);
}

std::vector<double> Kernel::breakpoints() const {
    return std::visit(Overloaded{[](const Laplace&) { return std::vector<double>{0.0}; },
                                 [](const Tabulated& t) { return t.data->x; },
                                 [](const auto&) { return std::vector<double>{}; }},
                      params_);
}

std::vector<SingularPoint> Kernel::singular_points() const {
    return std::visit(
        Overloaded{[](const Laplace& l) {
                       return std::vector<SingularPoint>{{0.0, 0.5 * l.a, 0.0, -l.a * l.a}};
                   },
                   [](const UniformCompact& u) {
                       const double h = 0.5 / u.halfwidth;
                       return std::vector<SingularPoint>{{-u.halfwidth, 0.5 * h, h, 0.0},
                                                         {u.halfwidth, 0.5 * h, -h, 0.0}};
                   },
                   [this](const TruncatedGaussian& t) {
                       const double edge = density(t.radius);
                       const double slope = t.radius / (t.sigma * t.sigma) * edge;
                       return std::vector<SingularPoint>{{-t.radius, 0.5 * edge, edge, slope},
                                                         {t.radius, 0.5 * edge, -edge, slope}};
                   },
                   [](const Tabulated& t) {
                       const auto& d = *t.data;
                       const std::size_t n = d.x.size();
                       std::vector<SingularPoint> pts;
                       pts.reserve(n);
                       for (std::size_t i = 0; i < n; ++i) {
                           const double vl = i > 0 ? d.value[i] : 0.0;
                           const double vr = i + 1 < n ? d.value[i] : 0.0;
                           const double sl = i > 0 ? (d.value[i] - d.value[i - 1]) / (d.x[i] - d.x[i - 1]) : 0.0;
                           const double sr =
                               i + 1 < n ? (d.value[i + 1] - d.value[i]) / (d.x[i + 1] - d.x[i]) : 0.0;
                           pts.push_back({d.x[i], 0.5 * (vl + vr), vr - vl, sr - sl});
                       }
                       return pts;
                   },
                   [](const auto&) { return std::vector<SingularPoint>{}; }},
        params_);
}

namespace {

// Gauss-Legendre on each table cell: the interpolant is linear there, so the
// integrand is a degree <= 3 polynomial times e^{λx}.
WeightedMoments tabulated_moments(const TabulatedData& d, double lambda) {
    static constexpr std::array<double, 8> node = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                                   -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                                   0.7966664774136267,  0.9602898564975363};
    static constexpr std::array<double, 8> weight = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                                     0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                                     0.2223810344533745, 0.1012285362903763};
    WeightedMoments wm;
    wm.log_scale = kLogZero;
    for (std::size_t i = 0; i < d.x.size(); ++i) {
        if (d.value[i] <= 0.0) continue;
        const double v = lambda * d.x[i] + std::log(d.value[i]);
        if (v > wm.log_scale) {
            wm.log_scale = v;
            wm.center = d.x[i];
        }
    }
    if (wm.log_scale == kLogZero) throw DomainError("weighted_moments: no mass in the tilted range");
    for (std::size_t i = 0; i + 1 < d.x.size(); ++i) {
        const double v0 = d.value[i], v1 = d.value[i + 1];
        if (v0 <= 0.0 && v1 <= 0.0) continue;
        const double half = 0.5 * (d.x[i + 1] - d.x[i]), mid = 0.5 * (d.x[i + 1] + d.x[i]);
        for (std::size_t k = 0; k < node.size(); ++k) {
            const double s = 0.5 * (1.0 + node[k]);
            const double x = mid + half * node[k];
            const double w = weight[k] * half * (v0 + (v1 - v0) * s) * std::exp(lambda * x - wm.log_scale);
            const double dx = x - wm.center;
            wm.m[0] += w;
            wm.m[1] += dx * w;
            wm.m[2] += dx * dx * w;
        }
    }
    if (!(wm.m[0] > 0.0)) throw DomainError("weighted_moments: vanishing mass");
    return wm;
}

}  // namespace

WeightedMoments Kernel::weighted_moments(double lambda) const {
    if (const auto* t = std::get_if<Tabulated>(&params_)) return tabulated_moments(*t->data, lambda);
    const auto [lo, hi] = tilted_range(lambda);
    auto breaks = breakpoints();

    // Shift the exponent by its maximum over a probe grid so the integrand stays O(1).
    double shift = kLogZero;
    auto probe = [&](double x) {
        const double ld = log_density(x);
        if (ld != kLogZero) shift = std::max(shift, lambda * x + ld);
    };
    constexpr int kProbe = 64;
    for (int i = 0; i <= kProbe; ++i) probe(lo + (hi - lo) * i / kProbe);
    for (double b : breaks)
        if (b >= lo && b <= hi) probe(b);
    if (shift == kLogZero) throw DomainError("weighted_moments: no mass in the tilted range");

    // Moments are taken about the heaviest probe point to limit cancellation in the variance.
    double center = 0.0;
    if (family() == KernelFamily::Gaussian) {
        const auto& g = std::get<Gaussian>(params_);
        center = lambda * g.sigma * g.sigma;
    } else {
        double best = kLogZero;
        for (int i = 0; i <= kProbe; ++i) {
            const double x = lo + (hi - lo) * i / kProbe;
            const double v = lambda * x + log_density(x);
            if (v > best) {
                best = v;
                center = x;
            }
        }
    }

    quad::VectorIntegrand f = [&](double x) {
        const double ld = log_density(x);
        if (ld == kLogZero) return std::array<double, 3>{0.0, 0.0, 0.0};
        const double w = std::exp(lambda * x + ld - shift);
        const double d = x - center;
        return std::array<double, 3>{w, d * w, d * d * w};
    };
    const double ref = std::max(hi - lo, 1e-300) / 8.0;
    const auto res = quad::integrate(f, lo, hi, 3, breaks, 1e-13, 1e-300, ref);
    WeightedMoments wm;
    wm.log_scale = shift;
    wm.center = center;
    wm.m = res.value;
    if (!(wm.m[0] > 0.0)) throw DomainError("weighted_moments: vanishing mass");
    return wm;
}

std::vector<double> Kernel::sample(Rng& rng, std::size_t n) const {
    TiltedSampler draw(*this, 0.0);
    std::vector<double> out(n);
    for (auto& v : out) v = draw(rng);
    return out;
}

TiltedSampler::TiltedSampler(const Kernel& kernel, double theta) : kernel_(kernel), theta_(theta) {
    if (std::abs(theta) >= kernel.mgf_domain_bound()) throw DomainError("tilted sampler: theta outside domain");
    const auto fam = kernel.family();
    if (fam != KernelFamily::TruncatedGaussian && fam != KernelFamily::Tabulated) return;

    // Piecewise-constant envelope over cells for acceptance-rejection.
    auto env = std::make_shared<Envelope>();
    std::vector<double> edges;
    if (fam == KernelFamily::Tabulated) {
        edges = std::get<Kernel::Tabulated>(kernel.params()).data->x;
    } else {
        const auto [lo, hi] = kernel.tilted_range(theta);
        const double sigma = std::get<Kernel::TruncatedGaussian>(kernel.params()).sigma;
        const int cells = std::max(16, static_cast<int>(std::ceil((hi - lo) / (sigma / 32.0))));
        for (int i = 0; i <= cells; ++i) edges.push_back(lo + (hi - lo) * i / cells);
    }
    std::vector<double> log_h;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double a = edges[i], b = edges[i + 1];
        double lh;
        if (fam == KernelFamily::Tabulated) {
            const double ja = kernel.density(a), jb = kernel.density(b);
            const double jm = std::max(ja, jb);
            lh = jm > 0.0 ? std::log(jm) + theta * (theta > 0 ? b : a) : kLogZero;
        } else {
            // Tilted truncated Gaussian is log-concave: maximum at an end or at the mode.
            const double sigma = std::get<Kernel::TruncatedGaussian>(kernel.params()).sigma;
            const double mode = theta * sigma * sigma;
            auto lf = [&](double x) { return theta * x + kernel.log_density(x); };
            lh = std::max(lf(a), lf(b));
            if (mode > a && mode < b) lh = std::max(lh, lf(mode));
        }
        env->lo.push_back(a);
        env->width.push_back(b - a);
        log_h.push_back(lh);
    }
    const double top = *std::max_element(log_h.begin(), log_h.end());
    std::vector<double> weights;
    for (std::size_t i = 0; i < log_h.size(); ++i) {
        const double h = log_h[i] == kLogZero ? 0.0 : std::exp(log_h[i] - top) * (1.0 + 1e-12);
        env->height.push_back(h);
        weights.push_back(h * env->width[i]);
    }
    env->pick = std::discrete_distribution<std::size_t>(weights.begin(), weights.end());
    env->log_top = top;
    envelope_ = std::move(env);
}

double TiltedSampler::operator()(Rng& rng) const {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double theta = theta_;
    switch (kernel_.family()) {
        case KernelFamily::Gaussian: {
            const double s = std::get<Kernel::Gaussian>(kernel_.params()).sigma;
            std::normal_distribution<double> nd(theta * s * s, s);
            return nd(rng);
        }
        case KernelFamily::Laplace: {
            const double a = std::get<Kernel::Laplace>(kernel_.params()).a;
            const double right = a - theta, left = a + theta;
            const double p_right = left / (left + right);
            std::exponential_distribution<double> er(right), el(left);
            return unif(rng) < p_right ? er(rng) : -el(rng);
        }
        case KernelFamily::UniformCompact: {
            const double w = std::get<Kernel::UniformCompact>(kernel_.params()).halfwidth;
            const double u = unif(rng);
            if (std::abs(theta * w) < 1e-12) return w * (2.0 * u - 1.0);
            const double t = std::abs(theta);
            // Inverse CDF of e^{t x} on [-w, w], written from the heavy end for stability.
            const double x = w + std::log(u + (1.0 - u) * std::exp(-2.0 * t * w)) / t;
            return theta > 0 ? x : -x;
        }
        default: {
            auto& env = *envelope_;
            const double top = env.log_top;
            for (;;) {
                const std::size_t i = env.pick(rng);
                const double x = env.lo[i] + unif(rng) * env.width[i];
                const double ld = kernel_.log_density(x);
                if (ld == kLogZero) continue;
                const double f = std::exp(theta * x + ld - top);
                if (unif(rng) * env.height[i] <= f) return x;
            }
        }
    }
}

bool ValidationReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

bool ValidationReport::passed(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return c.passed;
    return false;
}

bool ValidationReport::usable_for_theory() const {
    return passed("symmetry") && passed("normalization") && passed("thin_tail");
}

ValidationReport validate_hypotheses(const Kernel& k) {
    ValidationReport rep;
    auto [lo, hi] = k.tilted_range(0.0);
    const double reach = 1.1 * std::max(std::abs(lo), std::abs(hi));

    // Symmetry on a probe grid.
    constexpr int kProbe = 4000;
    double max_j = 0.0, max_asym = 0.0;
    for (int i = 0; i <= kProbe; ++i) {
        const double x = reach * i / kProbe;
        const double jp = k.density(x), jm = k.density(-x);
        max_j = std::max({max_j, jp, jm});
        max_asym = std::max(max_asym, std::abs(jp - jm));
    }
    const bool sym = max_asym <= 1e-12 * max_j;
    rep.checks.push_back({"symmetry", sym, "max |J(x)-J(-x)| = " + format_number(max_asym)});

    const double mass = quad::integrate_scalar([&](double x) { return k.density(x); }, lo, hi, k.breakpoints(),
                                               1e-14);
    const bool norm = std::abs(mass - 1.0) <= 1e-10;
    rep.checks.push_back({"normalization", norm, "integral = " + format_number(mass)});

    // Continuity: the largest jump between neighbouring probes must shrink under refinement.
    auto max_jump = [&](int cells) {
        double worst = 0.0;
        double prev = k.density(-reach);
        for (int i = 1; i <= cells; ++i) {
            const double cur = k.density(-reach + 2.0 * reach * i / cells);
            worst = std::max(worst, std::abs(cur - prev));
            prev = cur;
        }
        return worst;
    };
    const double coarse = max_jump(kProbe), fine = max_jump(4 * kProbe);
    const bool cont = fine <= 0.5 * coarse + 1e-12 * max_j;
    rep.grid_resolution = 2.0 * reach / (4 * kProbe);
    std::string cont_detail =
        "max neighbour jump " + format_number(coarse) + " -> " + format_number(fine) + " under 4x refinement";
    if (k.family() == KernelFamily::Tabulated) {
        const auto& d = *std::get<Kernel::Tabulated>(k.params()).data;
        double spacing = 0.0;
        for (std::size_t i = 1; i < d.x.size(); ++i) spacing = std::max(spacing, d.x[i] - d.x[i - 1]);
        rep.grid_resolution = spacing;
        cont_detail += "; continuity verified only to table resolution " + format_number(spacing);
    }
    rep.checks.push_back({"continuity", cont, cont_detail});

    bool thin = true;
    std::string thin_detail;
    if (k.family() == KernelFamily::Tabulated) {
        const auto& d = *std::get<Kernel::Tabulated>(k.params()).data;
        if (d.compact) {
            thin_detail = "table vanishes at both ends (compact support)";
        } else {
            thin = d.decay_rate > 0.0 && d.decay_trend >= 0.9;
            thin_detail = "tail decay rate " + format_number(d.decay_rate) + ", trend " + format_number(d.decay_trend);
        }
        if (!k.warning().empty()) rep.warnings.push_back(k.warning());
    } else {
        thin_detail = "closed-form family, L_max = " + format_number(k.mgf_domain_bound());
    }
    if (thin) {
        const double bound = k.mgf_domain_bound();
        const double probe = std::isfinite(bound) ? 0.5 * bound : 1.0;
        try {
            const double m = k.mgf(probe);
            thin = std::isfinite(m);
            thin_detail += "; M(" + format_number(probe) + ") = " + format_number(m);
        } catch (const Error&) {
            thin = false;
        }
    }
    rep.checks.push_back({"thin_tail", thin, thin_detail});
    return rep;
}

}  // namespace nlfront
