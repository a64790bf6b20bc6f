#include "nlfront/pde.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <sstream>

#include "nlfront/errors.hpp"
#include "nlfront/lattice.hpp"
#include "nlfront/numeric.hpp"

namespace nlfront {

namespace {

constexpr int kKppGrid = 10000;

std::size_t next_fast_size(std::size_t n) {
    for (std::size_t m = n;; ++m) {
        std::size_t k = m;
        for (std::size_t p : {2, 3, 5, 7})
            while (k % p == 0) k /= p;
        if (k == 1) return m;
    }
}

}  // namespace

ReactionTerm ReactionTerm::logistic(double r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("logistic reaction needs r > 0");
    ReactionTerm f;
    f.logistic_r_ = r;
    f.finish();
    return f;
}

ReactionTerm ReactionTerm::custom(std::vector<double> values) {
    if (values.size() < 3) throw DomainError("custom reaction needs at least 3 values on [0, 1]");
    for (double v : values)
        if (!std::isfinite(v)) throw DomainError("custom reaction values must be finite");
    if (values.front() != 0.0 || values.back() != 0.0) throw DomainError("custom reaction needs f(0) = f(1) = 0");
    for (std::size_t i = 1; i + 1 < values.size(); ++i)
        if (!(values[i] > 0.0)) throw DomainError("custom reaction must be positive on (0, 1)");
    ReactionTerm f;
    f.table_ = std::make_shared<const std::vector<double>>(std::move(values));
    f.finish();
    return f;
}

ReactionTerm ReactionTerm::from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open reaction file: " + path);
    std::vector<double> vs, fs;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        std::vector<double> cols;
        double d;
        while (ls >> d) cols.push_back(d);
        if (cols.empty() || !ls.eof()) {
            if (first) {
                first = false;
                continue;
            }
            throw ConfigError("malformed line in " + path + ": " + line);
        }
        first = false;
        if (cols.size() == 1) {
            fs.push_back(cols[0]);
        } else {
            vs.push_back(cols[0]);
            fs.push_back(cols[1]);
        }
    }
    if (!vs.empty()) {
        const double step = 1.0 / static_cast<double>(vs.size() - 1);
        for (std::size_t i = 0; i < vs.size(); ++i)
            if (std::abs(vs[i] - static_cast<double>(i) * step) > 1e-9)
                throw ConfigError("reaction table must sit on a uniform grid of [0, 1]: " + path);
    }
    try {
        return custom(std::move(fs));
    } catch (const DomainError& e) {
        throw ConfigError(std::string(e.what()) + " (" + path + ")");
    }
}

ReactionTerm ReactionTerm::parse(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string family = spec.substr(0, colon);
    const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (family == "logistic") {
        try {
            return logistic(rest.empty() ? 1.0 : std::stod(rest));
        } catch (const std::invalid_argument&) {
            throw ConfigError("bad logistic rate '" + rest + "'");
        } catch (const DomainError& e) {
            throw ConfigError(e.what());
        }
    }
    if (family == "custom") return from_csv(rest);
    throw ConfigError("unknown reaction '" + spec + "'");
}

void ReactionTerm::finish() {
    if (table_) {
        const auto& t = *table_;
        const double step = 1.0 / static_cast<double>(t.size() - 1);
        r0_ = (t[1] - t[0]) / step;
        lip_ = 0.0;
        for (std::size_t i = 1; i < t.size(); ++i) lip_ = std::max(lip_, std::abs(t[i] - t[i - 1]) / step);
    } else {
        r0_ = logistic_r_;
        lip_ = logistic_r_;  // |f'| <= r on [0, 1]
    }
    kpp_ = true;
    for (int i = 0; i <= kKppGrid; ++i) {
        const double u = static_cast<double>(i) / kKppGrid;
        if ((*this)(u) > r0_ * u + 1e-12) {
            kpp_ = false;
            break;
        }
    }
}

double ReactionTerm::operator()(double v) const {
    if (!table_) return logistic_r_ * v * (1.0 - v);
    const auto& t = *table_;
    const std::size_t cells = t.size() - 1;
    const double pos = v * static_cast<double>(cells);
    std::size_t i;
    if (pos <= 0.0)
        i = 0;
    else if (pos >= static_cast<double>(cells))
        i = cells - 1;
    else
        i = static_cast<std::size_t>(pos);
    const double w = pos - static_cast<double>(i);
    return (1.0 - w) * t[i] + w * t[i + 1];
}

std::string ReactionTerm::name() const {
    std::ostringstream os;
    if (table_)
        os << "custom[" << table_->size() << "]";
    else
        os << "logistic:" << logistic_r_;
    return os.str();
}

std::string to_string(Frame f) {
    switch (f) {
        case Frame::Raw:
            return "raw";
        case Frame::NormalizedLinear:
            return "normalized";
        case Frame::TiltedLinear:
            return "tilted";
    }
    return "unknown";
}

double Field::log_solution(std::size_t i) const {
    const double v = values[i];
    if (!(v > 0.0)) return kLogZero;
    switch (frame) {
        case Frame::Raw:
            return std::log(v);
        case Frame::NormalizedLinear:
            return r * time + std::log(v);
        case Frame::TiltedLinear:
            return tilt * (speed * time - x(i)) + std::log(v);
    }
    return kLogZero;
}

Field Field::step(double x_min, double x_max, double dx, Frame frame, double r, double tilt, double speed) {
    if (!(dx > 0.0) || !(x_max > x_min)) throw DomainError("Field::step: need dx > 0 and x_max > x_min");
    Field f;
    f.x_min = x_min;
    f.dx = dx;
    f.frame = frame;
    f.r = r;
    f.tilt = tilt;
    f.speed = speed;
    const auto n = static_cast<std::size_t>(std::llround((x_max - x_min) / dx)) + 1;
    f.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = f.x(i);
        double v = x < 0.0 ? 1.0 : 0.0;
        if (std::abs(x) < 1e-9 * dx) v = 0.5;
        if (frame == Frame::TiltedLinear) v *= std::exp(tilt * x);
        f.values[i] = v;
    }
    return f;
}

struct PdeSolver::Impl {
    std::size_t n = 0;
    std::size_t pad = 0;
    RealFFT fft;
    std::vector<std::complex<double>> kspec;
    // Raw frame: a second pass on e^{λ(x−ct)}v keeps round-off ahead of the
    // front below the critical exponential profile instead of a flat floor.
    std::vector<std::complex<double>> kspec_tilt;
    double lambda = 0.0, speed = 0.0;
    double x_min = 0.0, dx = 0.0;
    std::vector<double> plain, weight;
    double left = 0.0, right = 0.0;
    double diag = 0.0;
    std::size_t guard = 0;
    std::vector<double> k1, k2, k3, k4, tmp;

    explicit Impl(std::size_t size) : fft(size) {}
};

PdeSolver::PdeSolver(const Kernel& kernel, Dynamics dynamics, const Field& layout, double dt, EvolveOptions opts)
    : dynamics_(std::move(dynamics)), frame_(layout.frame), dt_(dt), opts_(opts) {
    if (!(dt > 0.0)) throw DomainError("evolve: dt must be positive");
    const bool nonlinear = std::holds_alternative<ReactionTerm>(dynamics_);
    if (nonlinear != (frame_ == Frame::Raw))
        throw DomainError("evolve: the raw frame carries the nonlinear problem, linear frames carry LinearRate");

    const KernelLattice lat = discretize_kernel(kernel, 0.0, layout.dx);
    const long reach = std::max(-lat.first, lat.last());
    const std::size_t n = layout.size();
    const std::size_t pad = static_cast<std::size_t>(reach);
    const std::size_t size = next_fast_size(n + 2 * pad);
    impl_ = std::make_unique<Impl>(size);
    impl_->n = n;
    impl_->pad = pad;

    double mass_sum = 0.0;
    std::fill(impl_->fft.real(), impl_->fft.real() + size, 0.0);
    const long ns = static_cast<long>(size);
    for (std::size_t j = 0; j < lat.mass.size(); ++j) {
        const long k = lat.first + static_cast<long>(j);
        double w = lat.mass[j];
        if (frame_ == Frame::TiltedLinear) w *= std::exp(layout.tilt * static_cast<double>(k) * layout.dx);
        mass_sum += w;
        impl_->fft.real()[static_cast<std::size_t>(((k % ns) + ns) % ns)] = w / static_cast<double>(size);
    }
    impl_->fft.forward();
    impl_->kspec.assign(impl_->fft.spectrum(), impl_->fft.spectrum() + impl_->fft.spectrum_size());
    impl_->x_min = layout.x_min;
    impl_->dx = layout.dx;

    if (nonlinear) {
        const auto& f = std::get<ReactionTerm>(dynamics_);
        const CumulantFunctions cf(kernel);
        const FrontParams fp = critical_speed(cf, f.r_at_zero());
        impl_->lambda = fp.lambda_r;
        impl_->speed = fp.c;
        std::fill(impl_->fft.real(), impl_->fft.real() + size, 0.0);
        for (std::size_t j = 0; j < lat.mass.size(); ++j) {
            const long k = lat.first + static_cast<long>(j);
            const double w = lat.mass[j] * std::exp(fp.lambda_r * static_cast<double>(k) * layout.dx);
            impl_->fft.real()[static_cast<std::size_t>(((k % ns) + ns) % ns)] = w / static_cast<double>(size);
        }
        impl_->fft.forward();
        impl_->kspec_tilt.assign(impl_->fft.spectrum(), impl_->fft.spectrum() + impl_->fft.spectrum_size());
        impl_->plain.resize(n);
        impl_->weight.resize(n + 2 * pad);
    }

    if (nonlinear) {
        const auto& f = std::get<ReactionTerm>(dynamics_);
        impl_->left = 1.0;
        dt_max_ = 0.5 / (1.0 + f.lipschitz());
    } else {
        const double r = std::get<LinearRate>(dynamics_).r;
        if (frame_ == Frame::NormalizedLinear) {
            impl_->left = 1.0;
            impl_->diag = -1.0;
            dt_max_ = 0.5 / (1.0 + r);
        } else if (frame_ == Frame::TiltedLinear) {
            impl_->diag = r - 1.0 - layout.speed * layout.tilt;
            dt_max_ = 0.5 / (mass_sum + std::abs(impl_->diag));
        } else {
            throw DomainError("evolve: the raw linear solution overflows; use the normalized or tilted frame");
        }
    }
    if (opts_.left_pad) impl_->left = *opts_.left_pad;
    if (opts_.right_pad) impl_->right = *opts_.right_pad;
    if (dt > dt_max_ * (1.0 + 1e-12))
        throw DomainError("evolve: dt exceeds the stability bound " + std::to_string(dt_max_));
    impl_->guard = static_cast<std::size_t>(std::ceil(opts_.guard_scales * kernel.scale() / layout.dx));
    if (opts_.check_guard && 2 * impl_->guard >= n)
        throw DomainError("evolve: grid too short for its right guard band");
    for (auto* v : {&impl_->k1, &impl_->k2, &impl_->k3, &impl_->k4, &impl_->tmp}) v->resize(n);
}

PdeSolver::~PdeSolver() = default;

namespace {

void spectral_pass(RealFFT& fft, const std::vector<std::complex<double>>& spec) {
    fft.forward();
    auto* s = fft.spectrum();
    for (std::size_t i = 0; i < spec.size(); ++i) s[i] *= spec[i];
    fft.backward();
}

}  // namespace

void PdeSolver::rhs(const std::vector<double>& v, double t, std::vector<double>& out) {
    Impl& m = *impl_;
    double* a = m.fft.real();
    const std::size_t size = m.fft.size();
    std::fill(a, a + m.pad, m.left);
    std::copy(v.begin(), v.end(), a + m.pad);
    std::fill(a + m.pad + m.n, a + m.pad + m.n + m.pad, m.right);
    std::fill(a + m.pad + m.n + m.pad, a + size, 0.0);
    spectral_pass(m.fft, m.kspec);
    const double* conv = a + m.pad;
    if (frame_ == Frame::Raw) {
        std::copy(conv, conv + m.n, m.plain.begin());
        const double x0 = m.speed * t;
        double top = 0.0;
        const std::size_t len = m.n + 2 * m.pad;
        for (std::size_t i = 0; i < len; ++i) {
            const double x = m.x_min + (static_cast<double>(i) - static_cast<double>(m.pad)) * m.dx;
            m.weight[i] = std::exp(std::min(m.lambda * (x - x0), 700.0));
            const double val = i < m.pad ? m.left : (i < m.pad + m.n ? v[i - m.pad] : m.right);
            a[i] = val * m.weight[i];
            top = std::max(top, a[i]);
        }
        std::fill(a + len, a + size, 0.0);
        spectral_pass(m.fft, m.kspec_tilt);
        // plain pass: absolute error ~ε; tilted pass: ~ε·top·e^{−λ(x−x0)}
        const double split = top > 0.0 ? x0 + std::log(top) / m.lambda : kInf;
        const auto& f = std::get<ReactionTerm>(dynamics_);
        for (std::size_t i = 0; i < m.n; ++i) {
            const double c = m.x_min + static_cast<double>(i) * m.dx < split ? m.plain[i] : conv[i] / m.weight[i + m.pad];
            out[i] = c - v[i] + f(v[i]);
        }
    } else {
        for (std::size_t i = 0; i < m.n; ++i) out[i] = conv[i] + m.diag * v[i];
    }
}

void PdeSolver::check(const Field& f) const {
    const auto [lo_it, hi_it] = std::minmax_element(f.values.begin(), f.values.end());
    const double lo = *lo_it, hi = *hi_it;
    if (frame_ == Frame::TiltedLinear) {
        if (lo < -opts_.band_tol * hi) throw StabilityError("evolve: tilted field went negative");
    } else if (lo < -opts_.band_tol || hi > 1.0 + opts_.band_tol) {
        throw StabilityError("evolve: values left [0, 1] at t = " + std::to_string(f.time));
    }
}

void PdeSolver::advance(Field& field, double t_target) {
    if (field.size() != impl_->n || field.frame != frame_) throw DomainError("advance: field layout mismatch");
    const double span = t_target - field.time;
    if (span < -1e-12) throw DomainError("advance: target time is in the past");
    if (span <= 0.0) return;
    const long steps = std::max(1L, static_cast<long>(std::ceil(span / dt_ - 1e-9)));
    const double h = span / static_cast<double>(steps);
    const double t0 = field.time;
    Impl& m = *impl_;
    auto& v = field.values;
    for (long s = 0; s < steps; ++s) {
        rhs(v, field.time, m.k1);
        for (std::size_t i = 0; i < m.n; ++i) m.tmp[i] = v[i] + 0.5 * h * m.k1[i];
        rhs(m.tmp, field.time + 0.5 * h, m.k2);
        for (std::size_t i = 0; i < m.n; ++i) m.tmp[i] = v[i] + 0.5 * h * m.k2[i];
        rhs(m.tmp, field.time + 0.5 * h, m.k3);
        for (std::size_t i = 0; i < m.n; ++i) m.tmp[i] = v[i] + h * m.k3[i];
        rhs(m.tmp, field.time + h, m.k4);
        for (std::size_t i = 0; i < m.n; ++i) v[i] += h / 6.0 * (m.k1[i] + 2.0 * m.k2[i] + 2.0 * m.k3[i] + m.k4[i]);
        field.time = t0 + h * static_cast<double>(s + 1);
        check(field);
    }
    field.time = t_target;
    if (opts_.check_guard) {
        const double top = frame_ == Frame::TiltedLinear ? *std::max_element(v.begin(), v.end()) : 1.0;
        const double guard_max = *std::max_element(v.end() - static_cast<long>(m.guard), v.end());
        if (guard_max > opts_.band_tol * top)
            throw DomainError("evolve: the front reached the right guard band at t = " + std::to_string(field.time));
    }
}

Field evolve(const Field& field, const Kernel& kernel, const Dynamics& dynamics, double dt, double t_end,
             const EvolveOptions& opts) {
    PdeSolver solver(kernel, dynamics, field, dt, opts);
    Field out = field;
    solver.advance(out, t_end);
    return out;
}

std::vector<double> combined_log_linear(const Field& normalized, const Field& tilted) {
    if (normalized.size() != tilted.size() || normalized.frame != Frame::NormalizedLinear ||
        tilted.frame != Frame::TiltedLinear || std::abs(normalized.time - tilted.time) > 1e-12)
        throw DomainError("combined_log_linear: fields must share grid and time");
    const double t = tilted.time;
    const double split = tilted.speed * t - tilted.r * t / tilted.tilt;
    std::vector<double> out(tilted.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = tilted.x(i) < split ? normalized.log_solution(i) : tilted.log_solution(i);
    return out;
}

double linear_front_extent(const CumulantFunctions& cf, const FrontParams& fp, double t_end) {
    const double m = std::exp(cf.lambda_cgf(fp.lambda_r));
    const auto [d1, d2] = cf.lambda_derivs(fp.lambda_r);
    const double spread = m * (d2 + d1 * d1);  // M''(λ_r): variance rate of the tilted walk
    return fp.c * t_end + 8.0 * std::sqrt(spread * t_end) + 10.0 * cf.kernel().scale();
}

ComparisonReport comparison_check(const Kernel& kernel, const ReactionTerm& reaction, double dt, double t_end,
                                  const std::vector<double>& probe_times, const ComparisonGrid& grid) {
    ComparisonReport rep;
    rep.kpp = reaction.kpp();
    if (!rep.kpp) {
        rep.note = "reaction violates f(u) <= f'(0)u; comparison not certified";
        return rep;
    }
    const double r = reaction.r_at_zero();
    const CumulantFunctions cf(kernel);
    const FrontParams fp = critical_speed(cf, r);
    double x_max = grid.x_max;
    if (x_max == 0.0) x_max = linear_front_extent(cf, fp, t_end) + 20.0 * kernel.scale() + 5.0;

    Field v = Field::step(grid.x_min, x_max, grid.dx, Frame::Raw);
    Field un = Field::step(grid.x_min, x_max, grid.dx, Frame::NormalizedLinear, r);
    Field ut = Field::step(grid.x_min, x_max, grid.dx, Frame::TiltedLinear, r, fp.lambda_r, fp.c);
    PdeSolver sv(kernel, reaction, v, dt);
    PdeSolver sn(kernel, LinearRate{r}, un, dt);
    PdeSolver st(kernel, LinearRate{r}, ut, dt);

    std::vector<double> times = probe_times;
    std::sort(times.begin(), times.end());
    rep.certified = true;
    for (double t : times) {
        if (t > t_end + 1e-12) throw DomainError("comparison_check: probe beyond t_end");
        sv.advance(v, t);
        sn.advance(un, t);
        st.advance(ut, t);
        const auto lu = combined_log_linear(un, ut);
        double worst = -kInf;
        for (std::size_t i = 0; i < v.size(); ++i) worst = std::max(worst, v.values[i] - std::exp(lu[i]));
        rep.probes.push_back({t, worst});
        rep.nonlinear.push_back(v);
        rep.linear_log.push_back(lu);
        if (worst > rep.tolerance) rep.certified = false;
    }
    if (!rep.certified) rep.note = "v exceeded u beyond tolerance";
    return rep;
}

}  // namespace nlfront
