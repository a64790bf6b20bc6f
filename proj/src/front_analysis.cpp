#include "nlfront/front_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "nlfront/errors.hpp"

namespace nlfront {

std::string to_string(TraceSource s) {
    switch (s) {
        case TraceSource::SeriesLinear:
            return "series-linear";
        case TraceSource::PdeLinear:
            return "pde-linear";
        case TraceSource::PdeNonlinear:
            return "pde-nonlinear";
    }
    return "unknown";
}

std::size_t FrontTrace::valid_count() const {
    return static_cast<std::size_t>(std::count_if(positions.begin(), positions.end(),
                                                  [](double p) { return std::isfinite(p); }));
}

double level_position(const Field& layout, const std::vector<double>& log_values, double rho) {
    if (!(rho > 0.0)) throw DomainError("level_position: rho must be positive");
    const double target = std::log(rho);
    for (std::size_t i = log_values.size(); i-- > 0;) {
        if (log_values[i] >= target) {
            if (i + 1 == log_values.size()) return layout.x(i);
            const double a = log_values[i], b = log_values[i + 1];
            // interpolate in the value itself, as on a plain sampled profile
            const double va = 1.0, vb = std::isfinite(b) ? std::exp(b - a) : 0.0;
            const double vt = std::exp(target - a);
            const double w = (va - vt) / (va - vb);
            return layout.x(i) + w * layout.dx;
        }
    }
    return kNaN;
}

double level_position(const Field& field, double rho) {
    if (field.frame == Frame::Raw) {
        if (!(rho > 0.0)) throw DomainError("level_position: rho must be positive");
        const auto& v = field.values;
        for (std::size_t i = v.size(); i-- > 0;) {
            if (v[i] >= rho) {
                if (i + 1 == v.size()) return field.x(i);
                return field.x(i) + (v[i] - rho) / (v[i] - v[i + 1]) * field.dx;
            }
        }
        return kNaN;
    }
    std::vector<double> lv(field.size());
    for (std::size_t i = 0; i < lv.size(); ++i) lv[i] = field.log_solution(i);
    return level_position(field, lv, rho);
}

double level_position(const SeriesEngine& series, double t, double rho, double tol) {
    if (!(rho > 0.0)) throw DomainError("level_position: rho must be positive");
    if (!(t > 0.0)) return 0.0;  // step datum: the crossing sits at the origin
    const double target = std::log(rho);
    const FrontParams& fp = series.params();
    auto phi = [&](double x) { return series.u_linear(t, x).log_value - target; };
    // u -> e^{(r−1)t}·... far left is e^{rt}; if that is below rho the level is never reached
    if (fp.r * t < target) return kNaN;

    const double guess = fp.c * t - fp.s * std::log(t);
    double step = std::max(1.0, 0.05 * std::sqrt(t));
    double lo = guess, hi = guess;
    double flo = phi(lo), fhi = flo;
    if (flo >= 0.0) {
        for (int k = 0; fhi >= 0.0; ++k) {
            lo = hi;
            flo = fhi;
            hi = lo + step;
            step *= 2.0;
            fhi = phi(hi);
            if (k > 60) throw ConvergenceError("level_position: no upper bracket");
        }
    } else {
        for (int k = 0; flo < 0.0; ++k) {
            hi = lo;
            fhi = flo;
            lo = hi - step;
            step *= 2.0;
            flo = phi(lo);
            if (k > 60) return kNaN;
        }
    }
    // Illinois false position, falling back to bisection on poor progress
    int side = 0;
    while (hi - lo > tol) {
        double x = (std::isfinite(flo) && std::isfinite(fhi)) ? hi - fhi * (hi - lo) / (fhi - flo) : 0.5 * (lo + hi);
        if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
        const double fx = phi(x);
        if (fx >= 0.0) {
            lo = x;
            flo = fx;
            if (side == -1) fhi *= 0.5;
            side = -1;
        } else {
            hi = x;
            fhi = fx;
            if (side == 1) flo *= 0.5;
            side = 1;
        }
        if (hi - lo > tol) {
            // bisection guard keeps the bracket shrinking geometrically
            const double mid = 0.5 * (lo + hi);
            const double fm = phi(mid);
            if (fm >= 0.0) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
                fhi = fm;
            }
        }
    }
    if (!std::isfinite(flo) || !std::isfinite(fhi)) return 0.5 * (lo + hi);
    return flo == fhi ? 0.5 * (lo + hi) : lo + flo * (hi - lo) / (flo - fhi);
}

std::vector<double> log_spaced_times(double t_min, double t_max, std::size_t count) {
    if (!(t_min > 0.0) || !(t_max > t_min) || count < 2) throw DomainError("log_spaced_times: bad range");
    std::vector<double> ts(count);
    const double ratio = std::log(t_max / t_min);
    for (std::size_t k = 0; k < count; ++k)
        ts[k] = t_min * std::exp(ratio * static_cast<double>(k) / static_cast<double>(count - 1));
    ts.back() = t_max;
    return ts;
}

FrontTrace series_trace(const SeriesEngine& series, double rho, const std::vector<double>& times, unsigned threads,
                        double tol) {
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw DomainError("series_trace: times must be strictly increasing");
    FrontTrace tr;
    tr.rho = rho;
    tr.times = times;
    tr.positions.assign(times.size(), kNaN);
    tr.source = TraceSource::SeriesLinear;
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(times.size())));
    if (threads == 1) {
        for (std::size_t i = 0; i < times.size(); ++i) tr.positions[i] = level_position(series, times[i], rho, tol);
        return tr;
    }
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < times.size(); i += threads)
                    tr.positions[i] = level_position(series, times[i], rho, tol);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return tr;
}

DelayFit delay_fit(const FrontTrace& trace, const FrontParams& fp, FitWindow window) {
    std::vector<double> lx, ly, ts;
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        const double t = trace.times[i];
        if (t < window.t_min || t > window.t_max || !(t > 0.0) || !std::isfinite(trace.positions[i])) continue;
        ts.push_back(t);
        lx.push_back(std::log(t));
        ly.push_back(fp.c * t - trace.positions[i]);
    }
    if (ts.size() < 8) throw InsufficientData("delay_fit: need at least 8 valid points, got " + std::to_string(ts.size()));
    const double t_lo = *std::min_element(ts.begin(), ts.end());
    const double t_hi = *std::max_element(ts.begin(), ts.end());
    if (t_hi / t_lo < 16.0) throw InsufficientData("delay_fit: window must span a factor of 16 in t");

    const double n = static_cast<double>(ts.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    DelayFit fit;
    fit.c_used = fp.c;
    fit.s_hat = sxy / sxx;
    fit.intercept = my - fit.s_hat * mx;
    fit.t_min = t_lo;
    fit.t_max = t_hi;
    fit.points = ts.size();
    fit.s_theory = fp.s;
    double ss = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double e = ly[i] - (fit.s_hat * lx[i] + fit.intercept);
        ss += e * e;
    }
    fit.residual_rms = std::sqrt(ss / n);
    return fit;
}

std::vector<double> delay_residuals(const FrontTrace& trace, const FrontParams& fp) {
    std::vector<double> out;
    for (std::size_t i = 0; i < trace.times.size(); ++i)
        if (std::isfinite(trace.positions[i]) && trace.times[i] > 0.0)
            out.push_back(trace.positions[i] - fp.c * trace.times[i] + fp.s * std::log(trace.times[i]));
    return out;
}

DelayBoundReport delay_bound_check(const Kernel& kernel, const ReactionTerm& reaction, double dt,
                                   const std::vector<double>& times, double rho, const ComparisonGrid& grid) {
    DelayBoundReport rep;
    rep.rho = rho;
    rep.kpp = reaction.kpp();
    if (!rep.kpp) {
        rep.note = "reaction violates f(u) <= f'(0)u; bound not certified";
        return rep;
    }
    if (times.empty()) throw DomainError("delay_bound_check: no probe times");
    const double t_end = *std::max_element(times.begin(), times.end());
    const ComparisonReport cmp = comparison_check(kernel, reaction, dt, t_end, times, grid);
    const CumulantFunctions cf(kernel);
    const SeriesEngine series(cf, critical_speed(cf, reaction.r_at_zero()));
    rep.certified = cmp.certified;
    for (std::size_t k = 0; k < cmp.probes.size(); ++k) {
        DelayBoundRow row;
        row.t = cmp.probes[k].t;
        row.theta = level_position(cmp.nonlinear[k], rho);
        row.sigma = level_position(series, row.t, rho);
        row.slack = row.sigma - row.theta;
        row.max_excess = cmp.probes[k].max_excess;
        rep.min_slack = std::min(rep.min_slack, row.slack);
        rep.max_excess = std::max(rep.max_excess, row.max_excess);
        if (!(row.slack >= -rep.tolerance)) rep.certified = false;
        rep.rows.push_back(row);
    }
    if (!rep.certified && rep.note.empty()) rep.note = "bound violated beyond tolerance";
    return rep;
}

}  // namespace nlfront
