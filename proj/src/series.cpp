#include "nlfront/series.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nlfront/errors.hpp"
#include "nlfront/numeric.hpp"

namespace nlfront {

namespace {

// Chernoff exponent below which an upper tail is invisible next to 1.
constexpr double kNegligibleLog = -45.0;

}  // namespace

SeriesEngine::SeriesEngine(CumulantFunctions cf, FrontParams fp, SeriesConfig cfg)
    : cf_(std::move(cf)), fp_(fp), cfg_(cfg) {
    if (!(cfg_.truncation_eps > 0.0 && cfg_.truncation_eps < 1.0))
        throw ConfigError("series: truncation_eps must lie in (0, 1)");
    if (cfg_.n0 < 2) throw ConfigError("series: n0 must be at least 2");
}

double SeriesEngine::log_tail(long n, double x, TailBackend* used) const {
    if (used) *used = TailBackend::ConvolutionExact;
    if (n == 0) return x <= 0.0 ? 0.0 : kLogZero;
    if (x == 0.0) return -std::numbers::ln2;
    const double nd = static_cast<double>(n);
    if (x < 0.0) {
        const double z = -x / nd;
        if (z >= cf_.dstar_bound()) return 0.0;
        // Chernoff: P(S_n >= nz) <= exp(−n(θz − Λ(θ))) for any admissible θ > 0.
        const double var0 = cf_.kernel().variance();
        const double theta = std::min({z / var0, 0.5 * cf_.domain_bound(), 64.0 / std::sqrt(var0)});
        if (-nd * (theta * z - cf_.lambda_cgf(theta)) < kNegligibleLog) return 0.0;
        const double up = log_tail(n, -x, used);
        return std::log1p(-std::exp(std::min(up, 0.0)));
    }
    const double z = x / nd;
    if (z >= cf_.dstar_bound()) return kLogZero;
    if (n >= cfg_.n0 && z <= cf_.z_limit()) {
        const SaddlePoint sp = cf_.saddle_point(z);
        if (nd * sp.zeta * sp.zeta * sp.cgf_pp >= cfg_.br_min_information) {
            const TailEstimate br = tail_bahadur_rao(cf_, n, x);
            if (!br.exceeds_one) {
                if (used) *used = TailBackend::BahadurRao;
                return br.log_value;
            }
        }
    }
    try {
        return tail_convolution(cf_, n, x).log_value;
    } catch (const GridError&) {
        if (z > 0.0 && z <= cf_.z_limit()) {
            if (used) *used = TailBackend::BahadurRao;
            return tail_bahadur_rao(cf_, n, x).log_value;
        }
        throw;
    }
}

double SeriesEngine::log_term(long n, double t, double x, TailBackend* used) const {
    const double lt = log_tail(n, x, used);
    if (lt == kLogZero) return kLogZero;
    const double nd = static_cast<double>(n);
    const double lw = n == 0 ? 0.0 : nd * std::log(t) - std::lgamma(nd + 1.0);
    return (fp_.r - 1.0) * t + lw + lt;
}

long SeriesEngine::peak_generation(double t, double x) const {
    if (!(t > 0.0)) return 0;
    std::map<long, double> memo;
    auto f = [&](long n) {
        auto it = memo.find(n);
        if (it != memo.end()) return it->second;
        const double v = log_term(n, t, x);
        memo.emplace(n, v);
        return v;
    };
    long n = x > 0.0 ? static_cast<long>(std::floor(fp_.alpha * t)) : static_cast<long>(std::floor(t));
    n = std::max(n, 1L);
    // Terms vanish below ⌈x/A⌉ for compact kernels; start inside the support.
    if (std::isfinite(cf_.dstar_bound()) && x > 0.0)
        n = std::max(n, static_cast<long>(std::floor(x / cf_.dstar_bound())) + 1);
    const double here = f(n);
    int dir = 0;
    if (f(n + 1) > here)
        dir = 1;
    else if (n > 0 && f(n - 1) > here)
        dir = -1;
    if (dir == 0) return n;

    // Gallop to a bracket [lo, hi] containing the maximum, then integer golden search.
    long prev = n, cur = n + dir, step = 1;
    for (;;) {
        long next = cur + dir * step;
        if (dir < 0) next = std::max(next, 0L);
        if (next == cur || f(next) <= f(cur)) {
            long lo = std::min(prev, next), hi = std::max(prev, next);
            while (hi - lo > 2) {
                const long m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
                if (f(m1) < f(m2))
                    lo = m1;
                else
                    hi = m2;
            }
            long best = lo;
            for (long k = lo; k <= hi; ++k)
                if (f(k) > f(best)) best = k;
            return best;
        }
        prev = cur;
        cur = next;
        step *= 2;
    }
}

SeriesValue SeriesEngine::scan(double t, double x, long start, long n_lo, long n_hi) const {
    const double log_eps = std::log(cfg_.truncation_eps);
    SeriesValue out;
    std::vector<std::pair<long, double>> terms;
    auto eval = [&](long n) {
        TailBackend used;
        const double v = log_term(n, t, x, &used);
        if (used == TailBackend::BahadurRao)
            ++out.br_terms;
        else
            ++out.exact_terms;
        terms.emplace_back(n, v);
        return v;
    };
    double running = kLogZero;
    const double first = eval(start);
    running = first;
    long lowest = start, highest = start;

    // Downward: every skipped term is below the last one, so n·T bounds the rest.
    double prev = first;
    for (long n = start - 1; n >= n_lo; --n) {
        const double v = eval(n);
        lowest = n;
        running = log_add(running, v);
        const bool decreasing = v <= prev;
        prev = v;
        if (v == kLogZero && decreasing) break;
        if (decreasing && v + std::log(static_cast<double>(n) + 1.0) < log_eps + running) break;
    }
    // Upward: geometric bound T ρ/(1−ρ) once consecutive ratios ρ drop below 1.
    prev = first;
    for (long n = start + 1; n <= n_hi; ++n) {
        const double v = eval(n);
        highest = n;
        running = log_add(running, v);
        const double log_ratio = v - prev;
        prev = v;
        if (v == kLogZero) break;
        if (log_ratio < 0.0) {
            const double rho = std::exp(log_ratio);
            if (v + std::log(rho / (1.0 - rho)) < log_eps + running) break;
        }
        if (n == kNoUpperLimit) break;
    }

    std::sort(terms.begin(), terms.end());
    std::vector<double> logs;
    logs.reserve(terms.size());
    double best = kLogZero;
    out.n_star = start;
    for (const auto& [n, v] : terms) {
        logs.push_back(v);
        if (v > best) {
            best = v;
            out.n_star = n;
        }
    }
    out.log_value = log_sum_exp(logs);
    out.value = std::exp(out.log_value);
    out.n_first = lowest;
    out.n_last = highest;
    return out;
}

SeriesValue SeriesEngine::u_linear(double t, double x) const { return block_sum(t, x, 0, kNoUpperLimit); }

SeriesValue SeriesEngine::block_sum(double t, double x, long n_lo, long n_hi) const {
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("series: t must be finite and >= 0");
    if (!std::isfinite(x)) throw DomainError("series: x must be finite");
    n_lo = std::max(n_lo, 0L);
    if (n_hi < n_lo) {
        SeriesValue empty;
        empty.log_value = kLogZero;
        empty.n_first = n_lo;
        empty.n_last = n_lo - 1;
        return empty;
    }
    if (t == 0.0) {
        SeriesValue v;
        v.log_value = (n_lo == 0 && x <= 0.0) ? 0.0 : kLogZero;
        v.value = std::exp(v.log_value);
        v.n_first = v.n_last = v.n_star = 0;
        return v;
    }
    const long peak = peak_generation(t, x);
    return scan(t, x, std::clamp(peak, n_lo, n_hi), n_lo, n_hi);
}

double SeriesEngine::partial_sum(double t, double x, double a, double b) const {
    if (!(a < b)) throw DomainError("partial_sum: need a < b");
    const long lo = a <= 0.0 ? 0 : static_cast<long>(std::floor(a * t)) + 1;
    const long hi = std::isfinite(b) ? static_cast<long>(std::floor(b * t)) : kNoUpperLimit;
    return block_sum(t, x, lo, hi).log_value;
}

PartialSumReport SeriesEngine::six_part_diagnostic(double t, double m_t, double eps_minus, double eps_plus, double a,
                                                   double big_b) const {
    const double alpha = fp_.alpha;
    if (!(0.0 < a && a < alpha - eps_minus && eps_minus > 0.0 && eps_plus > 0.0 && alpha + eps_plus < big_b))
        throw DomainError("six_part_diagnostic: need 0 < a < α−ε₋ < α < α+ε₊ < B");
    if (!(t > 0.0)) throw DomainError("six_part_diagnostic: t must be positive");
    PartialSumReport rep;
    rep.t = t;
    rep.x = fp_.c * t - m_t;
    rep.breakpoints = {a, alpha - eps_minus, alpha, alpha + eps_plus, big_b};
    std::vector<long> edges;
    for (double bp : rep.breakpoints) edges.push_back(static_cast<long>(std::floor(bp * t)));
    long lo = 0;
    std::vector<double> logs;
    for (std::size_t i = 0; i <= edges.size(); ++i) {
        const long hi = i < edges.size() ? edges[i] : kNoUpperLimit;
        const SeriesValue v = block_sum(t, rep.x, lo, hi);
        rep.segments.push_back({lo, hi, v.log_value});
        logs.push_back(v.log_value);
        if (i < edges.size()) lo = hi + 1;
    }
    rep.log_total = log_sum_exp(logs);
    for (std::size_t i = 1; i < rep.segments.size(); ++i)
        if (rep.segments[i].log_sum > rep.segments[rep.dominant].log_sum) rep.dominant = i;
    rep.n_star = peak_generation(t, rep.x);
    rep.log_head_bound = fp_.r * t + log_tail(edges.front(), rep.x);
    const double nb = static_cast<double>(edges.back());
    rep.log_tail_bound = fp_.r * t + nb * std::log(t) - std::lgamma(nb + 1.0);
    return rep;
}

std::vector<CentralRow> SeriesEngine::central_behavior(const std::vector<double>& times,
                                                       const std::function<double(double)>& m_fun) const {
    std::vector<CentralRow> rows;
    for (double t : times) {
        const double m = m_fun(t);
        const double lu = u_linear(t, fp_.c * t - m).log_value;
        rows.push_back({t, m, lu, lu + 0.5 * std::log(t) - fp_.lambda_r * m});
    }
    return rows;
}

}  // namespace nlfront
