#pragma once

#include <functional>
#include <limits>
#include <map>
#include <vector>

#include "nlfront/front_theory.hpp"
#include "nlfront/tail_oracle.hpp"

namespace nlfront {

struct SeriesConfig {
    double truncation_eps = 1e-12;
    long n0 = 64;                       ///< exact convolution below this generation count
    double br_min_information = 50.0;   ///< Bahadur-Rao needs n ζ² Λ''(ζ) at least this large
};

inline constexpr long kNoUpperLimit = std::numeric_limits<long>::max();

struct SeriesValue {
    double log_value = 0.0;
    double value = 0.0;   ///< exp(log_value), inf when not representable
    long n_first = 0;     ///< lowest generation summed
    long n_last = 0;      ///< highest generation summed
    long n_star = 0;      ///< generation with the largest term
    long exact_terms = 0;
    long br_terms = 0;

    long terms() const { return n_last >= n_first ? n_last - n_first + 1 : 0; }
};

struct PartialSegment {
    long n_lo;   ///< inclusive
    long n_hi;   ///< inclusive, kNoUpperLimit for the open tail
    double log_sum;
};

struct PartialSumReport {
    double t = 0.0;
    double x = 0.0;
    std::vector<double> breakpoints;   ///< the a-values; segment edges are ⌊a t⌋
    std::vector<PartialSegment> segments;
    std::size_t dominant = 0;
    long n_star = 0;
    double log_total = 0.0;
    double log_head_bound = 0.0;       ///< log(e^{rt} P(S_{⌊at⌋} >= x))
    double log_tail_bound = 0.0;       ///< log(e^{rt} t^{⌊Bt⌋} / ⌊Bt⌋!)
};

struct CentralRow {
    double t;
    double m;
    double log_u;
    double log_normalized;  ///< log(u √t e^{−λ_r m})
};

/// The Feynman-Kac series u(t,x) = e^{(r−1)t} Σ_n t^n/n! P(S_n >= x),
/// summed in log space outward from its largest term.
class SeriesEngine {
public:
    SeriesEngine(CumulantFunctions cf, FrontParams fp, SeriesConfig cfg = {});

    const FrontParams& params() const { return fp_; }
    const SeriesConfig& config() const { return cfg_; }
    const CumulantFunctions& cumulants() const { return cf_; }

    /// log P(S_n >= x) with the configured backend policy.
    double log_tail(long n, double x, TailBackend* used = nullptr) const;
    /// log of the n-th series term at (t, x).
    double log_term(long n, double t, double x, TailBackend* used = nullptr) const;

    SeriesValue u_linear(double t, double x) const;
    /// Sum over n in [n_lo, n_hi] (inclusive; n_hi may be kNoUpperLimit).
    SeriesValue block_sum(double t, double x, long n_lo, long n_hi) const;
    /// log of the sum over n in (⌊at⌋, ⌊bt⌋]; a <= 0 includes n = 0, b = +inf is allowed.
    double partial_sum(double t, double x, double a, double b) const;

    PartialSumReport six_part_diagnostic(double t, double m_t, double eps_minus, double eps_plus, double a,
                                         double big_b) const;
    std::vector<CentralRow> central_behavior(const std::vector<double>& times,
                                             const std::function<double(double)>& m_fun) const;

    /// Generation with the largest term (terms are unimodal in n).
    long peak_generation(double t, double x) const;

private:
    SeriesValue scan(double t, double x, long start, long n_lo, long n_hi) const;

    CumulantFunctions cf_;
    FrontParams fp_;
    SeriesConfig cfg_;
};

}  // namespace nlfront
