#include "nlfront/numeric.hpp"

#include <algorithm>
#include <numbers>

namespace nlfront {

double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double log_normal_sf(double x) {
    if (x < 30.0) return std::log(normal_sf(x));
    // Mills-ratio expansion; the first omitted term is O(x^-8).
    const double x2 = x * x;
    const double series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2);
    return -0.5 * x2 - std::log(x) - 0.5 * std::log(2.0 * std::numbers::pi) + std::log(series);
}

double log_add(double a, double b) {
    if (a == kLogZero) return b;
    if (b == kLogZero) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double log_sum_exp(std::span<const double> log_terms) {
    double hi = kLogZero;
    for (double v : log_terms) hi = std::max(hi, v);
    if (hi == kLogZero || !std::isfinite(hi)) return hi;
    double sum = 0.0, comp = 0.0;
    for (double v : log_terms) {
        const double term = std::exp(v - hi);
        const double t = sum + term;
        if (std::abs(sum) >= std::abs(term))
            comp += (sum - t) + term;
        else
            comp += (term - t) + sum;
        sum = t;
    }
    return hi + std::log(sum + comp);
}

}  // namespace nlfront
