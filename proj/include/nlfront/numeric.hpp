#pragma once

#include <cmath>
#include <limits>
#include <span>

namespace nlfront {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

/// Standard normal survival function  P(N(0,1) > x).
double normal_sf(double x);
/// log P(N(0,1) > x), accurate far into the upper tail.
double log_normal_sf(double x);

double log_add(double a, double b);

/// Log of a sum of exp(terms) with a max shift and Neumaier-compensated
/// accumulation in index order.
double log_sum_exp(std::span<const double> log_terms);

/// exp(v) or 0/inf when out of range; keeps the log form authoritative.
inline double exp_or_limit(double v) { return std::exp(v); }

}  // namespace nlfront
