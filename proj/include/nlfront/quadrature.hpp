#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>

namespace nlfront::quad {

/// Integrand returning up to three components at once; components beyond the
/// requested count are ignored.
using VectorIntegrand = std::function<std::array<double, 3>(double)>;

struct Result {
    std::array<double, 3> value{};
    double error = 0.0;
    int evaluations = 0;
};

/// Adaptive 21-point Gauss-Kronrod over [a, b], split first at `breaks`
/// (points inside the interval where the integrand is not smooth). Component
/// c is refined until its error estimate is below
/// max(abs_tol, rel_tol * max(|I_c|, |I_0| * ref_scale^c)); a positive
/// ref_scale keeps moment components that vanish by symmetry from stalling.
Result integrate(const VectorIntegrand& f, double a, double b, std::size_t components,
                 std::span<const double> breaks = {}, double rel_tol = 1e-12,
                 double abs_tol = 1e-300, double ref_scale = 0.0, int max_panels = 4000);

/// Scalar convenience wrapper.
double integrate_scalar(const std::function<double(double)>& f, double a, double b,
                        std::span<const double> breaks = {}, double rel_tol = 1e-12,
                        double abs_tol = 1e-300);

}  // namespace nlfront::quad
