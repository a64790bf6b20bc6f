#pragma once

#include <cstddef>
#include <string>

#include "nlfront/cumulant.hpp"
#include "nlfront/kernel.hpp"

namespace nlfront {

enum class TailBackend { ConvolutionExact, BahadurRao, TiltedMC };

std::string to_string(TailBackend b);
TailBackend parse_tail_backend(const std::string& name);

struct TailEstimate {
    double value = 0.0;       ///< in [0, 1]; Bahadur-Rao values above 1 are clamped and flagged
    double log_value = 0.0;   ///< unclamped
    double error_bar = -1.0;  ///< 95% CI half-width for Monte Carlo, else negative (none)
    TailBackend backend = TailBackend::ConvolutionExact;
    bool exceeds_one = false;

    bool has_error_bar() const { return error_bar >= 0.0; }
};

/// Convolution grid override. Zero fields are chosen automatically; an
/// explicit grid that fails the aliasing check raises GridError instead of
/// being enlarged.
struct GridSpec {
    double spacing = 0.0;
    std::size_t size = 0;

    bool automatic() const { return spacing == 0.0 && size == 0; }
};

/// P(S_n >= x) from the n-fold convolution of the lattice kernel. The lattice
/// law is tilted by ζ_m(x/n) so the mass near x is O(1), transformed, raised
/// to the n-th power coefficient-wise, and integrated from x.
TailEstimate tail_convolution(const CumulantFunctions& cf, long n, double x, const GridSpec& grid = {});

/// e^{−nΛ*(z)} / (ζ_m(z) √(2πnΛ''(ζ_m(z)))) with z = x/n > 0.
TailEstimate tail_bahadur_rao(const CumulantFunctions& cf, long n, double x);

/// Importance sampling from the ζ_m(x/n)-tilted kernel.
TailEstimate tail_tilted_mc(const CumulantFunctions& cf, long n, double x, std::size_t samples, Rng& rng);

/// Lattice density of S_n under tilt θ, as (positions, masses); masses sum to ~1.
struct WalkLaw {
    double h = 0.0;
    long first = 0;
    std::vector<double> mass;
    double outer_mass = 0.0;  ///< mass in the outer sixteenth on either side (aliasing indicator)
};
WalkLaw walk_law(const CumulantFunctions& cf, long n, double theta, double center, const GridSpec& grid = {});

}  // namespace nlfront
