#pragma once

#include <string>
#include <vector>

#include "nlfront/cumulant.hpp"

namespace nlfront {

/// Kernels shipped for testing: gaussian:1, laplace:2, uniform:1,
/// truncgauss:1,2.5 and a tabulated unit Gaussian.
std::vector<Kernel> bundled_kernels();

struct RateFunctionCheck {
    double max_roundtrip = 0.0;       ///< |Λ'(ζ_m(z)) − z|
    double max_legendre_gap = 0.0;    ///< |Λ*(z) − sup_λ(λz − Λ(λ))| with an independent maximizer
    double max_derivative_error = 0.0;  ///< |FD (Λ*)'(z) − ζ_m(z)|
    double z_range = 0.0;
    std::size_t points = 0;
};

/// Duality and derivative checks of Λ* on a symmetric z grid inside the usable range.
RateFunctionCheck check_rate_function(const CumulantFunctions& cf, std::size_t points = 25);

struct CheckRow {
    std::string group;
    std::string name;
    bool passed = false;
    bool fatal = true;   ///< advisory rows do not fail the suite
    std::string detail;
};

struct SelfCheckReport {
    std::vector<CheckRow> rows;
    bool ok() const;
};

SelfCheckReport run_selfcheck();

}  // namespace nlfront
