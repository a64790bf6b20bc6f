#pragma once

#include <string>

#include "nlfront/cumulant.hpp"

namespace nlfront {

struct FrontParams {
    double r = 0.0;
    double c = 0.0;
    double lambda_r = 0.0;
    double alpha = 0.0;  ///< cλ_r − (r−1) = M(λ_r)
    double s = 0.0;      ///< 1 / (2 λ_r)
};

/// Residuals of the identities the front constants must satisfy.
struct FrontResiduals {
    double speed = 0.0;           ///< c − (M(λ_r)+r−1)/λ_r, relative
    double alpha = 0.0;           ///< α − M(λ_r), relative
    double first_order = 0.0;     ///< λ_r M'(λ_r) − M(λ_r) − (r−1)
    double tilt_identity = 0.0;   ///< λ_r − (Λ*)'(c/α)
};

/// Minimizes A(λ) = (M(λ)+r−1)/λ over (0, L_max): golden section inside an
/// automatically found bracket, then Newton on λM' − M − (r−1).
FrontParams critical_speed(const CumulantFunctions& cf, double r);
FrontResiduals front_residuals(const CumulantFunctions& cf, const FrontParams& fp);

/// g(y) = y(1 − ln y − Λ*(c/y)) + r − 1.
double g_function(const FrontParams& fp, const CumulantFunctions& cf, double y);
/// g'(y) = −ln y − Λ*(c/y) + (c/y) ζ_m(c/y).
double g_derivative(const FrontParams& fp, const CumulantFunctions& cf, double y);
/// Smallest y for which c/y is inside the usable range of Λ*.
double g_domain_min(const FrontParams& fp, const CumulantFunctions& cf);

struct LogValue {
    double log_value;
    double value;  ///< exp(log_value); 0 or inf when not representable
};

/// h^s(t,y) = exp((Λ*)'(c/s)·m − ln t + t·g(y)).
LogValue h_weight(const FrontParams& fp, const CumulantFunctions& cf, double s_anchor, double t, double y,
                  double m_t);

/// Delay constant of the local equation ∂u = ∂²u + ru: 1/(2√r).
double local_delay_constant(double r);

}  // namespace nlfront
