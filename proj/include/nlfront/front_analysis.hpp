#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "nlfront/numeric.hpp"
#include "nlfront/pde.hpp"
#include "nlfront/series.hpp"

namespace nlfront {

enum class TraceSource { SeriesLinear, PdeLinear, PdeNonlinear };
std::string to_string(TraceSource s);

/// Level positions over time; NaN where the level is not attained.
struct FrontTrace {
    double rho = 1.0;
    std::vector<double> times;
    std::vector<double> positions;
    TraceSource source = TraceSource::SeriesLinear;

    std::size_t valid_count() const;
};

struct FitWindow {
    double t_min = 0.0;
    double t_max = kInf;
};

struct DelayFit {
    double c_used = 0.0;
    double s_hat = 0.0;
    double intercept = 0.0;
    double t_min = 0.0;        ///< smallest time used
    double t_max = 0.0;        ///< largest time used
    std::size_t points = 0;
    double residual_rms = 0.0;
    double s_theory = 0.0;

    double relative_error() const { return std::abs(s_hat - s_theory) / s_theory; }
};

/// Rightmost crossing of the level rho, linearly interpolated; NaN if never attained.
/// Linear frames are compared in log space so e^{rt}-sized values never form.
double level_position(const Field& field, double rho);
/// Same on a grid of log values (e.g. combined_log_linear output).
double level_position(const Field& layout, const std::vector<double>& log_values, double rho);
/// Crossing of u_linear(t, ·) = rho to absolute tolerance `tol` in x.
double level_position(const SeriesEngine& series, double t, double rho, double tol = 1e-4);

/// t_min·(t_max/t_min)^{k/(count−1)}, k = 0..count−1.
std::vector<double> log_spaced_times(double t_min, double t_max, std::size_t count);

/// Series level positions; the times are split across `threads` workers.
FrontTrace series_trace(const SeriesEngine& series, double rho, const std::vector<double>& times,
                        unsigned threads = 1, double tol = 1e-4);

/// Least squares of c·t − position against ln t over the window.
/// Throws InsufficientData with fewer than 8 points or t_max/t_min < 16.
DelayFit delay_fit(const FrontTrace& trace, const FrontParams& fp, FitWindow window);
inline DelayFit delay_fit(const FrontTrace& trace, const FrontParams& fp) { return delay_fit(trace, fp, FitWindow{}); }

/// position − c·t + s·ln t at each valid time; bounded by the delay result.
std::vector<double> delay_residuals(const FrontTrace& trace, const FrontParams& fp);

struct DelayBoundRow {
    double t;
    double theta;   ///< nonlinear level position
    double sigma;   ///< linear level position (series)
    double slack;   ///< sigma − theta
    double max_excess;  ///< max(v − u) over the grid
};

struct DelayBoundReport {
    double rho = 0.5;
    bool kpp = false;
    std::vector<DelayBoundRow> rows;
    double min_slack = kInf;
    double max_excess = -kInf;
    bool certified = false;  ///< every slack and excess within tolerance
    double tolerance = 1e-6;
    std::string note;
};

/// Nonlinear level positions from the PDE against linear ones from the series,
/// with the pointwise comparison at each probe.
DelayBoundReport delay_bound_check(const Kernel& kernel, const ReactionTerm& reaction, double dt,
                                   const std::vector<double>& times, double rho, const ComparisonGrid& grid = {});

}  // namespace nlfront
