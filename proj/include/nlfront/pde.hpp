#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nlfront/front_theory.hpp"
#include "nlfront/kernel.hpp"

namespace nlfront {

/// Monostable reaction f on [0,1] with f(0) = f(1) = 0 and f > 0 inside.
class ReactionTerm {
public:
    static ReactionTerm logistic(double r);
    /// Values of f on a uniform grid of [0, 1], interpolated linearly.
    static ReactionTerm custom(std::vector<double> values);
    /// One column of f values, or two columns (v, f) on a uniform v grid.
    static ReactionTerm from_csv(const std::string& path);
    /// "logistic:R" or "custom:PATH".
    static ReactionTerm parse(const std::string& spec);

    double operator()(double v) const;
    double r_at_zero() const { return r0_; }
    double lipschitz() const { return lip_; }
    /// f(u) <= f'(0) u on a 10^4-point grid.
    bool kpp() const { return kpp_; }
    std::string name() const;

private:
    ReactionTerm() = default;
    void finish();

    double logistic_r_ = 0.0;
    std::shared_ptr<const std::vector<double>> table_;
    double r0_ = 0.0;
    double lip_ = 0.0;
    bool kpp_ = false;
};

struct LinearRate {
    double r;
};

using Dynamics = std::variant<ReactionTerm, LinearRate>;

enum class Frame {
    Raw,               ///< v itself (nonlinear problem)
    NormalizedLinear,  ///< ũ = e^{−rt} u
    TiltedLinear,      ///< ŭ = e^{λ(x−ct)} u, O(1) near the linear front at any t
};

std::string to_string(Frame f);

/// Values on the uniform grid x_i = x_min + i dx.
struct Field {
    double x_min = 0.0;
    double dx = 0.0;
    std::vector<double> values;
    double time = 0.0;
    Frame frame = Frame::Raw;
    double r = 0.0;      ///< growth rate for linear frames
    double tilt = 0.0;   ///< λ of the tilted frame
    double speed = 0.0;  ///< c of the tilted frame

    std::size_t size() const { return values.size(); }
    double x(std::size_t i) const { return x_min + static_cast<double>(i) * dx; }
    double x_max() const { return x(values.size() - 1); }
    /// log of the solution u (linear frames) or v (raw) at node i.
    double log_solution(std::size_t i) const;

    /// Step datum 1_{x<=0} with the value 1/2 at a node sitting on x = 0.
    static Field step(double x_min, double x_max, double dx, Frame frame, double r = 0.0, double tilt = 0.0,
                      double speed = 0.0);
};

struct EvolveOptions {
    double band_tol = 1e-6;       ///< allowed excursion outside the invariant band
    double guard_scales = 20.0;   ///< right guard band width in kernel scales
    bool check_guard = true;
    /// Far-field values beyond the grid; unset means the step-datum values
    /// (1 left, 0 right; 0 on both sides in the tilted frame).
    std::optional<double> left_pad;
    std::optional<double> right_pad;
};

/// Method-of-lines RK4 with FFT convolution against the lattice kernel.
class PdeSolver {
public:
    PdeSolver(const Kernel& kernel, Dynamics dynamics, const Field& layout, double dt, EvolveOptions opts = {});
    ~PdeSolver();
    PdeSolver(const PdeSolver&) = delete;
    PdeSolver& operator=(const PdeSolver&) = delete;

    /// Advance `field` to absolute time t_target with steps no longer than dt.
    void advance(Field& field, double t_target);
    double dt() const { return dt_; }
    /// Largest stable step for this problem.
    double max_stable_dt() const { return dt_max_; }

private:
    struct Impl;
    void rhs(const std::vector<double>& v, double t, std::vector<double>& out);
    void check(const Field& f) const;

    std::unique_ptr<Impl> impl_;
    Dynamics dynamics_;
    Frame frame_;
    double dt_;
    double dt_max_;
    EvolveOptions opts_;
};

Field evolve(const Field& field, const Kernel& kernel, const Dynamics& dynamics, double dt, double t_end,
             const EvolveOptions& opts = {});

struct ComparisonProbe {
    double t;
    double max_excess;  ///< max over the grid of v − u
};

struct ComparisonReport {
    bool certified = false;  ///< reaction passed the KPP flag and v <= u held within tolerance
    bool kpp = false;
    double tolerance = 1e-6;
    std::vector<ComparisonProbe> probes;
    std::vector<Field> nonlinear;                ///< v at each probe
    std::vector<std::vector<double>> linear_log; ///< log u on the same grid at each probe
    std::string note;
};

struct ComparisonGrid {
    double x_min = -30.0;
    double dx = 0.05;
    double x_max = 0.0;  ///< 0 = sized from the front speed and t_end
};

/// Runs v (nonlinear) and u (linear, through the normalized and tilted
/// frames) from the same step datum and reports max(v − u) at probe times.
ComparisonReport comparison_check(const Kernel& kernel, const ReactionTerm& reaction, double dt, double t_end,
                                  const std::vector<double>& probe_times, const ComparisonGrid& grid = {});

/// Linear solution on the grid assembled from the two linear frames: the
/// normalized frame behind the point ct − rt/λ, the tilted frame ahead of it.
std::vector<double> combined_log_linear(const Field& normalized, const Field& tilted);

/// Right end sufficient for the tilted linear frame at time t_end.
double linear_front_extent(const CumulantFunctions& cf, const FrontParams& fp, double t_end);

}  // namespace nlfront
