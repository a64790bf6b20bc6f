#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace nlfront {

using Rng = std::mt19937_64;

enum class KernelFamily { Gaussian, Laplace, UniformCompact, TruncatedGaussian, Tabulated };

/// Point where the density or its slope is discontinuous. Lattice
/// discretizations place these on a node and apply an endpoint correction.
struct SingularPoint {
    double x;
    double mid_value;   ///< (J(x-) + J(x+)) / 2
    double value_jump;  ///< J(x+) - J(x-)
    double slope_jump;  ///< J'(x+) - J'(x-)
};

/// Exponentially weighted moments about `center`:
///   ∫ (x - center)^k e^{λx} J(x) dx = exp(log_scale) * m[k],  k = 0, 1, 2.
struct WeightedMoments {
    double log_scale = 0.0;
    double center = 0.0;
    std::array<double, 3> m{};

    double log_mass() const;
    double mean() const { return center + m[1] / m[0]; }
    double variance() const {
        const double d = m[1] / m[0];
        return m[2] / m[0] - d * d;
    }
};

struct TabulatedData {
    std::vector<double> x;
    std::vector<double> value;  ///< renormalized so the piecewise-linear interpolant integrates to 1
    double decay_rate = 0.0;    ///< estimated exponential decay rate of the outer tail (0 if not estimable)
    double decay_trend = 1.0;   ///< ratio of the decay rate at the table end to the rate at 75% of the tail
    bool compact = false;       ///< interpolant vanishes at both table ends
};

/// Symmetric dispersal density with its moment generating function and
/// sampling. Cheap to copy; tabulated data are shared.
class Kernel {
public:
    struct Gaussian { double sigma; };
    struct Laplace { double a; };
    struct UniformCompact { double halfwidth; };
    struct TruncatedGaussian { double sigma; double radius; double norm; };
    struct Tabulated { std::shared_ptr<const TabulatedData> data; };
    using Params = std::variant<Gaussian, Laplace, UniformCompact, TruncatedGaussian, Tabulated>;

    static Kernel gaussian(double sigma);
    static Kernel laplace(double a);
    static Kernel uniform(double halfwidth);
    static Kernel truncated_gaussian(double sigma, double radius);
    /// Linear interpolation of (x, J) on a strictly increasing grid, renormalized to unit mass.
    static Kernel tabulated(std::vector<double> x, std::vector<double> values);
    /// Two-column CSV (x, J(x)); lines starting with '#' and a non-numeric header are skipped.
    static Kernel from_csv(const std::string& path);
    /// "gaussian:SIGMA", "laplace:A", "uniform:HALFWIDTH", "truncgauss:SIGMA,RADIUS", "tabulated:PATH".
    static Kernel parse(const std::string& spec);

    KernelFamily family() const;
    const Params& params() const { return params_; }
    std::string name() const;

    double density(double x) const;
    double log_density(double x) const;

    /// M(λ). Closed form where one exists, otherwise adaptive quadrature.
    /// Throws DomainError if |λ| >= mgf_domain_bound().
    double mgf(double lambda) const;
    double mgf_quadrature(double lambda) const;
    bool has_closed_form_mgf() const;
    double log_mgf(double lambda) const;

    /// L_max: supremum of λ with finite exponential moment (may be +inf).
    double mgf_domain_bound() const;
    /// A = sup supp J (may be +inf).
    double support_sup() const;

    double variance() const;
    double scale() const;

    /// Interval carrying all but ~1e-16 of the mass of e^{λx} J(x).
    std::pair<double, double> tilted_range(double lambda) const;
    /// Non-smooth points of the density (quadrature splits there).
    std::vector<double> breakpoints() const;
    std::vector<SingularPoint> singular_points() const;

    WeightedMoments weighted_moments(double lambda) const;

    /// n i.i.d. draws from J.
    std::vector<double> sample(Rng& rng, std::size_t n) const;

    /// Set for tabulated kernels whose mgf bound is a numerical estimate.
    const std::string& warning() const { return warning_; }

private:
    explicit Kernel(Params p) : params_(std::move(p)) {}
    Params params_;
    std::string warning_;
};

/// Sampler for the exponentially tilted density e^{θx} J(x) / M(θ).
class TiltedSampler {
public:
    TiltedSampler(const Kernel& kernel, double theta);
    double operator()(Rng& rng) const;
    double theta() const { return theta_; }

private:
    struct Envelope {
        std::vector<double> lo, width, height;  ///< heights relative to exp(log_top)
        double log_top = 0.0;
        std::discrete_distribution<std::size_t> pick;
    };
    Kernel kernel_;
    double theta_;
    std::shared_ptr<Envelope> envelope_;  // compact families without a closed-form sampler
};

struct HypothesisCheck {
    std::string name;
    bool passed;
    std::string detail;
};

struct ValidationReport {
    std::vector<HypothesisCheck> checks;
    std::vector<std::string> warnings;
    double grid_resolution = 0.0;  ///< table spacing for tabulated kernels, else the probe spacing

    bool all_passed() const;
    bool passed(const std::string& name) const;
    /// Symmetry, normalization and thin tails: what the front theory needs.
    bool usable_for_theory() const;
};

ValidationReport validate_hypotheses(const Kernel& kernel);

}  // namespace nlfront
