#include "nlfront/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace nlfront::quad {

namespace {

// Kronrod nodes (positive half, descending) and weights for the 21-point rule,
// with the embedded 10-point Gauss weights on the odd-indexed nodes.
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525181580, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
    double a, b;
    std::array<double, 3> value;
    std::array<double, 3> error;
    double worst;
    bool operator<(const Panel& o) const { return worst < o.worst; }
};

Panel gk21(const VectorIntegrand& f, double a, double b, std::size_t m) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    std::array<double, 3> kron{}, gauss{};
    const auto fc = f(centre);
    for (std::size_t c = 0; c < m; ++c) kron[c] = fc[c] * kWgk[10];
    for (int j = 0; j < 10; ++j) {
        const double dx = half * kXgk[j];
        const auto f1 = f(centre - dx);
        const auto f2 = f(centre + dx);
        for (std::size_t c = 0; c < m; ++c) {
            const double s = f1[c] + f2[c];
            kron[c] += kWgk[j] * s;
            if (j % 2 == 1) gauss[c] += kWg[j / 2] * s;
        }
    }
    Panel p{a, b, {}, {}, 0.0};
    for (std::size_t c = 0; c < m; ++c) {
        p.value[c] = kron[c] * half;
        p.error[c] = std::abs((kron[c] - gauss[c]) * half);
    }
    return p;
}

}  // namespace

Result integrate(const VectorIntegrand& f, double a, double b, std::size_t components,
                 std::span<const double> breaks, double rel_tol, double abs_tol, double ref_scale,
                 int max_panels) {
    const std::size_t m = std::min<std::size_t>(components, 3);
    Result out;
    if (!(b > a)) return out;

    std::vector<double> cuts{a};
    for (double x : breaks)
        if (x > a && x < b) cuts.push_back(x);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::vector<Panel> panels;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) panels.push_back(gk21(f, cuts[i], cuts[i + 1], m));
    out.evaluations = static_cast<int>(panels.size()) * 21;

    auto totals = [&](std::array<double, 3>& val, std::array<double, 3>& err) {
        val = {};
        err = {};
        for (const auto& p : panels)
            for (std::size_t c = 0; c < m; ++c) {
                val[c] += p.value[c];
                err[c] += p.error[c];
            }
    };

    std::array<double, 3> val{}, err{};
    auto tolerance = [&](std::size_t c) {
        double ref = std::abs(val[c]);
        if (ref_scale > 0.0) ref = std::max(ref, std::abs(val[0]) * std::pow(ref_scale, double(c)));
        return std::max(abs_tol, rel_tol * ref);
    };
    for (int iter = 0; iter < max_panels; ++iter) {
        totals(val, err);
        bool done = true;
        for (std::size_t c = 0; c < m; ++c)
            if (err[c] > tolerance(c)) done = false;
        if (done) break;
        // Bisect the panel with the largest error relative to its component tolerance.
        std::size_t worst = 0;
        double worst_score = -1.0;
        for (std::size_t i = 0; i < panels.size(); ++i) {
            double score = 0.0;
            for (std::size_t c = 0; c < m; ++c) score = std::max(score, panels[i].error[c] / tolerance(c));
            if (score > worst_score) {
                worst_score = score;
                worst = i;
            }
        }
        const Panel p = panels[worst];
        const double mid = 0.5 * (p.a + p.b);
        if (!(mid > p.a && mid < p.b)) break;
        panels[worst] = gk21(f, p.a, mid, m);
        panels.push_back(gk21(f, mid, p.b, m));
        out.evaluations += 42;
    }
    totals(val, err);
    out.value = val;
    out.error = 0.0;
    for (std::size_t c = 0; c < m; ++c) out.error = std::max(out.error, err[c]);
    return out;
}

double integrate_scalar(const std::function<double(double)>& f, double a, double b,
                        std::span<const double> breaks, double rel_tol, double abs_tol) {
    VectorIntegrand g = [&](double x) { return std::array<double, 3>{f(x), 0.0, 0.0}; };
    return integrate(g, a, b, 1, breaks, rel_tol, abs_tol).value[0];
}

}  // namespace nlfront::quad
