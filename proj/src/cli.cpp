#include "nlfront/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <thread>

#include "nlfront/config.hpp"
#include "nlfront/csv.hpp"
#include "nlfront/errors.hpp"
#include "nlfront/front_analysis.hpp"
#include "nlfront/selfcheck.hpp"
#include "nlfront/snapshot.hpp"
#include "nlfront/tail_oracle.hpp"

namespace nlfront {

namespace {

struct Common {
    std::string config_path;
    std::vector<std::string> sets;
    std::string kernel, reaction, output_dir, out_file;
    double r = kNaN;
    long seed = -1;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config_path, "Config file (flat key = value)");
    sub->add_option("--set", c.sets, "Override a config key: KEY=VALUE")->take_all();
    sub->add_option("--kernel", c.kernel, "gaussian:S | laplace:A | uniform:W | truncgauss:S,R | tabulated:PATH");
    sub->add_option("--r", c.r, "Growth rate f'(0)");
    sub->add_option("--seed", c.seed, "RNG seed");
}

ExperimentConfig resolve(const Common& c) {
    ConfigMap m = c.config_path.empty() ? ConfigMap{} : ConfigMap::load(c.config_path);
    for (const auto& kv : c.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects KEY=VALUE, got '" + kv + "'");
        m.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!c.kernel.empty()) m.set("kernel", c.kernel);
    if (!c.reaction.empty()) m.set("reaction", c.reaction);
    if (std::isfinite(c.r)) m.set("r", format_number(c.r));
    if (c.seed >= 0) m.set("seed", std::to_string(c.seed));
    ExperimentConfig cfg = ExperimentConfig::from_map(m);
    if (const char* env = std::getenv("NLFRONT_OUTPUT_DIR"); env && *env) cfg.output_dir = env;
    if (!c.output_dir.empty()) cfg.output_dir = c.output_dir;
    return cfg;
}

void emit(const CsvTable& table, const ExperimentConfig& cfg, const std::string& file, std::ostream& out) {
    if (file.empty())
        table.write(out, cfg.hash, cfg.seed);
    else
        table.save(file, cfg.hash, cfg.seed);
}

std::string prepare_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir + ": " + ec.message());
    return dir;
}

SeriesEngine make_series(const ExperimentConfig& cfg) {
    const CumulantFunctions cf(Kernel::parse(cfg.kernel));
    SeriesConfig sc;
    sc.truncation_eps = cfg.truncation_eps;
    sc.n0 = cfg.n0;
    sc.br_min_information = cfg.br_min_information;
    return SeriesEngine(cf, critical_speed(cf, cfg.r), sc);
}

std::vector<double> analysis_times(const ExperimentConfig& cfg) {
    return log_spaced_times(cfg.t_min, cfg.t_max, static_cast<std::size_t>(cfg.points));
}

FitWindow fit_window(const ExperimentConfig& cfg) {
    FitWindow w;
    if (cfg.fit_t_min > 0.0) w.t_min = cfg.fit_t_min;
    if (cfg.fit_t_max > 0.0) w.t_max = cfg.fit_t_max;
    return w;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"nlfront: linear and nonlinear nonlocal KPP front delays"};
    app.require_subcommand(1);
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    app.add_option("--threads", threads, "Upper bound on worker threads")->check(CLI::PositiveNumber);

    Common c;
    auto* speed = app.add_subcommand("speed", "Critical speed c, λ_r, α and s for a kernel and r");
    add_common(speed, c);
    speed->add_option("--out", c.out_file, "Write CSV here instead of stdout");

    double z_min = kNaN, z_max = kNaN;
    long z_points = 61;
    auto* rate = app.add_subcommand("rate-function", "Λ*, ζ_m and Λ'' at the saddle over a z range");
    add_common(rate, c);
    rate->add_option("--z-min", z_min);
    rate->add_option("--z-max", z_max);
    rate->add_option("--points", z_points)->check(CLI::Range(2L, 1000000L));
    rate->add_option("--out", c.out_file);

    long tail_n = 1;
    double tail_x = 0.0;
    std::string backend = "convolution";
    long samples = 100000;
    auto* tail = app.add_subcommand("tail", "P(S_n >= x) from one backend");
    add_common(tail, c);
    tail->add_option("--n", tail_n)->required()->check(CLI::PositiveNumber);
    tail->add_option("--x", tail_x)->required();
    tail->add_option("--backend", backend, "convolution | bahadur-rao | tilted-mc");
    tail->add_option("--samples", samples)->check(CLI::PositiveNumber);
    tail->add_option("--out", c.out_file);

    std::vector<double> s_times, s_xs;
    std::string m_spec;
    auto* series = app.add_subcommand("series", "Linear solution u(t, x) by the generation series");
    add_common(series, c);
    series->add_option("--t", s_times, "Times")->required();
    series->add_option("--x", s_xs, "Positions (default x = ct − m(t))");
    series->add_option("--m", m_spec, "m(t) for x = ct − m(t): const:M | beta:B (m = B ln t)");
    series->add_option("--out", c.out_file);

    bool binary = false;
    auto* simulate = app.add_subcommand("simulate", "Evolve a PDE and write snapshots and a front trace");
    add_common(simulate, c);
    simulate->add_option("--reaction", c.reaction, "logistic:R | custom:PATH");
    simulate->add_option("--output-dir", c.output_dir);
    simulate->add_flag("--binary", binary, "Also write binary snapshots");

    std::string trace_path;
    double fit_rho = kNaN;
    auto* dfit = app.add_subcommand("delay-fit", "Fit c·t − position against ln t on a trace CSV");
    add_common(dfit, c);
    dfit->add_option("--trace", trace_path, "CSV with columns t, position [, rho]")->required();
    dfit->add_option("--rho", fit_rho, "Use only rows with this level");
    dfit->add_option("--out", c.out_file);

    auto* validate = app.add_subcommand("validate", "Run the invariant suite");
    validate->add_option("--out", c.out_file);

    auto* repro = app.add_subcommand("reproduce-theorem", "Series traces, delay fit and a report against 1/(2λ_r)");
    add_common(repro, c);
    repro->add_option("--output-dir", c.output_dir);

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitConfig;
    }

    try {
        if (speed->parsed()) {
            const ExperimentConfig cfg = resolve(c);
            const CumulantFunctions cf(Kernel::parse(cfg.kernel));
            const FrontParams fp = critical_speed(cf, cfg.r);
            const FrontResiduals res = front_residuals(cf, fp);
            CsvTable t({"kernel", "r", "c", "lambda_r", "alpha", "s", "residual_speed", "residual_alpha",
                        "residual_first_order", "residual_tilt"});
            t.row() << cfg.kernel << fp.r << fp.c << fp.lambda_r << fp.alpha << fp.s << res.speed << res.alpha
                    << res.first_order << res.tilt_identity;
            emit(t, cfg, c.out_file, out);
        } else if (rate->parsed()) {
            const ExperimentConfig cfg = resolve(c);
            const CumulantFunctions cf(Kernel::parse(cfg.kernel));
            const double reach = std::min(3.0 * std::sqrt(cf.kernel().variance()), 0.99 * cf.z_limit());
            const double lo = std::isfinite(z_min) ? z_min : -reach;
            const double hi = std::isfinite(z_max) ? z_max : reach;
            if (!(hi > lo)) throw ConfigError("rate-function: need z-max > z-min");
            CsvTable t({"z", "lambda_star", "zeta_m", "lambda_pp_at_saddle"});
            for (long i = 0; i < z_points; ++i) {
                const double z = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(z_points - 1);
                const SaddlePoint sp = cf.saddle_point(z);
                t.row() << z << sp.rate << sp.zeta << sp.cgf_pp;
            }
            emit(t, cfg, c.out_file, out);
        } else if (tail->parsed()) {
            const ExperimentConfig cfg = resolve(c);
            const CumulantFunctions cf(Kernel::parse(cfg.kernel));
            TailEstimate e;
            switch (parse_tail_backend(backend)) {
                case TailBackend::ConvolutionExact:
                    e = tail_convolution(cf, tail_n, tail_x);
                    break;
                case TailBackend::BahadurRao:
                    e = tail_bahadur_rao(cf, tail_n, tail_x);
                    break;
                case TailBackend::TiltedMC: {
                    Rng rng(cfg.seed);
                    e = tail_tilted_mc(cf, tail_n, tail_x, static_cast<std::size_t>(samples), rng);
                    break;
                }
            }
            CsvTable t({"kernel", "n", "x", "backend", "value", "log_value", "error_bar"});
            t.row() << cfg.kernel << tail_n << tail_x << to_string(e.backend) << e.value << e.log_value << e.error_bar;
            emit(t, cfg, c.out_file, out);
        } else if (series->parsed()) {
            const ExperimentConfig cfg = resolve(c);
            const SeriesEngine se = make_series(cfg);
            const FrontParams& fp = se.params();
            std::function<double(double)> m_of = [](double) { return 0.0; };
            if (!m_spec.empty()) {
                const auto colon = m_spec.find(':');
                const std::string kind = m_spec.substr(0, colon);
                double v = 0.0;
                try {
                    v = std::stod(colon == std::string::npos ? "" : m_spec.substr(colon + 1));
                } catch (const std::exception&) {
                    throw ConfigError("--m expects const:M or beta:B");
                }
                if (kind == "const")
                    m_of = [v](double) { return v; };
                else if (kind == "beta")
                    m_of = [v](double t) { return v * std::log(t); };
                else
                    throw ConfigError("--m expects const:M or beta:B");
            }
            CsvTable t({"t", "x", "m", "log_u", "u", "n_first", "n_last", "n_star", "exact_terms", "br_terms"});
            for (double tt : s_times) {
                if (!(tt >= 0.0)) throw ConfigError("series: times must be non-negative");
                std::vector<std::pair<double, double>> pts;
                if (s_xs.empty())
                    pts.push_back({fp.c * tt - m_of(tt), m_of(tt)});
                else
                    for (double x : s_xs) pts.push_back({x, fp.c * tt - x});
                for (const auto& [x, m] : pts) {
                    const SeriesValue v = se.u_linear(tt, x);
                    t.row() << tt << x << m << v.log_value << v.value << v.n_first << v.n_last << v.n_star
                            << v.exact_terms << v.br_terms;
                }
            }
            emit(t, cfg, c.out_file, out);
        } else if (simulate->parsed()) {
            const ExperimentConfig cfg = resolve(c);
            const Kernel k = Kernel::parse(cfg.kernel);
            const CumulantFunctions cf(k);
            const bool nonlinear = cfg.mode == "nonlinear";
            const ReactionTerm reaction = ReactionTerm::parse(cfg.reaction);
            const double r = nonlinear ? reaction.r_at_zero() : cfg.r;
            const FrontParams fp = critical_speed(cf, r);
            double x_max = cfg.grid_x_max;
            if (x_max == 0.0) x_max = linear_front_extent(cf, fp, cfg.t_end) + 20.0 * k.scale() + 5.0;
            std::vector<double> snaps = cfg.snapshots.empty() ? std::vector<double>{cfg.t_end} : cfg.snapshots;
            const std::string dir = prepare_dir(cfg.output_dir);

            Field v = Field::step(cfg.grid_x_min, x_max, cfg.grid_dx, Frame::Raw);
            Field un = Field::step(cfg.grid_x_min, x_max, cfg.grid_dx, Frame::NormalizedLinear, r);
            Field ut = Field::step(cfg.grid_x_min, x_max, cfg.grid_dx, Frame::TiltedLinear, r, fp.lambda_r, fp.c);
            std::unique_ptr<PdeSolver> sv, sn, st;
            if (nonlinear) {
                sv = std::make_unique<PdeSolver>(k, reaction, v, cfg.dt);
            } else {
                sn = std::make_unique<PdeSolver>(k, LinearRate{r}, un, cfg.dt);
                st = std::make_unique<PdeSolver>(k, LinearRate{r}, ut, cfg.dt);
            }
            CsvTable trace({"t", "rho", "position", "source"});
            const TraceSource src = nonlinear ? TraceSource::PdeNonlinear : TraceSource::PdeLinear;
            for (std::size_t s = 0; s < snaps.size(); ++s) {
                CsvTable snap(nonlinear ? std::vector<std::string>{"x", "value"}
                                        : std::vector<std::string>{"x", "value", "log_value"});
                const std::string base = dir + "/snapshot_" + std::to_string(s);
                if (nonlinear) {
                    sv->advance(v, snaps[s]);
                    for (std::size_t i = 0; i < v.size(); ++i) snap.row() << v.x(i) << v.values[i];
                    if (binary) write_snapshot(base + ".nlfs", v);
                    for (double rho : cfg.rho) trace.row() << snaps[s] << rho << level_position(v, rho) << to_string(src);
                } else {
                    sn->advance(un, snaps[s]);
                    st->advance(ut, snaps[s]);
                    const std::vector<double> lu = combined_log_linear(un, ut);
                    for (std::size_t i = 0; i < un.size(); ++i) snap.row() << un.x(i) << std::exp(lu[i]) << lu[i];
                    if (binary) {
                        write_snapshot(base + "_normalized.nlfs", un);
                        write_snapshot(base + "_tilted.nlfs", ut);
                    }
                    for (double rho : cfg.rho)
                        trace.row() << snaps[s] << rho << level_position(un, lu, rho) << to_string(src);
                }
                snap.save(base + ".csv", cfg.hash, cfg.seed);
            }
            trace.save(dir + "/front_trace.csv", cfg.hash, cfg.seed);
            out << "wrote " << snaps.size() << " snapshots and front_trace.csv to " << dir << "\n";
        } else if (dfit->parsed()) {
            const ExperimentConfig cfg = resolve(c);
            const CumulantFunctions cf(Kernel::parse(cfg.kernel));
            const FrontParams fp = critical_speed(cf, cfg.r);
            const CsvData data = read_csv(trace_path);
            const auto ts = data.numbers("t");
            const auto ps = data.numbers("position");
            std::vector<double> rhos;
            bool has_rho = std::find(data.header.begin(), data.header.end(), "rho") != data.header.end();
            if (has_rho) rhos = data.numbers("rho");
            FrontTrace tr;
            for (std::size_t i = 0; i < ts.size(); ++i) {
                if (std::isfinite(fit_rho) && has_rho && std::abs(rhos[i] - fit_rho) > 1e-12) continue;
                tr.times.push_back(ts[i]);
                tr.positions.push_back(ps[i]);
            }
            if (has_rho && !std::isfinite(fit_rho) && !tr.times.empty() &&
                std::any_of(rhos.begin(), rhos.end(), [&](double x) { return x != rhos.front(); }))
                throw ConfigError("delay-fit: trace holds several levels; pick one with --rho");
            const DelayFit fit = delay_fit(tr, fp, fit_window(cfg));
            CsvTable t({"c_used", "s_hat", "intercept", "t_min", "t_max", "points", "residual_rms", "s_theory",
                        "relative_error"});
            t.row() << fit.c_used << fit.s_hat << fit.intercept << fit.t_min << fit.t_max << fit.points
                    << fit.residual_rms << fit.s_theory << fit.relative_error();
            emit(t, cfg, c.out_file, out);
        } else if (validate->parsed()) {
            const SelfCheckReport rep = run_selfcheck();
            ExperimentConfig cfg = ExperimentConfig::from_map(ConfigMap{});
            CsvTable t({"group", "check", "passed", "fatal", "detail"});
            for (const auto& row : rep.rows) t.row() << row.group << row.name << row.passed << row.fatal << row.detail;
            emit(t, cfg, c.out_file, out);
            return rep.ok() ? kExitOk : kExitNumeric;
        } else if (repro->parsed()) {
            const ExperimentConfig cfg = resolve(c);
            const SeriesEngine se = make_series(cfg);
            const FrontParams& fp = se.params();
            const std::string dir = prepare_dir(cfg.output_dir);
            const auto times = analysis_times(cfg);
            CsvTable trace({"rho", "t", "position", "residual"});
            CsvTable report({"kernel", "r", "c", "lambda_r", "s_theory", "rho", "s_hat", "intercept",
                             "relative_error", "residual_rms", "points", "t_min", "t_max", "within_15pct"});
            for (double rho : cfg.rho) {
                const FrontTrace tr = series_trace(se, rho, times, threads);
                for (std::size_t i = 0; i < tr.times.size(); ++i) {
                    const double t = tr.times[i];
                    trace.row() << rho << t << tr.positions[i] << tr.positions[i] - fp.c * t + fp.s * std::log(t);
                }
                const DelayFit fit = delay_fit(tr, fp, fit_window(cfg));
                report.row() << cfg.kernel << fp.r << fp.c << fp.lambda_r << fp.s << rho << fit.s_hat
                             << fit.intercept << fit.relative_error() << fit.residual_rms << fit.points << fit.t_min
                             << fit.t_max << (fit.relative_error() <= 0.15);
            }
            trace.save(dir + "/trace.csv", cfg.hash, cfg.seed);
            report.save(dir + "/report.csv", cfg.hash, cfg.seed);
            report.write(out, cfg.hash, cfg.seed);
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitOk;
}

int run_cli(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_cli(args, std::cout, std::cerr);
}

}  // namespace nlfront
