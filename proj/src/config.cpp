#include "nlfront/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nlfront/errors.hpp"

namespace nlfront {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_list(const std::vector<double>& vs) {
    std::string out;
    for (std::size_t i = 0; i < vs.size(); ++i) out += (i ? "," : "") + fmt(vs[i]);
    return out;
}

}  // namespace

ConfigMap ConfigMap::parse(const std::string& text, const std::string& origin) {
    ConfigMap m;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(origin + ":" + std::to_string(lineno) + ": bad section line");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        if (!section.empty()) key = section + "." + key;
        m.values_[key] = trim(line.substr(eq + 1));
    }
    return m;
}

ConfigMap ConfigMap::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

std::string ConfigMap::get(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        std::size_t used = 0;
        const double v = std::stod(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': not a number: '" + it->second + "'");
    }
}

long ConfigMap::get_long(const std::string& key, long fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    try {
        std::size_t used = 0;
        const long v = std::stol(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': not an integer: '" + it->second + "'");
    }
}

std::vector<double> ConfigMap::get_list(const std::string& key, const std::vector<double>& fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    std::string item;
    std::istringstream in(it->second);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw ConfigError("key '" + key + "': bad list entry '" + item + "'");
        }
    }
    return out;
}

void ConfigMap::reject_unknown(const std::vector<std::string>& known) const {
    for (const auto& [k, v] : values_)
        if (std::find(known.begin(), known.end(), k) == known.end()) throw ConfigError("unknown config key '" + k + "'");
}

std::string ConfigMap::canonical() const {
    std::string out;
    for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
    return out;
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

const std::vector<std::string>& ExperimentConfig::keys() {
    static const std::vector<std::string> k = {
        "kernel",          "reaction",         "r",
        "grid.x_min",      "grid.x_max",       "grid.dx",
        "time.dt",         "time.t_end",       "time.snapshots",  "time.mode",
        "series.truncation_eps", "series.n0",  "series.br_min_information",
        "analysis.rho",    "analysis.t_min",   "analysis.t_max",  "analysis.points",
        "analysis.fit_t_min", "analysis.fit_t_max",
        "output.dir",      "seed"};
    return k;
}

ExperimentConfig ExperimentConfig::from_map(const ConfigMap& m) {
    m.reject_unknown(keys());
    ExperimentConfig c;
    c.kernel = m.get("kernel", c.kernel);
    c.reaction = m.get("reaction", c.reaction);
    c.r = m.get_double("r", c.r);
    c.grid_x_min = m.get_double("grid.x_min", c.grid_x_min);
    c.grid_x_max = m.get_double("grid.x_max", c.grid_x_max);
    c.grid_dx = m.get_double("grid.dx", c.grid_dx);
    c.dt = m.get_double("time.dt", c.dt);
    c.t_end = m.get_double("time.t_end", c.t_end);
    c.snapshots = m.get_list("time.snapshots", c.snapshots);
    c.mode = m.get("time.mode", c.mode);
    c.truncation_eps = m.get_double("series.truncation_eps", c.truncation_eps);
    c.n0 = m.get_long("series.n0", c.n0);
    c.br_min_information = m.get_double("series.br_min_information", c.br_min_information);
    c.rho = m.get_list("analysis.rho", c.rho);
    c.t_min = m.get_double("analysis.t_min", c.t_min);
    c.t_max = m.get_double("analysis.t_max", c.t_max);
    c.points = m.get_long("analysis.points", c.points);
    c.fit_t_min = m.get_double("analysis.fit_t_min", c.fit_t_min);
    c.fit_t_max = m.get_double("analysis.fit_t_max", c.fit_t_max);
    c.output_dir = m.get("output.dir", c.output_dir);
    const long seed = m.get_long("seed", static_cast<long>(c.seed));
    if (seed < 0) throw ConfigError("seed must be non-negative");
    c.seed = static_cast<std::uint64_t>(seed);

    if (!(c.r > 0.0)) throw ConfigError("r must be positive");
    if (!(c.grid_dx > 0.0)) throw ConfigError("grid.dx must be positive");
    if (!(c.dt > 0.0)) throw ConfigError("time.dt must be positive");
    if (!(c.t_end > 0.0)) throw ConfigError("time.t_end must be positive");
    if (c.mode != "nonlinear" && c.mode != "linear") throw ConfigError("time.mode must be nonlinear or linear");
    if (!(c.truncation_eps > 0.0 && c.truncation_eps < 1.0)) throw ConfigError("series.truncation_eps must be in (0, 1)");
    if (c.n0 < 1) throw ConfigError("series.n0 must be at least 1");
    if (c.rho.empty()) throw ConfigError("analysis.rho needs at least one level");
    for (double r : c.rho)
        if (!(r > 0.0)) throw ConfigError("analysis.rho levels must be positive");
    if (!(c.t_min > 0.0 && c.t_max > c.t_min)) throw ConfigError("analysis.t_min/t_max: need 0 < t_min < t_max");
    if (c.points < 2) throw ConfigError("analysis.points must be at least 2");
    if (std::find_if(c.snapshots.begin(), c.snapshots.end(), [&](double t) { return !(t > 0.0) || t > c.t_end; }) !=
        c.snapshots.end())
        throw ConfigError("time.snapshots must lie in (0, t_end]");
    std::sort(c.snapshots.begin(), c.snapshots.end());
    ConfigMap resolved = c.to_map();
    resolved.erase("output.dir");  // where results go does not change them
    c.hash = hex64(fnv1a(resolved.canonical()));
    return c;
}

ConfigMap ExperimentConfig::to_map() const {
    ConfigMap m;
    m.set("kernel", kernel);
    m.set("reaction", reaction);
    m.set("r", fmt(r));
    m.set("grid.x_min", fmt(grid_x_min));
    m.set("grid.x_max", fmt(grid_x_max));
    m.set("grid.dx", fmt(grid_dx));
    m.set("time.dt", fmt(dt));
    m.set("time.t_end", fmt(t_end));
    m.set("time.snapshots", fmt_list(snapshots));
    m.set("time.mode", mode);
    m.set("series.truncation_eps", fmt(truncation_eps));
    m.set("series.n0", std::to_string(n0));
    m.set("series.br_min_information", fmt(br_min_information));
    m.set("analysis.rho", fmt_list(rho));
    m.set("analysis.t_min", fmt(t_min));
    m.set("analysis.t_max", fmt(t_max));
    m.set("analysis.points", std::to_string(points));
    m.set("analysis.fit_t_min", fmt(fit_t_min));
    m.set("analysis.fit_t_max", fmt(fit_t_max));
    m.set("output.dir", output_dir);
    m.set("seed", std::to_string(seed));
    return m;
}

}  // namespace nlfront
