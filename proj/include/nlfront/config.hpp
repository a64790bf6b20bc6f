#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace nlfront {

/// Flat `key = value` configuration with dotted section names.
/// `[section]` lines prefix the keys that follow; '#' starts a comment.
class ConfigMap {
public:
    static ConfigMap parse(const std::string& text, const std::string& origin = "<config>");
    static ConfigMap load(const std::string& path);

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    void erase(const std::string& key) { values_.erase(key); }
    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::map<std::string, std::string>& values() const { return values_; }

    std::string get(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long get_long(const std::string& key, long fallback) const;
    std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;

    /// Throws ConfigError naming the first key not in `known`.
    void reject_unknown(const std::vector<std::string>& known) const;

    /// Canonical `key=value` lines, sorted by key.
    std::string canonical() const;

private:
    std::map<std::string, std::string> values_;
};

std::uint64_t fnv1a(const std::string& text);
std::string hex64(std::uint64_t v);

struct ExperimentConfig {
    std::string kernel = "gaussian:1";
    std::string reaction = "logistic:1";
    double r = 1.0;

    double grid_x_min = -30.0;
    double grid_x_max = 0.0;   ///< 0 selects a right edge from the linear front extent
    double grid_dx = 0.05;

    double dt = 0.05;
    double t_end = 20.0;
    std::vector<double> snapshots;
    std::string mode = "nonlinear";  ///< simulate: nonlinear | linear

    double truncation_eps = 1e-12;
    long n0 = 64;
    double br_min_information = 50.0;

    std::vector<double> rho = {1.0};
    double t_min = 100.0;
    double t_max = 6400.0;
    long points = 13;
    double fit_t_min = 0.0;
    double fit_t_max = 0.0;    ///< 0: the whole trace

    std::string output_dir = "nlfront_out";
    std::uint64_t seed = 20240101;

    std::string hash;          ///< FNV-1a of the canonical resolved config, output.dir excluded

    static const std::vector<std::string>& keys();
    static ExperimentConfig from_map(const ConfigMap& map);
    ConfigMap to_map() const;
};

}  // namespace nlfront
