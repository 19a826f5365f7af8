#include "qbm/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "parallel.hpp"
#include "qbm/errors.hpp"
#include "qbm/observables.hpp"

namespace qbm {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool parse_number(const std::string& text, double& out) {
    std::string t = trim(text);
    if (t.empty()) return false;
    errno = 0;
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return errno == 0 && end == t.c_str() + t.size() && std::isfinite(out);
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> parts;
    std::stringstream ss(v);
    for (std::string item; std::getline(ss, item, ',');) parts.push_back(trim(item));
    return parts;
}

std::vector<double> linspace(double a, double b, long n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = (n == 1) ? a : a + (b - a) * i / (n - 1);
    return v;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

const std::vector<std::string>& Config::known_keys() {
    static const std::vector<std::string> keys{
        "omega0",   "mass_m",      "mu",       "sigma",    "eta_r",       "eta_0",    "t_max",
        "n_points", "eta0_values", "eta0_min", "eta0_max", "eta0_n",      "etar_values", "etar_min",
        "etar_max", "etar_n",      "quantity", "n_modes",  "nu_max",      "dt_step",  "threads",
        "cutoff"};
    return keys;
}

Config Config::parse(const std::string& text, const std::string& source) {
    Config c;
    c.source_ = source;
    const auto& known = known_keys();
    std::stringstream in(text);
    int lineno = 0;
    for (std::string raw; std::getline(in, raw);) {
        ++lineno;
        std::string line = trim(raw.substr(0, raw.find('#')));
        if (line.empty()) continue;
        auto eq = line.find('=');
        std::string loc = source + ":" + std::to_string(lineno) + ": ";
        if (eq == std::string::npos) throw ConfigError(loc + "expected 'key = value', got '" + line + "'");
        std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(loc + "missing key before '='");
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError(loc + "unknown key '" + key + "'");
        if (value.empty()) throw ConfigError(loc + "key '" + key + "' has no value");
        if (c.values_.count(key))
            throw ConfigError(loc + "duplicate key '" + key + "' (first set on line " + std::to_string(c.lines_[key]) +
                              ")");
        c.values_[key] = value;
        c.lines_[key] = lineno;
    }
    return c;
}

Config Config::load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError(path + ": cannot open config file");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse(ss.str(), path);
}

std::string Config::where(const std::string& key) const {
    auto it = lines_.find(key);
    if (it == lines_.end()) return source_ + ": ";
    return source_ + ":" + std::to_string(it->second) + ": ";
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    double v;
    if (!parse_number(it->second, v))
        throw ConfigError(where(key) + "key '" + key + "' expects a number, got '" + it->second + "'");
    return v;
}

long Config::get_int(const std::string& key, long fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    double v;
    if (!parse_number(it->second, v) || v != std::floor(v) || std::abs(v) > 1e15)
        throw ConfigError(where(key) + "key '" + key + "' expects an integer, got '" + it->second + "'");
    return static_cast<long>(v);
}

std::vector<double> Config::get_list(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return {};
    std::vector<double> out;
    for (const std::string& item : split_list(it->second)) {
        double v;
        if (!parse_number(item, v))
            throw ConfigError(where(key) + "key '" + key + "' expects a number list, got '" + it->second + "'");
        out.push_back(v);
    }
    return out;
}

void Config::set(const std::string& key, const std::string& value) {
    const auto& known = known_keys();
    if (std::find(known.begin(), known.end(), key) == known.end())
        throw ConfigError(source_ + ": unknown key '" + key + "'");
    values_[key] = value;
    lines_.erase(key);
}

ModelParams model_from_config(const Config& c) {
    for (const char* k : {"sigma", "eta_r", "eta_0"})
        if (c.get_list(k).size() > 1)
            throw ConfigError(c.source() + ": key '" + std::string(k) + "' holds a list; this command takes one value");
    ModelParams p;
    p.omega0 = c.get_double("omega0", p.omega0);
    p.mass_m = c.get_double("mass_m", p.mass_m);
    p.mu = c.get_double("mu", p.mu);
    p.sigma = c.get_double("sigma", p.sigma);
    p.eta_r = c.get_double("eta_r", p.eta_r);
    p.eta_0 = c.get_double("eta_0", p.eta_0);
    p.validate();
    return p;
}

std::vector<ModelRun> model_runs(const Config& c) {
    std::string list_key;
    for (const char* k : {"sigma", "eta_r", "eta_0"}) {
        if (c.get_list(k).size() > 1) {
            if (!list_key.empty())
                throw ConfigError(c.source() + ": only one of sigma, eta_r, eta_0 may hold a list (found '" + list_key +
                                  "' and '" + k + "')");
            list_key = k;
        }
    }
    if (list_key.empty()) return {{"", model_from_config(c)}};
    std::vector<ModelRun> runs;
    for (double v : c.get_list(list_key)) {
        Config one = c;
        one.set(list_key, fmt(v));
        runs.push_back({list_key + "=" + fmt(v), model_from_config(one)});
    }
    return runs;
}

const char* grid_quantity_name(GridQuantity q) {
    switch (q) {
        case GridQuantity::delta_E_asy: return "delta_E_asy";
        case GridQuantity::delta_T_asy: return "delta_T_asy";
        case GridQuantity::relaxation_time: return "relaxation_time";
    }
    return "unknown";
}

GridQuantity parse_grid_quantity(const std::string& s) {
    for (GridQuantity q : {GridQuantity::delta_E_asy, GridQuantity::delta_T_asy, GridQuantity::relaxation_time})
        if (s == grid_quantity_name(q)) return q;
    throw ConfigError("quantity must be one of delta_E_asy, delta_T_asy, relaxation_time; got '" + s + "'");
}

void SweepGrid::validate() const {
    if (eta0_values.empty() || etar_values.empty()) throw ConfigError("grid: both axes must be non-empty");
    for (std::size_t i = 0; i < eta0_values.size(); ++i) {
        if (!(eta0_values[i] > 0.0)) throw ConfigError("grid: eta_0 values must be > 0");
        if (i > 0 && !(eta0_values[i] > eta0_values[i - 1])) throw ConfigError("grid: eta_0 values must ascend");
    }
    for (std::size_t i = 0; i < etar_values.size(); ++i) {
        if (!(etar_values[i] >= 0.0)) throw ConfigError("grid: eta_r values must be >= 0");
        if (i > 0 && !(etar_values[i] > etar_values[i - 1])) throw ConfigError("grid: eta_r values must ascend");
    }
    if (!(std::isfinite(sigma) && sigma > 0.0)) throw ConfigError("grid: sigma must be > 0");
}

SweepGrid grid_from_config(const Config& c) {
    SweepGrid g;
    auto axis = [&](const std::string& prefix) {
        if (c.has(prefix + "_values")) return c.get_list(prefix + "_values");
        if (!(c.has(prefix + "_min") && c.has(prefix + "_max") && c.has(prefix + "_n")))
            throw ConfigError(c.source() + ": grid axis '" + prefix + "' needs " + prefix + "_values or " + prefix +
                              "_min, " + prefix + "_max, " + prefix + "_n");
        long n = c.get_int(prefix + "_n", 0);
        if (n < 1) throw ConfigError(c.source() + ": " + prefix + "_n must be >= 1");
        return linspace(c.get_double(prefix + "_min", 0.0), c.get_double(prefix + "_max", 0.0), n);
    };
    g.eta0_values = axis("eta0");
    g.etar_values = axis("etar");
    g.sigma = c.get_double("sigma", 1.0);
    g.quantity = parse_grid_quantity(c.get_string("quantity", "delta_E_asy"));
    g.validate();
    return g;
}

std::vector<double> evaluate_grid(const ModelParams& base, const SweepGrid& g, unsigned threads) {
    g.validate();
    const std::size_t nr = g.etar_values.size(), n = g.eta0_values.size() * nr;
    std::vector<double> out(n);
    detail::parallel_for(
        n,
        [&](std::size_t i) {
            ModelParams p = base;
            p.sigma = g.sigma;
            p.eta_0 = g.eta0_values[i / nr];
            p.eta_r = g.etar_values[i % nr];
            SpectralData s = find_roots(p);
            switch (g.quantity) {
                case GridQuantity::delta_E_asy: out[i] = delta_E_asy(p, s); break;
                case GridQuantity::delta_T_asy: out[i] = delta_T_asy(p, s); break;
                case GridQuantity::relaxation_time: out[i] = relaxation_time(s, p); break;
            }
        },
        threads);
    return out;
}

}  // namespace qbm
