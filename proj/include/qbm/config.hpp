#pragma once

#include <map>
#include <string>
#include <vector>

#include "qbm/model.hpp"

namespace qbm {

// Flat "key = value" text. '#' starts a comment; blank lines are ignored.
// Values may be comma-separated lists. Unknown keys, duplicate keys and
// malformed lines raise ConfigError with "source:line:" diagnostics.
class Config {
public:
    static Config parse(const std::string& text, const std::string& source = "<config>");
    static Config load(const std::string& path);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long get_int(const std::string& key, long fallback) const;
    std::vector<double> get_list(const std::string& key) const;  // empty if absent
    // Overrides or adds a value (key must be known).
    void set(const std::string& key, const std::string& value);

    const std::string& source() const { return source_; }
    const std::map<std::string, std::string>& entries() const { return values_; }

    static const std::vector<std::string>& known_keys();

private:
    std::string where(const std::string& key) const;

    std::string source_;
    std::map<std::string, std::string> values_;
    std::map<std::string, int> lines_;
};

// Model parameters from the config; missing keys keep their defaults. List
// values are rejected here (use model_runs). Throws ParameterError with the
// invariant message for invalid combinations.
ModelParams model_from_config(const Config& c);

// One parameter set per entry when exactly one of eta_0, eta_r, sigma is a list.
struct ModelRun {
    std::string label;  // "" for a single run, otherwise e.g. "eta_0=0.25"
    ModelParams params;
};
std::vector<ModelRun> model_runs(const Config& c);

enum class GridQuantity { delta_E_asy, delta_T_asy, relaxation_time };

const char* grid_quantity_name(GridQuantity q);
GridQuantity parse_grid_quantity(const std::string& s);

// Parameter surface over (eta_0, eta_r) at fixed sigma.
struct SweepGrid {
    std::vector<double> eta0_values;
    std::vector<double> etar_values;
    double sigma = 1.0;
    GridQuantity quantity = GridQuantity::delta_E_asy;

    void validate() const;
};

// Axes come from eta0_values / etar_values lists, or from
// eta0_min, eta0_max, eta0_n (and the etar_ analogues) as inclusive linspaces.
SweepGrid grid_from_config(const Config& c);

// Row-major values[i0 * etar.size() + ir]; cells are evaluated in parallel.
std::vector<double> evaluate_grid(const ModelParams& base, const SweepGrid& g, unsigned threads = 0);

}  // namespace qbm
