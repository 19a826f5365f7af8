#pragma once

#include <vector>

#include "qbm/correlators.hpp"

namespace qbm {

struct EnergyTrace {
    std::vector<double> times;
    std::vector<double> delta_E;
    std::vector<double> delta_T;
    std::vector<double> x_var;
    std::vector<double> p_var;
    std::vector<double> uncertainty;

    std::size_t size() const { return times.size(); }
};

// <H_p>(t) - omega0/2 and <m v^2/2>(t) - omega0/4 (hbar = 1).
double delta_E(const ModelParams& p, const SpectralData& s, double t, const EpsilonPolicy& eps = {});
double delta_T(const ModelParams& p, const SpectralData& s, double t, const EpsilonPolicy& eps = {});

// Late-time limits.
double delta_E_asy(const ModelParams& p, const SpectralData& s);
double delta_T_asy(const ModelParams& p, const SpectralData& s);

// Evaluates the grid in parallel and enforces the trace invariants (zero start,
// Heisenberg bound, late-time approach to the asymptote), throwing
// ConsistencyError if one fails.
EnergyTrace energy_trace(const ModelParams& p, const SpectralData& s, const std::vector<double>& time_grid,
                         const EpsilonPolicy& eps = {}, unsigned threads = 0);

}  // namespace qbm
