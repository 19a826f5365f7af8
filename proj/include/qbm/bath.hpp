#pragma once

#include <memory>
#include <vector>

#include "qbm/model.hpp"

namespace qbm {

// Discretized reservoir: mode frequencies and the quadrature weights that
// turn sums over modes into integrals over nu (both in angular-frequency units).
struct BathGrid {
    std::vector<double> nu;
    std::vector<double> weight;

    std::size_t size() const { return nu.size(); }
};

// Uniform grid on [nu_max / (10 n), nu_max]. The first weight also covers
// (0, nu_min) and the last one is a half-panel, so sums are second order.
BathGrid bath_grid(int n_modes, double nu_max);

// Particle plus discrete reservoir, prepared for exact normal-mode propagation
// from the decoupled ground state at t = 0. Immutable once built; copies share
// the decomposition.
class BathState {
public:
    const ModelParams& params() const;
    const BathGrid& grid() const;
    int n_modes() const;
    bool coupled() const;
    // Time beyond which the discrete spectrum revives: 2 pi / (mode spacing).
    double recurrence_time() const;
    // Sum over modes of c_k^2 / M_k, the discrete counterpart of sigma^2.
    double discrete_sigma_sq() const;

    struct Impl;
    explicit BathState(std::shared_ptr<const Impl> impl);
    const Impl& impl() const { return *impl_; }

private:
    std::shared_ptr<const Impl> impl_;
};

// Requires n_modes >= 2 and nu_max >= 3 omega0 max(1, eta_r + 5 eta_0, sigma).
// coupled = false builds the same reservoir with the interaction switched off.
BathState bath_init(const ModelParams& p, int n_modes, double nu_max, bool coupled = true);

// Energies are relative to the decoupled vacuum: delta_E = <H_p> - omega0/2,
// reservoir_energy = <H_R> - sum nu_k / 2, total_energy = their sum.
struct BathTrace {
    std::vector<double> times;
    std::vector<double> delta_E;
    std::vector<double> delta_T;
    std::vector<double> x_var;
    std::vector<double> p_var;
    std::vector<double> xp_sym;
    std::vector<double> uncertainty;
    std::vector<double> reservoir_energy;
    std::vector<double> total_energy;

    std::size_t size() const { return times.size(); }
};

struct BathAudit {
    double energy_tol = 1e-6;  // allowed drift of total_energy, units of omega0
};

// Moments on an ascending, non-negative time grid below the recurrence time.
// Throws IntegrationError when the total energy drifts beyond the audit
// tolerance or the Heisenberg bound fails.
BathTrace bath_trace(const BathState& s, const std::vector<double>& times, const BathAudit& audit = {},
                     unsigned threads = 0);

// Same on the grid 0, dt_step, ..., t_final.
BathTrace bath_evolve(const BathState& s, double t_final, double dt_step, const BathAudit& audit = {},
                      unsigned threads = 0);

// Full symmetrized covariance at time t in oscillator units (omega0 = m = mu = 1),
// row-major, ordered (x, R_1..R_N, p, Q_1..Q_N). O(N^3); meant for small N.
std::vector<double> bath_covariance(const BathState& s, double t);

// Gaussian-state physicality of a covariance in the ordering above: symmetric,
// non-negative diagonal and cov + (i/2) J positive semidefinite within tol.
bool bath_physical(const std::vector<double>& cov, int dim, double tol = 1e-9);

}  // namespace qbm
