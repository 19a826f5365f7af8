#include "qbm/observables.hpp"

#include <cmath>
#include <string>

#include "parallel.hpp"
#include "qbm/errors.hpp"

namespace qbm {

namespace {

struct Energies {
    double dE, dT, x_var, p_var;
};

double real_checked(cplx v, const char* what, double t) {
    if (!(std::abs(v.imag()) <= 1e-10 * std::max(1.0, std::abs(v))))
        throw ConsistencyError(std::string(what) + ": imaginary residue " + std::to_string(v.imag()) +
                               " at t = " + std::to_string(t));
    return v.real();
}

Energies energies_at(const ModelParams& p, const SpectralData& s, double t, const EpsilonPolicy& eps) {
    EqualTimeMoments m = equal_time_moments(p, s, p.omega0 * t, eps);
    double xx = real_checked(m.xx, "<x^2>", t);
    double vv = real_checked(m.vv, "<v^2>", t);
    double w = p.omega0;
    return {0.5 * w * (vv + xx) - 0.5 * w, 0.5 * w * vv - 0.25 * w, xx / (p.mass_m * w), vv * p.mass_m * w};
}

double asy_sum(const SpectralData& s, bool with_potential) {
    cplx acc = 0.0;
    for (int j = 0; j < 4; ++j) {
        cplx eta = s.roots[j];
        // Re(-i eta) = Im eta > 0 keeps the logarithm off its cut
        cplx w = with_potential ? 1.0 + eta * eta : eta * eta;
        acc += s.residues[j] * w * std::log(-I * eta);
    }
    acc *= -I / pi;
    if (!(std::abs(acc.imag()) <= 1e-10 * std::max(1.0, std::abs(acc))))
        throw ConsistencyError("asymptotic energy: imaginary residue " + std::to_string(acc.imag()));
    return acc.real();
}

}  // namespace

double delta_E(const ModelParams& p, const SpectralData& s, double t, const EpsilonPolicy& eps) {
    return energies_at(p, s, t, eps).dE;
}

double delta_T(const ModelParams& p, const SpectralData& s, double t, const EpsilonPolicy& eps) {
    return energies_at(p, s, t, eps).dT;
}

double delta_E_asy(const ModelParams& p, const SpectralData& s) {
    p.validate();
    return 0.5 * p.omega0 * (asy_sum(s, true) - 1.0);
}

double delta_T_asy(const ModelParams& p, const SpectralData& s) {
    p.validate();
    return 0.5 * p.omega0 * (asy_sum(s, false) - 0.5);
}

EnergyTrace energy_trace(const ModelParams& p, const SpectralData& s, const std::vector<double>& grid,
                         const EpsilonPolicy& eps, unsigned threads) {
    p.validate();
    eps.validate();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(std::isfinite(grid[i]) && grid[i] >= 0.0)) throw DomainError("energy_trace: times must be finite and >= 0");
        if (i > 0 && !(grid[i] > grid[i - 1])) throw DomainError("energy_trace: time grid must be strictly ascending");
    }
    const std::size_t n = grid.size();
    std::vector<Energies> rows(n);
    detail::parallel_for(n, [&](std::size_t i) { rows[i] = energies_at(p, s, grid[i], eps); }, threads);

    EnergyTrace tr;
    tr.times = grid;
    for (const auto& r : rows) {
        tr.delta_E.push_back(r.dE);
        tr.delta_T.push_back(r.dT);
        tr.x_var.push_back(r.x_var);
        tr.p_var.push_back(r.p_var);
        tr.uncertainty.push_back(r.x_var * r.p_var);
    }
    if (n == 0) return tr;

    const double w = p.omega0;
    if (grid[0] == 0.0 && !(std::abs(tr.delta_E[0]) <= 1e-6 * w && std::abs(tr.delta_T[0]) <= 1e-6 * w))
        throw ConsistencyError("energy_trace: energy changes do not vanish at t = 0");
    for (std::size_t i = 0; i < n; ++i)
        if (!(tr.uncertainty[i] >= 0.25 - 1e-10))
            throw ConsistencyError("energy_trace: uncertainty product below 1/4 at t = " + std::to_string(grid[i]));
    if (grid.back() >= 10.0 * relaxation_time(s, p)) {
        double d = std::abs(tr.delta_E.back() - delta_E_asy(p, s));
        if (!(d <= 1e-3 * w))
            throw ConsistencyError("energy_trace: late-time energy misses the asymptote by " + std::to_string(d));
    }
    return tr;
}

}  // namespace qbm
