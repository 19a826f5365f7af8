#include "qbm/model.hpp"

#include <cmath>
#include <string>

#include "qbm/errors.hpp"

namespace qbm {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw ParameterError("ModelParams: " + msg);
}

}  // namespace

void ModelParams::validate() const {
    require(std::isfinite(omega0) && omega0 > 0.0, "omega0 must be > 0");
    require(std::isfinite(mass_m) && mass_m > 0.0, "mass_m must be > 0");
    require(std::isfinite(mu) && mu > 0.0, "mu must be > 0");
    require(std::isfinite(sigma) && sigma > 0.0, "sigma must be > 0 (sigma = 0 decouples the reservoir)");
    require(std::isfinite(eta_r) && eta_r >= 0.0, "eta_r must be >= 0");
    require(std::isfinite(eta_0) && eta_0 > 0.0, "eta_0 must be > 0 (eta_0 = 0 is the delta-resonance limit)");
}

double effective_frequency_sq(const ModelParams& p) {
    return p.omega0 * p.omega0 * (1.0 + p.sigma * p.sigma);
}

double coupling_beta_sq(const ModelParams& p, double nu) {
    double eta = nu / p.omega0;
    double e0 = p.eta_0, er = p.eta_r;
    double lor = e0 / ((eta - er) * (eta - er) + e0 * e0) + e0 / ((eta + er) * (eta + er) + e0 * e0);
    return p.sigma * p.sigma * p.mass_m * p.mu * p.omega0 / pi * lor;
}

cplx zeta_dimless(const ModelParams& p, cplx eta) {
    cplx u = eta - I * p.eta_0;
    cplx d = u * u - p.eta_r * p.eta_r;
    if (std::abs(d) <= 1e-14 * (1.0 + std::norm(eta)))
        throw DomainError("zeta_closed: evaluation at a pole of the Lorentzian factor");
    return 1.0 - eta * eta + eta * p.sigma * p.sigma * u / d;
}

cplx zeta_closed(const ModelParams& p, cplx eta) {
    return p.omega0 * p.omega0 * zeta_dimless(p, eta);
}

double spectral_weight_dimless(const ModelParams& p, double eta) {
    cplx z = zeta_dimless(p, eta);
    return z.imag() / std::norm(z);
}

}  // namespace qbm
