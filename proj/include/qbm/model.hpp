#pragma once

#include "qbm/types.hpp"

namespace qbm {

// Physical parameters. sigma, eta_r and eta_0 are dimensionless; internally
// everything is computed with omega0 = mass_m = mu = 1 and rescaled on output.
struct ModelParams {
    double omega0 = 1.0;
    double mass_m = 1.0;
    double mu = 1.0;
    double sigma = 1.0;
    double eta_r = 1.0;
    double eta_0 = 0.5;

    // Throws ParameterError naming the violated constraint.
    void validate() const;

    bool operator==(const ModelParams&) const = default;
};

// omega0^2 (1 + sigma^2)
double effective_frequency_sq(const ModelParams& p);

// Two-Lorentzian coupling profile beta^2(nu), even in nu.
double coupling_beta_sq(const ModelParams& p, double nu);

// zeta(omega0 eta), in units of omega0^2 already applied.
cplx zeta_closed(const ModelParams& p, cplx eta);

// zeta(omega0 eta) / omega0^2; depends on the dimensionless parameters only.
cplx zeta_dimless(const ModelParams& p, cplx eta);

// Im zeta / |zeta|^2 on the real axis, dimensionless (omega0 = 1).
double spectral_weight_dimless(const ModelParams& p, double eta);

}  // namespace qbm
