#pragma once

#include <array>

#include "qbm/spectral.hpp"

namespace qbm {

enum class EqualTimeMode { limit_formula, epsilon_extrapolation };

struct EpsilonPolicy {
    double epsilon = 1e-8;  // units of 1/omega0
    EqualTimeMode equal_time_mode = EqualTimeMode::limit_formula;

    void validate() const;
};

struct CorrelatorPoint {
    double t = 0.0;
    double t_prime = 0.0;
    cplx qp_value;
    cplx tr_value;
    cplx total;
};

// Stationary two-point function <x(t) x(t')> in the interacting vacuum, dt = t - t'.
cplx corr_qp(const ModelParams& p, const SpectralData& s, double dt, const EpsilonPolicy& eps = {});

// Transient kernels (dimensionless). alpha = 0 returns the finite alpha -> 0+ limit.
cplx transient_G(const SpectralData& s, int k, int j, cplx c, double alpha);
cplx transient_F(const SpectralData& s, const ModelParams& p, int k, int j, double alpha);
// Same, with the Lorentzian centre and width passed raw (no sign restriction on eta_0).
cplx transient_F(const SpectralData& s, double eta_r, double eta_0, int k, int j, double alpha);

// Pre-quench memory part of <x(t) x(t')>.
cplx corr_tr(const ModelParams& p, const SpectralData& s, double t, double t_prime);

CorrelatorPoint corr_full(const ModelParams& p, const SpectralData& s, double t, double t_prime,
                          const EpsilonPolicy& eps = {});

// d/dt' <x(t) x(t')>
cplx corr_dtp(const ModelParams& p, const SpectralData& s, double t, double t_prime, const EpsilonPolicy& eps = {});

// d^2/dt dt' <x(t) x(t')>
cplx corr_vv(const ModelParams& p, const SpectralData& s, double t, double t_prime, const EpsilonPolicy& eps = {});

struct Variances {
    double x_var = 0.0;
    double p_var = 0.0;
    double xp_sym = 0.0;
};

Variances variances(const ModelParams& p, const SpectralData& s, double t, const EpsilonPolicy& eps = {});

// Residues smaller than this fraction of the largest one are dropped from the
// sums; at eta_r = 0 the root i eta_0 carries an exactly vanishing residue.
inline constexpr double kNegligibleResidue = 1e-13;

// Dimensionless equal-time building blocks at a single time, sharing the
// transient kernel evaluations. All in units omega0 = m = 1.
struct EqualTimeMoments {
    cplx xx;  // <x x>
    cplx xv;  // <x v> = d/dtau' C at tau' = tau
    cplx vv;  // <v v>
};
EqualTimeMoments equal_time_moments(const ModelParams& p, const SpectralData& s, double tau, const EpsilonPolicy& eps = {});

}  // namespace qbm
