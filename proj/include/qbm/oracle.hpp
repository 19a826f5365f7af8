#pragma once

#include <functional>

#include "qbm/model.hpp"

namespace qbm {

// Settings for the quadrature oracles. cutoff is the dimensionless frequency
// (in units of omega0) where the numerical integral stops and the analytic
// tail takes over.
struct QuadratureSpec {
    double cutoff = 2000.0;
    double rel_tol = 1e-12;
    double abs_tol = 1e-15;
    bool tail_correction = true;
    double pv_halfwidth = 1e-3;  // principal-value window, units of omega0

    void validate() const;
};

using BetaSqFn = std::function<double(double nu)>;

// zeta(omega) from its defining spectral integral over a coupling profile.
cplx quad_zeta(const BetaSqFn& beta_sq, const ModelParams& p, double omega, const QuadratureSpec& q = {});

// (1/m pi) int_0^inf Im zeta/|zeta|^2 e^{-i w dt} dw
cplx quad_corr_qp(const ModelParams& p, double dt, const QuadratureSpec& q = {});

// Stationary <v^2> = (1/m pi) int_0^inf w^2 Im zeta/|zeta|^2 dw
double quad_vv_stationary(const ModelParams& p, const QuadratureSpec& q = {});

// -(1/pi) int_{-L}^{L} w / zeta(w) dw, expected to equal i.
cplx commutator_integral(const ModelParams& p, const QuadratureSpec& q = {});

// A(t) = (1/pi) int sin(w t)/zeta(w) dw and its time derivative. For this
// response function A is purely imaginary.
cplx A_func(const ModelParams& p, double t, const QuadratureSpec& q = {});
cplx A_func_deriv(const ModelParams& p, double t, const QuadratureSpec& q = {});

// B_omega(t) = (1/2 pi i) int e^{i w' t} / (zeta(w') (w' + omega + i0)) dw'
cplx B_func(const ModelParams& p, double omega, double t, const QuadratureSpec& q = {});

// Transient correlator assembled from A and B by quadrature.
cplx quad_corr_tr_general(const ModelParams& p, double t, double t_prime, const QuadratureSpec& q = {});

}  // namespace qbm
