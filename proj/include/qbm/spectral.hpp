#pragma once

#include <array>

#include "qbm/model.hpp"

namespace qbm {

// Roots of the quartic pole equation in the upper half plane and the residues
// of omega0^2 / zeta(omega0 eta) there. Order: descending Im, ties by ascending Re.
struct SpectralData {
    std::array<cplx, 4> roots{};
    std::array<cplx, 4> residues{};

    // Flat record (re, im) of roots then residues.
    std::array<double, 16> to_record() const;
    static SpectralData from_record(const std::array<double, 16>& rec);
};

struct RootOptions {
    // roots with Im below this are rejected as near-real
    double near_real_tol = 1e-10;
    // bound on |N(eta)| / sum_k |c_k| |eta|^k
    double residual_tol = 1e-12;
    int newton_steps = 2;
};

SpectralData find_roots(const ModelParams& p, const RootOptions& opt = {});

// Leading weak-coupling expansion. The raw overload accepts sigma = 0.
std::array<cplx, 4> weak_coupling_roots(const ModelParams& p);
std::array<cplx, 4> weak_coupling_roots(double sigma, double eta_r, double eta_0);

// Leading strong-coupling forms.
std::array<cplx, 4> strong_coupling_roots(const ModelParams& p);

double relaxation_time(const SpectralData& s, const ModelParams& p);

// Quartic numerator N(eta) of zeta/omega0^2 = N/D and its derivative.
cplx quartic_numerator(const ModelParams& p, cplx eta);
cplx quartic_numerator_deriv(const ModelParams& p, cplx eta);

// sum_j R_j / (eta - eta_j)
cplx partial_fraction(const SpectralData& s, cplx eta);

struct SumRules {
    cplx sum_r;      // expected 0
    cplx sum_r_eta;  // expected -1
};
SumRules sum_rules(const SpectralData& s);

// Sorts in the canonical root order (descending Im, ties by ascending Re).
void sort_roots(std::array<cplx, 4>& r);

}  // namespace qbm
