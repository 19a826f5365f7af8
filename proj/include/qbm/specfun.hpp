#pragma once

#include "qbm/types.hpp"

namespace qbm {

struct EvalPolicy {
    // |z| at or below which the Taylor series is used for Si/Ci
    double series_asymptotic_crossover = 8.0;
    double target_abs_tol = 1e-15;

    void validate() const;
};

// Entire sine integral.
cplx sin_integral(cplx z, const EvalPolicy& pol = {});

// Cosine integral, principal branch, cut along the non-positive real axis.
cplx cos_integral(cplx z, const EvalPolicy& pol = {});

// g(z) = e^{iz} [i pi/2 + Ci(z) - i Si(z)]; satisfies g' = i g + 1/z.
cplx g_aux(cplx z, const EvalPolicy& pol = {});

// Standard auxiliary functions of the sine/cosine integrals:
//   f = Ci sin z - (Si - pi/2) cos z,   g = -Ci cos z - (Si - pi/2) sin z.
// Both behave like 1/z, 1/z^2 for large |z| away from the negative axis.
struct AuxFG {
    cplx f;
    cplx g;
};
AuxFG aux_fg(cplx z, const EvalPolicy& pol = {});

// Both integrals at once, selecting the evaluation path by |z|.
struct SiCi {
    cplx si;
    cplx ci;
};
SiCi si_ci(cplx z, const EvalPolicy& pol = {});

// Forced evaluation paths, exposed for overlap checks.
SiCi si_ci_series(cplx z);
SiCi si_ci_asymptotic(cplx z);

// e^w E1(w) on the principal branch. On the negative real axis the limit
// from above (arg w = +pi) is returned.
cplx e1_scaled(cplx w);

}  // namespace qbm
