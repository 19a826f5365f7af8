#include "qbm/specfun.hpp"

#include <cmath>

#include "qbm/errors.hpp"

namespace qbm {

namespace {

constexpr double kDeg = pi / 180.0;

bool on_negative_axis(cplx z) { return z.imag() == 0.0 && z.real() <= 0.0; }

void require_finite(cplx z, const char* fn) {
    if (!is_finite(z)) throw DomainError(std::string(fn) + ": non-finite argument");
}

cplx e1_series(cplx w) {
    // E1(w) = -gamma - ln w - sum_{k>=1} (-w)^k / (k k!)
    cplx term = 1.0;
    cplx sum = 0.0;
    for (int k = 1; k < 400; ++k) {
        term *= -w / double(k);
        cplx add = term / double(k);
        sum += add;
        if (std::abs(add) < 1e-17 * std::abs(sum)) break;
    }
    return -euler_gamma - std::log(w) - sum;
}

cplx e1_scaled_asymptotic(cplx w) {
    cplx term = 1.0 / w;
    cplx sum = term;
    double last = std::abs(term);
    for (int k = 1; k < 200; ++k) {
        term *= -double(k) / w;
        double a = std::abs(term);
        if (a > last) break;
        sum += term;
        if (a < 1e-17 * std::abs(sum)) break;
        last = a;
    }
    return sum;
}

cplx e1_scaled_cf(cplx w) {
    // modified Lentz on e^w E1(w) = 1/(w+1- 1/(w+3- 4/(w+5- ...)))
    constexpr double tiny = 1e-300;
    cplx b = w + 1.0;
    cplx c = 1.0 / tiny;
    cplx d = 1.0 / b;
    cplx h = d;
    for (int i = 1; i < 20000; ++i) {
        double an = -double(i) * double(i);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        cplx del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) return h;
    }
    throw ConvergenceError("e1_scaled: continued fraction did not converge");
}

// f and g on the closed first quadrant
AuxFG aux_fg_q1(cplx z) {
    cplx s1 = e1_scaled(I * z);
    cplx s2 = e1_scaled(-I * z);
    return {0.5 * I * (s1 - s2), 0.5 * (s1 + s2)};
}

AuxFG aux_fg_e1(cplx z) {
    if (z.imag() < 0.0) {
        AuxFG c = aux_fg_e1(std::conj(z));
        return {std::conj(c.f), std::conj(c.g)};
    }
    if (z.real() >= 0.0) return aux_fg_q1(z);
    // second quadrant: reflect through the origin, picking up the log jump of Ci
    cplx w = -z;
    AuxFG r = aux_fg_e1(w);
    cplx e = std::exp(-I * w);
    return {-r.f + pi * e, r.g - I * pi * e};
}

cplx si_series(cplx z) {
    cplx z2 = z * z;
    cplx term = z;  // z^{2n+1}/(2n+1)!
    cplx sum = z;
    for (int n = 1; n < 200; ++n) {
        term *= -z2 / (double(2 * n) * double(2 * n + 1));
        cplx add = term / double(2 * n + 1);
        sum += add;
        if (std::abs(add) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

// Ci(z) - gamma - ln z
cplx cin_series(cplx z) {
    cplx z2 = z * z;
    cplx term = 1.0;  // z^{2n}/(2n)!
    cplx sum = 0.0;
    for (int n = 1; n < 200; ++n) {
        term *= -z2 / (double(2 * n - 1) * double(2 * n));
        cplx add = term / double(2 * n);
        sum += add;
        if (std::abs(add) < 1e-17 * std::max(1.0, std::abs(sum))) break;
    }
    return sum;
}

}  // namespace

void EvalPolicy::validate() const {
    if (!(series_asymptotic_crossover > 0.0)) throw ParameterError("EvalPolicy: crossover must be > 0");
    if (!(target_abs_tol > 0.0)) throw ParameterError("EvalPolicy: target_abs_tol must be > 0");
}

cplx e1_scaled(cplx w) {
    require_finite(w, "e1_scaled");
    if (w == 0.0) throw DomainError("e1_scaled: logarithmic singularity at w = 0");
    if (w.imag() == 0.0 && w.real() < 0.0) w = cplx(w.real(), 0.0);  // drop a signed zero
    double r = std::abs(w);
    double a = std::abs(std::arg(w));
    if (r <= 1.5 || (a >= 150.0 * kDeg && r <= 40.0)) return std::exp(w) * e1_series(w);
    if (a > 179.0 * kDeg) return e1_scaled_asymptotic(w);
    return e1_scaled_cf(w);
}

SiCi si_ci_series(cplx z) {
    if (z == 0.0) throw DomainError("si_ci_series: Ci is singular at 0");
    return {si_series(z), euler_gamma + std::log(z) + cin_series(z)};
}

SiCi si_ci_asymptotic(cplx z) {
    if (z == 0.0 || on_negative_axis(z)) throw DomainError("si_ci_asymptotic: argument on the Ci branch cut");
    AuxFG fg = aux_fg_e1(z);
    cplx s = std::sin(z), c = std::cos(z);
    return {0.5 * pi - fg.f * c - fg.g * s, fg.f * s - fg.g * c};
}

SiCi si_ci(cplx z, const EvalPolicy& pol) {
    require_finite(z, "si_ci");
    if (z == 0.0 || on_negative_axis(z)) throw DomainError("si_ci: argument on the Ci branch cut");
    if (std::abs(z) <= pol.series_asymptotic_crossover) return si_ci_series(z);
    return si_ci_asymptotic(z);
}

cplx sin_integral(cplx z, const EvalPolicy& pol) {
    require_finite(z, "sin_integral");
    if (z == 0.0) return 0.0;
    if (z.real() < 0.0 || (z.real() == 0.0 && z.imag() < 0.0)) return -sin_integral(-z, pol);
    if (std::abs(z) <= pol.series_asymptotic_crossover) return si_series(z);
    return si_ci_asymptotic(z).si;
}

cplx cos_integral(cplx z, const EvalPolicy& pol) {
    require_finite(z, "cos_integral");
    if (z == 0.0 || on_negative_axis(z)) throw DomainError("cos_integral: argument on the branch cut (non-positive real axis)");
    return si_ci(z, pol).ci;
}

AuxFG aux_fg(cplx z, const EvalPolicy&) {
    require_finite(z, "aux_fg");
    if (z == 0.0 || on_negative_axis(z)) throw DomainError("aux_fg: argument on the branch cut (non-positive real axis)");
    // Recombining Taylor Si/Ci cancels badly once |Im z| is a few units, so
    // the exponential-integral form is used at every modulus.
    return aux_fg_e1(z);
}

cplx g_aux(cplx z, const EvalPolicy& pol) {
    require_finite(z, "g_aux");
    if (z == 0.0) throw DomainError("g_aux: logarithmic singularity at z = 0");
    if (on_negative_axis(z)) throw DomainError("g_aux: argument on the branch cut (negative real axis)");
    AuxFG fg = aux_fg(z, pol);
    return I * fg.f - fg.g;
}

}  // namespace qbm
