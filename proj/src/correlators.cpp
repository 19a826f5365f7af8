#include "qbm/correlators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qbm/errors.hpp"
#include "qbm/specfun.hpp"

namespace qbm {

namespace {

struct Active {
    int n = 0;
    std::array<cplx, 4> eta{};
    std::array<cplx, 4> res{};
};

Active active_roots(const SpectralData& s) {
    double rmax = 0.0;
    for (auto r : s.residues) rmax = std::max(rmax, std::abs(r));
    Active a;
    for (int j = 0; j < 4; ++j) {
        if (std::abs(s.residues[j]) <= kNegligibleResidue * rmax) continue;
        a.eta[a.n] = s.roots[j];
        a.res[a.n] = s.residues[j];
        ++a.n;
    }
    return a;
}

// g(z alpha), or its small-alpha form with the log(alpha) dropped; the dropped
// terms cancel in every combination used below.
cplx g_scaled(cplx z, double alpha) {
    if (alpha == 0.0) return std::log(z) + euler_gamma + 0.5 * pi * I;
    return g_aux(z * alpha);
}

void check_denominator(cplx d, const char* what) {
    if (std::abs(d) < 1e-13) throw DegeneracyError(std::string("transient kernel: vanishing denominator ") + what);
}

struct GPair {
    cplx g;
    cplx dg;  // d/d alpha
};

GPair kernel_g(cplx e, cplx ej, cplx c, cplx gc, cplx ge, cplx gj) {
    cplx d1 = (ej - e) * (e + c);
    cplx d2 = (e - ej) * (ej + c);
    check_denominator(d1, "(eta_j - conj eta_k)(conj eta_k + c)");
    check_denominator(d2, "(conj eta_k - eta_j)(eta_j + c)");
    cplx g = (c * gc + e * ge) / d1 + (c * gc + ej * gj) / d2;
    cplx dg = I * ((c * c * gc - e * e * ge) / d1 + (c * c * gc - ej * ej * gj) / d2);
    return {g, dg};
}

std::array<cplx, 4> c_values(double er, double e0) { return {cplx(-er, -e0), cplx(er, -e0), cplx(-er, e0), cplx(er, e0)}; }

// F_kj and dF_kj/d alpha over the active roots
struct Kernels {
    std::array<std::array<cplx, 4>, 4> f{};
    std::array<std::array<cplx, 4>, 4> df{};
};

Kernels kernels(const Active& a, double er, double e0, double alpha) {
    const auto cs = c_values(er, e0);
    std::array<cplx, 4> gc, ge, gj;
    for (int m = 0; m < 4; ++m) gc[m] = g_scaled(cs[m], alpha);
    for (int k = 0; k < a.n; ++k) {
        ge[k] = g_scaled(-std::conj(a.eta[k]), alpha);
        gj[k] = g_scaled(-a.eta[k], alpha);
    }
    Kernels out;
    for (int k = 0; k < a.n; ++k)
        for (int j = 0; j < a.n; ++j) {
            cplx e = std::conj(a.eta[k]);
            cplx f = 0.0, df = 0.0;
            for (int m = 0; m < 4; ++m) {
                GPair g = kernel_g(e, a.eta[j], cs[m], gc[m], ge[k], gj[j]);
                cplx w = (m < 2 ? 0.5 : -0.5) * I;
                f += w * g.g;
                df += w * g.dg;
            }
            out.f[k][j] = f;
            out.df[k][j] = df;
        }
    return out;
}

struct TrValue {
    cplx v;
    cplx d_tp;    // d/dtau'
    cplx d_t_tp;  // d^2/dtau dtau'
};

TrValue transient_nd(const ModelParams& p, const Active& a, double tau, double taup) {
    const double s2pi = p.sigma * p.sigma / pi;
    const Kernels k0 = kernels(a, p.eta_r, p.eta_0, 0.0);
    const Kernels kt = kernels(a, p.eta_r, p.eta_0, tau);
    const Kernels ktp = (taup == tau) ? kt : kernels(a, p.eta_r, p.eta_0, taup);
    TrValue out{0.0, 0.0, 0.0};
    for (int k = 0; k < a.n; ++k) {
        cplx ek = std::conj(a.eta[k]);
        cplx E = std::exp(-I * ek * tau);
        for (int j = 0; j < a.n; ++j) {
            cplx ej = a.eta[j];
            cplx P = std::exp(I * ej * taup);
            cplx w = std::conj(a.res[k]) * a.res[j];
            cplx bracket = (ek + 1.0) * (ej + 1.0) - s2pi * k0.f[k][j];
            cplx ftp = std::conj(ktp.f[j][k]);
            cplx dftp = std::conj(ktp.df[j][k]);
            out.v += w * (bracket * E * P + s2pi * (P * kt.f[k][j] + E * ftp));
            out.d_tp += w * (bracket * I * ej * E * P + s2pi * (I * ej * P * kt.f[k][j] + E * dftp));
            out.d_t_tp += w * (bracket * ek * ej * E * P + s2pi * (I * ej * P * kt.df[k][j] - I * ek * E * dftp));
        }
    }
    out.v *= 0.5;
    out.d_tp *= 0.5;
    out.d_t_tp *= 0.5;
    return out;
}

// Stationary part as a function of the complex lag Delta: value, d/dDelta, -d^2/dDelta^2.
struct QpValue {
    cplx v;
    cplx d;
    cplx mdd;
};

QpValue qp_at(const Active& a, cplx delta) {
    QpValue q{0.0, 0.0, 0.0};
    for (int j = 0; j < a.n; ++j) {
        AuxFG fg = aux_fg(a.eta[j] * delta);
        q.v += a.res[j] * fg.g;
        q.d += a.res[j] * a.eta[j] * fg.f;
        q.mdd += a.res[j] * a.eta[j] * a.eta[j] * fg.g;
    }
    q.v *= I / pi;
    q.d *= I / pi;
    q.mdd *= I / pi;
    return q;
}

// Delta -> 0 limits with the logarithms cancelled through the sum rules.
QpValue qp_equal_time(const Active& a) {
    QpValue q{0.0, 0.0, 0.0};
    for (int j = 0; j < a.n; ++j) {
        cplx l = std::log(-I * a.eta[j]);
        q.v += a.res[j] * l;
        q.d += a.res[j] * a.eta[j];
        q.mdd += a.res[j] * a.eta[j] * a.eta[j] * l;
    }
    q.v *= -I / pi;
    q.d *= 0.5 * I;
    q.mdd *= -I / pi;
    return q;
}

QpValue qp_nd(const Active& a, double delta, const EpsilonPolicy& eps, double omega0) {
    if (eps.equal_time_mode == EqualTimeMode::limit_formula) {
        if (delta == 0.0) return qp_equal_time(a);
        return qp_at(a, delta);
    }
    // Richardson on Delta - i eps: the leading error is linear in eps
    double e = eps.epsilon * omega0;
    QpValue h = qp_at(a, cplx(delta, -e));
    QpValue h2 = qp_at(a, cplx(delta, -0.5 * e));
    return {2.0 * h2.v - h.v, 2.0 * h2.d - h.d, 2.0 * h2.mdd - h.mdd};
}

void require_times(double t, double tp, const char* fn) {
    if (!(std::isfinite(t) && std::isfinite(tp) && t >= 0.0 && tp >= 0.0))
        throw DomainError(std::string(fn) + ": times must be finite and >= 0");
}

void require_valid(const ModelParams& p, const EpsilonPolicy& eps) {
    p.validate();
    eps.validate();
}

}  // namespace

void EpsilonPolicy::validate() const {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ParameterError("EpsilonPolicy: epsilon must be > 0");
}

cplx transient_G(const SpectralData& s, int k, int j, cplx c, double alpha) {
    if (k < 0 || k > 3 || j < 0 || j > 3) throw DomainError("transient_G: root index out of range");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw DomainError("transient_G: alpha must be >= 0");
    cplx e = std::conj(s.roots[k]);
    cplx ej = s.roots[j];
    return kernel_g(e, ej, c, g_scaled(c, alpha), g_scaled(-e, alpha), g_scaled(-ej, alpha)).g;
}

cplx transient_F(const SpectralData& s, double eta_r, double eta_0, int k, int j, double alpha) {
    const auto cs = c_values(eta_r, eta_0);
    return 0.5 * I * (transient_G(s, k, j, cs[0], alpha) + transient_G(s, k, j, cs[1], alpha)) -
           0.5 * I * (transient_G(s, k, j, cs[2], alpha) + transient_G(s, k, j, cs[3], alpha));
}

cplx transient_F(const SpectralData& s, const ModelParams& p, int k, int j, double alpha) {
    p.validate();
    return transient_F(s, p.eta_r, p.eta_0, k, j, alpha);
}

cplx corr_qp(const ModelParams& p, const SpectralData& s, double dt, const EpsilonPolicy& eps) {
    require_valid(p, eps);
    if (!std::isfinite(dt)) throw DomainError("corr_qp: non-finite time difference");
    return qp_nd(active_roots(s), p.omega0 * dt, eps, p.omega0).v / (p.mass_m * p.omega0);
}

cplx corr_tr(const ModelParams& p, const SpectralData& s, double t, double t_prime) {
    p.validate();
    require_times(t, t_prime, "corr_tr");
    return transient_nd(p, active_roots(s), p.omega0 * t, p.omega0 * t_prime).v / (p.mass_m * p.omega0);
}

CorrelatorPoint corr_full(const ModelParams& p, const SpectralData& s, double t, double t_prime,
                          const EpsilonPolicy& eps) {
    require_valid(p, eps);
    require_times(t, t_prime, "corr_full");
    Active a = active_roots(s);
    double scale = 1.0 / (p.mass_m * p.omega0);
    CorrelatorPoint pt;
    pt.t = t;
    pt.t_prime = t_prime;
    pt.qp_value = qp_nd(a, p.omega0 * (t - t_prime), eps, p.omega0).v * scale;
    pt.tr_value = transient_nd(p, a, p.omega0 * t, p.omega0 * t_prime).v * scale;
    pt.total = pt.qp_value + pt.tr_value;
    return pt;
}

cplx corr_dtp(const ModelParams& p, const SpectralData& s, double t, double t_prime, const EpsilonPolicy& eps) {
    require_valid(p, eps);
    require_times(t, t_prime, "corr_dtp");
    Active a = active_roots(s);
    QpValue q = qp_nd(a, p.omega0 * (t - t_prime), eps, p.omega0);
    TrValue tr = transient_nd(p, a, p.omega0 * t, p.omega0 * t_prime);
    return (-q.d + tr.d_tp) / p.mass_m;
}

cplx corr_vv(const ModelParams& p, const SpectralData& s, double t, double t_prime, const EpsilonPolicy& eps) {
    require_valid(p, eps);
    require_times(t, t_prime, "corr_vv");
    Active a = active_roots(s);
    QpValue q = qp_nd(a, p.omega0 * (t - t_prime), eps, p.omega0);
    TrValue tr = transient_nd(p, a, p.omega0 * t, p.omega0 * t_prime);
    return (q.mdd + tr.d_t_tp) * (p.omega0 / p.mass_m);
}

EqualTimeMoments equal_time_moments(const ModelParams& p, const SpectralData& s, double tau, const EpsilonPolicy& eps) {
    require_valid(p, eps);
    require_times(tau, tau, "equal_time_moments");
    Active a = active_roots(s);
    QpValue q = qp_nd(a, 0.0, eps, p.omega0);
    TrValue tr = transient_nd(p, a, tau, tau);
    return {q.v + tr.v, -q.d + tr.d_tp, q.mdd + tr.d_t_tp};
}

Variances variances(const ModelParams& p, const SpectralData& s, double t, const EpsilonPolicy& eps) {
    EqualTimeMoments m = equal_time_moments(p, s, p.omega0 * t, eps);
    auto check = [&](cplx v, double expect_im, const char* what) {
        double resid = std::abs(v.imag() - expect_im);
        if (!(resid <= 1e-10 * std::max(1.0, std::abs(v))))
            throw ConsistencyError(std::string("variances: imaginary residue ") + std::to_string(resid) + " in " + what +
                                   " at t = " + std::to_string(t));
    };
    check(m.xx, 0.0, "<x^2>");
    check(m.vv, 0.0, "<v^2>");
    check(m.xv, 0.5, "<x p>");  // commutator part i/2
    Variances v;
    v.x_var = m.xx.real() / (p.mass_m * p.omega0);
    v.p_var = m.vv.real() * p.mass_m * p.omega0;
    v.xp_sym = m.xv.real();
    return v;
}

}  // namespace qbm
