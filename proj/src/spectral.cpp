#include "qbm/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>

#include "qbm/errors.hpp"

namespace qbm {

namespace {

// N(eta) = c4 eta^4 + ... + c0, c4 = -1
std::array<cplx, 5> quartic_coeffs(const ModelParams& p) {
    double e0 = p.eta_0, s2 = p.sigma * p.sigma;
    double a = e0 * e0 + p.eta_r * p.eta_r;
    return {cplx(-a, 0.0), cplx(0.0, -e0 * (2.0 + s2)), cplx(1.0 + a + s2, 0.0), cplx(0.0, 2.0 * e0), cplx(-1.0, 0.0)};
}

double residual_scale(const std::array<cplx, 5>& c, cplx x) {
    double r = std::abs(x), s = 0.0, pw = 1.0;
    for (int k = 0; k <= 4; ++k, pw *= r) s += std::abs(c[k]) * pw;
    return s;
}

// Factored evaluation (1 - eta^2) D + sigma^2 eta u keeps the absolute error
// small near clustered roots, where the expanded coefficients cancel.
struct Quartic {
    double s2, er, e0;
    explicit Quartic(const ModelParams& p) : s2(p.sigma * p.sigma), er(p.eta_r), e0(p.eta_0) {}
    cplx d(cplx x) const {
        cplx u = x - I * e0;
        return (u - er) * (u + er);
    }
    cplx n(cplx x) const { return (1.0 - x) * (1.0 + x) * d(x) + s2 * x * (x - I * e0); }
    cplx dn(cplx x) const {
        cplx u = x - I * e0;
        return -2.0 * x * d(x) + 2.0 * (1.0 - x) * (1.0 + x) * u + s2 * (2.0 * x - I * e0);
    }
};

std::string fmt_root(cplx z) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "(%.17g, %.17g)", z.real(), z.imag());
    return buf;
}

// Pairs eta with -conj(eta) and enforces the reflection symmetry exactly.
void symmetrize(std::array<cplx, 4>& r) {
    std::array<bool, 4> used{};
    for (int i = 0; i < 4; ++i) {
        if (used[i]) continue;
        used[i] = true;
        cplx mirror = -std::conj(r[i]);
        int best = -1;
        double bd = std::abs(mirror - r[i]);  // self-paired candidate
        for (int j = 0; j < 4; ++j) {
            if (used[j]) continue;
            double d = std::abs(mirror - r[j]);
            if (d < bd) bd = d, best = j;
        }
        if (best < 0) {
            r[i] = cplx(0.0, r[i].imag());
        } else {
            used[best] = true;
            cplx avg = 0.5 * (r[i] - std::conj(r[best]));
            r[i] = avg;
            r[best] = -std::conj(avg);
        }
    }
}

}  // namespace

void sort_roots(std::array<cplx, 4>& r) {
    std::sort(r.begin(), r.end(), [](cplx a, cplx b) { return a.imag() > b.imag(); });
    // group near-equal imaginary parts, then order each group by real part
    std::size_t i = 0;
    while (i < r.size()) {
        std::size_t j = i + 1;
        while (j < r.size() && std::abs(r[j].imag() - r[j - 1].imag()) <= 1e-9 * std::max(1.0, std::abs(r[i].imag())))
            ++j;
        std::sort(r.begin() + i, r.begin() + j, [](cplx a, cplx b) { return a.real() < b.real(); });
        i = j;
    }
}

std::array<double, 16> SpectralData::to_record() const {
    std::array<double, 16> out{};
    for (int j = 0; j < 4; ++j) {
        out[2 * j] = roots[j].real();
        out[2 * j + 1] = roots[j].imag();
        out[8 + 2 * j] = residues[j].real();
        out[8 + 2 * j + 1] = residues[j].imag();
    }
    return out;
}

SpectralData SpectralData::from_record(const std::array<double, 16>& rec) {
    SpectralData s;
    for (int j = 0; j < 4; ++j) {
        s.roots[j] = {rec[2 * j], rec[2 * j + 1]};
        s.residues[j] = {rec[8 + 2 * j], rec[8 + 2 * j + 1]};
    }
    return s;
}

cplx quartic_numerator(const ModelParams& p, cplx eta) { return Quartic(p).n(eta); }

cplx quartic_numerator_deriv(const ModelParams& p, cplx eta) { return Quartic(p).dn(eta); }

SpectralData find_roots(const ModelParams& p, const RootOptions& opt) {
    p.validate();
    const auto c = quartic_coeffs(p);

    Eigen::Matrix4cd comp = Eigen::Matrix4cd::Zero();
    for (int k = 0; k < 4; ++k) comp(0, k) = -c[3 - k] / c[4];
    for (int k = 1; k < 4; ++k) comp(k, k - 1) = 1.0;
    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(comp, false);
    if (es.info() != Eigen::Success) throw ConvergenceError("find_roots: companion eigenvalue solver failed");

    std::array<cplx, 4> r;
    for (int k = 0; k < 4; ++k) r[k] = es.eigenvalues()[k];
    const Quartic q(p);
    for (int it = 0; it < opt.newton_steps; ++it)
        for (auto& x : r) {
            cplx d = q.dn(x);
            if (d != 0.0) x -= q.n(x) / d;
        }
    symmetrize(r);
    sort_roots(r);

    SpectralData s;
    s.roots = r;
    for (int j = 0; j < 4; ++j) {
        cplx x = r[j];
        if (!(x.imag() >= opt.near_real_tol))
            throw DegeneracyError("find_roots: root " + std::to_string(j) + " = " + fmt_root(x) +
                                  " is not safely inside the upper half plane (Im < " + std::to_string(opt.near_real_tol) + ")");
        double res = std::abs(q.n(x)) / residual_scale(c, x);
        if (!(res <= opt.residual_tol))
            throw ConvergenceError("find_roots: residual " + std::to_string(res) + " at root " + fmt_root(x));
        s.residues[j] = q.d(x) / q.dn(x);
    }
    return s;
}

std::array<cplx, 4> weak_coupling_roots(double sigma, double eta_r, double eta_0) {
    if (!(sigma >= 0.0) || !(eta_r >= 0.0) || !(eta_0 > 0.0))
        throw ParameterError("weak_coupling_roots: need sigma >= 0, eta_r >= 0, eta_0 > 0");
    const double h = 0.5 * sigma * sigma;
    std::array<cplx, 4> r;
    int n = 0;
    for (double s : {1.0, -1.0}) {
        cplx a(s, -eta_0);
        cplx den = a * a - eta_r * eta_r;
        if (std::abs(den) < 1e-9) throw DegeneracyError("weak_coupling_roots: resonant denominator near zero");
        r[n++] = s + h * a / den;
    }
    for (double s : {1.0, -1.0}) {
        cplx a(s * eta_r, eta_0);
        cplx den = a * a - 1.0;
        if (std::abs(den) < 1e-9) throw DegeneracyError("weak_coupling_roots: resonant denominator near zero");
        r[n++] = a + h * a / den;
    }
    sort_roots(r);
    return r;
}

std::array<cplx, 4> weak_coupling_roots(const ModelParams& p) {
    p.validate();
    return weak_coupling_roots(p.sigma, p.eta_r, p.eta_0);
}

std::array<cplx, 4> strong_coupling_roots(const ModelParams& p) {
    p.validate();
    const double s = p.sigma, e0 = p.eta_0, er = p.eta_r;
    if (std::abs(e0) < 1e-12) throw DomainError("strong_coupling_roots: eta_0 too close to zero");
    std::array<cplx, 4> r{cplx(s, 0.5 * e0), cplx(-s, 0.5 * e0), cplx(0.0, (e0 * e0 + er * er) / (e0 * s * s)),
                          cplx(0.0, e0 - er * er * (e0 * e0 + 1.0) / (e0 * s * s))};
    sort_roots(r);
    return r;
}

double relaxation_time(const SpectralData& s, const ModelParams& p) {
    double m = s.roots[0].imag();
    for (auto r : s.roots) m = std::min(m, r.imag());
    if (!(m > 0.0)) throw DomainError("relaxation_time: root not in the upper half plane");
    return 1.0 / (p.omega0 * m);
}

cplx partial_fraction(const SpectralData& s, cplx eta) {
    cplx v = 0.0;
    for (int j = 0; j < 4; ++j) v += s.residues[j] / (eta - s.roots[j]);
    return v;
}

SumRules sum_rules(const SpectralData& s) {
    SumRules out{0.0, 0.0};
    for (int j = 0; j < 4; ++j) {
        out.sum_r += s.residues[j];
        out.sum_r_eta += s.residues[j] * s.roots[j];
    }
    return out;
}

}  // namespace qbm
