#include "qbm/oracle.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "qbm/errors.hpp"

namespace qbm {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 61>;

struct Sum {
    cplx v = 0.0;
    double err = 0.0;
    double l1 = 0.0;
};

using Panels = std::vector<std::pair<double, double>>;

// Cut [a, b] into equal panels no longer than max_piece.
void add_panels(Panels& out, double a, double b, double max_piece) {
    if (!(b > a)) return;
    int n = std::max(1, static_cast<int>(std::ceil((b - a) / max_piece)));
    double h = (b - a) / n;
    for (int i = 0; i < n; ++i) out.emplace_back(a + i * h, (i + 1 == n) ? b : a + (i + 1) * h);
}

// One 61-point Kronrod panel with the embedded 30-point Gauss rule as the error
// estimate. The library's single-panel estimate carries an absolute floor that
// does not shrink with the panel, which stalls the global bisection below.
template <class F>
cplx kronrod_panel(F& f, double a, double b, double& err, double& l1) {
    static const auto& kx = GK::abscissa();
    static const auto& kw = GK::weights();
    static const auto& gw = boost::math::quadrature::gauss<double, 30>::weights();
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    cplx f0 = f(c);
    cplx k = kw[0] * f0, g = 0.0;
    double abs_sum = kw[0] * std::abs(f0);
    for (std::size_t i = 1; i < kx.size(); ++i) {
        cplx fp = f(c + h * kx[i]), fm = f(c - h * kx[i]);
        k += kw[i] * (fp + fm);
        abs_sum += kw[i] * (std::abs(fp) + std::abs(fm));
        if (i % 2 == 1) g += gw[i / 2] * (fp + fm);
    }
    l1 = abs_sum * h;
    err = std::abs(k - g) * h + 50.0 * std::numeric_limits<double>::epsilon() * l1;
    return k * h;
}

// Globally adaptive Gauss-Kronrod: bisect the panel with the largest error estimate
// until the summed estimate meets the tolerance relative to the whole integral.
// A per-panel relative target would stall on panels whose contribution is negligible.
template <class F>
void adapt(Sum& acc, F& f, const Panels& init, const QuadratureSpec& q, std::size_t max_panels) {
    struct Item {
        double a, b, err, l1;
        cplx v;
        bool operator<(const Item& o) const { return err < o.err; }
    };
    auto eval = [&](double a, double b) {
        Item it{a, b, 0.0, 0.0, 0.0};
        it.v = kronrod_panel(f, a, b, it.err, it.l1);
        return it;
    };
    std::priority_queue<Item> heap;
    cplx v = 0.0;
    double err = 0.0, l1 = 0.0;
    for (auto [a, b] : init) {
        Item it = eval(a, b);
        v += it.v;
        err += it.err;
        l1 += it.l1;
        heap.push(it);
    }
    std::vector<Item> done;
    while (!heap.empty() && heap.size() + done.size() < max_panels &&
           err > std::max(q.abs_tol, q.rel_tol * (acc.l1 + l1))) {
        Item w = heap.top();
        heap.pop();
        double m = 0.5 * (w.a + w.b);
        if (!(m > w.a && m < w.b) || (w.b - w.a) < 1e-13 * std::max(1.0, std::abs(m))) {
            done.push_back(w);  // cannot be resolved further
            if (heap.empty()) break;
            continue;
        }
        Item l = eval(w.a, m), r = eval(m, w.b);
        v += l.v + r.v - w.v;
        err += l.err + r.err - w.err;
        l1 += l.l1 + r.l1 - w.l1;
        heap.push(l);
        heap.push(r);
    }
    // re-sum to shed drift from the incremental updates
    v = 0.0;
    err = l1 = 0.0;
    auto add = [&](const Item& it) {
        v += it.v;
        err += it.err;
        l1 += it.l1;
    };
    for (const Item& it : done) add(it);
    for (; !heap.empty(); heap.pop()) add(heap.top());
    acc.v += v;
    acc.err += err;
    acc.l1 += l1;
}

// Fixed-order Gauss rule on a smooth folded PV window. Adaptive bisection would push
// nodes towards t = 0 where the difference quotient loses digits to cancellation.
template <class F>
void add_folded_window(Sum& acc, F& f, double d) {
    cplx hi = boost::math::quadrature::gauss<double, 30>::integrate(f, 0.0, d);
    cplx lo = boost::math::quadrature::gauss<double, 20>::integrate(f, 0.0, d);
    acc.v += hi;
    acc.err += std::abs(hi - lo);
    acc.l1 += std::abs(hi);
}

template <class F>
Sum integrate_breaks(F& f, std::vector<double> br, double max_piece, const QuadratureSpec& q,
                     std::size_t max_panels = 200000) {
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
    Panels panels;
    for (std::size_t i = 0; i + 1 < br.size(); ++i) add_panels(panels, br[i], br[i + 1], max_piece);
    Sum acc;
    adapt(acc, f, panels, q, max_panels);
    return acc;
}

std::string fmt_sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

void check_converged(const Sum& s, const QuadratureSpec& q, const char* fn) {
    double bound = 1e3 * std::max(q.abs_tol, q.rel_tol * s.l1);
    if (!std::isfinite(std::abs(s.v)) || !(s.err <= bound))
        throw ToleranceError(std::string(fn) + ": quadrature did not converge (error estimate " + fmt_sci(s.err) + ")");
}

// Break points on [lo, hi] (dimensionless): spectral features of the model,
// then a doubling ladder so that each panel sees a bounded dynamic range.
std::vector<double> feature_breaks(const ModelParams& p, double lo, double hi) {
    std::vector<double> b{lo, hi};
    const double s = std::sqrt(1.0 + p.sigma * p.sigma);
    for (double x : {p.eta_r, p.eta_r - 3.0 * p.eta_0, p.eta_r + 3.0 * p.eta_0, 1.0, s, 0.5 * s, 2.0 * s}) {
        if (x > lo && x < hi) b.push_back(x);
        if (-x > lo && -x < hi) b.push_back(-x);
    }
    for (double x = 4.0 * std::max(1.0, s); x < std::max(std::abs(lo), std::abs(hi)); x *= 2.0) {
        if (x > lo && x < hi) b.push_back(x);
        if (-x > lo && -x < hi) b.push_back(-x);
    }
    return b;
}

double osc_piece(double tau) { return tau > 0.0 ? std::min(2.0, 2.0 * pi / tau) : 1e300; }

// Im zeta / |zeta|^2 on the real axis, dimensionless
double weight(const ModelParams& p, double eta) {
    cplx z = zeta_dimless(p, eta);
    return z.imag() / std::norm(z);
}

// int_L^inf x^{-n} e^{-i x tau} dx to leading order
cplx tail_power(int n, double L, double tau) {
    if (std::abs(tau) * L <= 1.0) return cplx(1.0 / ((n - 1) * std::pow(L, n - 1)), -tau / ((n - 2) * std::pow(L, n - 2)));
    return std::exp(-I * tau * L) / (I * tau * std::pow(L, n));
}

void require_t(double t, const char* fn) {
    if (!(std::isfinite(t) && t >= 0.0)) throw DomainError(std::string(fn) + ": time must be finite and >= 0");
}

// Dimensionless A(tau) and A'(tau); folding w -> -w turns both into
// integrals of the spectral weight over the half line.
cplx a_nd(const ModelParams& p, double tau, bool deriv, const QuadratureSpec& q) {
    const double L = q.cutoff;
    auto f = [&](double eta) { return deriv ? eta * std::cos(eta * tau) * weight(p, eta) : std::sin(eta * tau) * weight(p, eta); };
    if (!deriv && tau == 0.0) return 0.0;
    Sum s = integrate_breaks(f, feature_breaks(p, 0.0, L), osc_piece(tau), q);
    check_converged(s, q, "A_func");
    cplx v = s.v;
    if (q.tail_correction) {
        double c = std::pow(L, 5) * weight(p, L);  // weight ~ c / eta^5
        // sin and cos parts of the x^{-n} e^{-i x tau} tail
        cplx t = tail_power(deriv ? 4 : 5, L, tau);
        v += c * (deriv ? t.real() : -t.imag());
    }
    return -2.0 * I / pi * v.real();
}

// Dimensionless B(w, tau).
cplx b_nd(const ModelParams& p, double w, double tau, double L, const QuadratureSpec& q) {
    const double x0 = -w;
    const double d = q.pv_halfwidth;
    if (!(L > std::abs(x0) + 2.0 * d)) throw DomainError("B_func: frequency beyond the inner cutoff");
    auto phi = [&](double x) { return std::exp(I * x * tau) / zeta_dimless(p, x); };
    const cplx phi0 = phi(x0);
    auto regular = [&](double x) { return phi(x) / (x - x0); };
    auto window = [&](double t) { return (phi(x0 + t) - phi(x0 - t)) / t; };

    std::vector<double> br = feature_breaks(p, -L, L);
    br.erase(std::remove_if(br.begin(), br.end(), [&](double x) { return std::abs(x - x0) < 2.0 * d; }), br.end());
    br.push_back(x0 - d);
    br.push_back(x0 + d);
    std::sort(br.begin(), br.end());

    Panels panels;
    for (std::size_t i = 0; i + 1 < br.size(); ++i)
        if (br[i] != x0 - d) add_panels(panels, br[i], br[i + 1], osc_piece(tau));  // window handled below
    Sum s;
    adapt(s, regular, panels, q, 50000);
    add_folded_window(s, window, d);
    check_converged(s, q, "B_func");
    cplx pv = s.v;
    if (q.tail_correction && tau > 0.0) {
        // 1/(zeta (x + w)) -> -1/x^3 beyond the cutoff
        double st = (tau * L > 1.0) ? std::cos(L * tau) / (tau * L * L * L) : tau / L;
        pv += -2.0 * I * st;
    }
    return (pv - I * pi * phi0) / (2.0 * pi * I);
}

}  // namespace

void QuadratureSpec::validate() const {
    if (!(cutoff > 10.0)) throw ParameterError("QuadratureSpec: cutoff must be > 10");
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw ParameterError("QuadratureSpec: tolerances must be > 0");
    if (!(pv_halfwidth > 0.0)) throw ParameterError("QuadratureSpec: pv_halfwidth must be > 0");
}

cplx quad_zeta(const BetaSqFn& beta_sq, const ModelParams& p, double omega, const QuadratureSpec& q) {
    p.validate();
    q.validate();
    if (!std::isfinite(omega)) throw DomainError("quad_zeta: non-finite frequency");
    const double w0 = p.omega0;
    const double base = w0 * w0 - omega * omega;
    if (omega == 0.0) return base;

    // integrate in the dimensionless variable x = nu / omega0
    const double L = q.cutoff + std::abs(omega) / w0;
    const double x0 = omega / w0;
    const double d = q.pv_halfwidth;
    const double b0 = beta_sq(omega);
    auto regular = [&](double x) { return cplx(beta_sq(w0 * x) / (x - x0)); };
    // PV window folded onto t in (0, d]: the odd pole cancels and the remainder is smooth
    auto window = [&](double t) { return (beta_sq(w0 * (x0 + t)) - beta_sq(w0 * (x0 - t))) / t; };

    std::vector<double> br = feature_breaks(p, -L, L);
    br.erase(std::remove_if(br.begin(), br.end(), [&](double x) { return std::abs(x - x0) < 2.0 * d; }), br.end());
    br.push_back(x0 - d);
    br.push_back(x0 + d);
    std::sort(br.begin(), br.end());
    Panels panels;
    for (std::size_t i = 0; i + 1 < br.size(); ++i)
        if (br[i] != x0 - d) add_panels(panels, br[i], br[i + 1], 1e300);
    Sum s;
    adapt(s, regular, panels, q, 200000);
    add_folded_window(s, window, d);
    check_converged(s, q, "quad_zeta");
    double pv = s.v.real();  // the dx measure: d nu = omega0 dx, and 1/(nu - omega) = 1/(omega0 (x - x0))
    if (q.tail_correction) {
        // beta^2 ~ C/nu^2: the odd 1/nu^3 part cancels, leaving 2 C x0 / (3 L^3)
        double c = 0.5 * (beta_sq(w0 * L) + beta_sq(-w0 * L)) * L * L;
        pv += 2.0 * c * x0 / (3.0 * L * L * L);
    }
    const double pref = omega / (2.0 * p.mass_m * p.mu);
    return cplx(base - pref * pv, pi * pref * b0);
}

cplx quad_corr_qp(const ModelParams& p, double dt, const QuadratureSpec& q) {
    p.validate();
    q.validate();
    if (!std::isfinite(dt)) throw DomainError("quad_corr_qp: non-finite time difference");
    const double tau = p.omega0 * dt;
    const double L = q.cutoff;
    auto f = [&](double eta) { return weight(p, eta) * std::exp(-I * eta * tau); };
    Sum s = integrate_breaks(f, feature_breaks(p, 0.0, L), osc_piece(std::abs(tau)), q);
    check_converged(s, q, "quad_corr_qp");
    cplx v = s.v;
    if (q.tail_correction) v += std::pow(L, 5) * weight(p, L) * tail_power(5, L, tau);
    return v / (pi * p.mass_m * p.omega0);
}

double quad_vv_stationary(const ModelParams& p, const QuadratureSpec& q) {
    p.validate();
    q.validate();
    const double L = q.cutoff;
    auto f = [&](double eta) { return eta * eta * weight(p, eta); };
    Sum s = integrate_breaks(f, feature_breaks(p, 0.0, L), 1e300, q);
    check_converged(s, q, "quad_vv_stationary");
    double v = s.v.real();
    if (q.tail_correction) v += std::pow(L, 5) * weight(p, L) / (2.0 * L * L);
    return v * p.omega0 / (pi * p.mass_m);
}

cplx commutator_integral(const ModelParams& p, const QuadratureSpec& q) {
    p.validate();
    q.validate();
    const double L = q.cutoff;
    // pairing w with -w leaves -2i w Im zeta / |zeta|^2; the 1/w tails cancel
    auto f = [&](double eta) { return eta * weight(p, eta); };
    Sum s = integrate_breaks(f, feature_breaks(p, 0.0, L), 1e300, q);
    check_converged(s, q, "commutator_integral");
    double v = s.v.real();
    if (q.tail_correction) v += std::pow(L, 5) * weight(p, L) / (3.0 * L * L * L);
    return 2.0 * I * v / pi;
}

cplx A_func(const ModelParams& p, double t, const QuadratureSpec& q) {
    p.validate();
    q.validate();
    require_t(t, "A_func");
    return a_nd(p, p.omega0 * t, false, q) / p.omega0;
}

cplx A_func_deriv(const ModelParams& p, double t, const QuadratureSpec& q) {
    p.validate();
    q.validate();
    require_t(t, "A_func_deriv");
    return a_nd(p, p.omega0 * t, true, q);
}

cplx B_func(const ModelParams& p, double omega, double t, const QuadratureSpec& q) {
    p.validate();
    q.validate();
    require_t(t, "B_func");
    if (!std::isfinite(omega)) throw DomainError("B_func: non-finite frequency");
    double w = omega / p.omega0;
    double L = std::max(q.cutoff, 2.0 * std::abs(w) + 50.0);
    return b_nd(p, w, p.omega0 * t, L, q) / (p.omega0 * p.omega0);
}

cplx quad_corr_tr_general(const ModelParams& p, double t, double t_prime, const QuadratureSpec& q) {
    p.validate();
    q.validate();
    require_t(t, "quad_corr_tr_general");
    require_t(t_prime, "quad_corr_tr_general");
    const double tau = p.omega0 * t, taup = p.omega0 * t_prime;
    const double W = q.cutoff;
    const double Lin = 2.0 * W + 50.0;

    QuadratureSpec qa = q;
    qa.cutoff = std::max(q.cutoff, 2000.0);
    const cplx A = a_nd(p, tau, false, qa), Ap = a_nd(p, taup, false, qa);
    const cplx dA = a_nd(p, tau, true, qa), dAp = a_nd(p, taup, true, qa);
    const cplx first = (A + I * dA) * std::conj(Ap + I * dAp);

    QuadratureSpec qi = q;
    qi.rel_tol = std::max(q.rel_tol, 1e-11);
    auto f = [&](double w) {
        cplx z = zeta_dimless(p, w);
        cplx bt = b_nd(p, w, tau, Lin, qi);
        cplx btp = (taup == tau) ? bt : b_nd(p, w, taup, Lin, qi);
        return z.imag() * (std::exp(-I * w * tau) * std::conj(btp) / std::conj(z) + bt * std::exp(I * w * taup) / z +
                           bt * std::conj(btp));
    };
    QuadratureSpec qo = q;
    qo.rel_tol = std::max(q.rel_tol, 1e-10);
    Sum s = integrate_breaks(f, feature_breaks(p, 0.0, W), osc_piece(std::max(tau, taup)), qo, 20000);
    check_converged(s, qo, "quad_corr_tr_general");
    cplx integral = s.v;
    if (q.tail_correction) {
        // B(w, tau) -> A(tau)/w and Im zeta -> C/w beyond the cutoff
        double c = W * zeta_dimless(p, W).imag();
        integral += A * std::conj(Ap) * c / (2.0 * W * W);
    }
    return 0.5 * (first + 2.0 / pi * integral) / (p.mass_m * p.omega0);
}

}  // namespace qbm
