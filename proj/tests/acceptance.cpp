// One PASS/FAIL line per acceptance criterion; exit status is nonzero if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "qbm/bath.hpp"
#include "qbm/config.hpp"
#include "qbm/correlators.hpp"
#include "qbm/observables.hpp"
#include "qbm/oracle.hpp"
#include "qbm/spectral.hpp"

using namespace qbm;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

ModelParams dimless(double sigma, double eta_r, double eta_0) { return {1.0, 1.0, 1.0, sigma, eta_r, eta_0}; }

const ModelParams kRef = dimless(1.0, 1.0, 0.5);

double match_err(const std::array<cplx, 4>& got, const std::array<cplx, 4>& want, bool relative) {
    double worst = 0.0;
    for (cplx w : want) {
        double best = 1e300;
        for (cplx g : got) best = std::min(best, std::abs(g - w) / (relative ? std::abs(w) : 1.0));
        worst = std::max(worst, best);
    }
    return worst;
}

struct Outcome {
    bool pass;
    std::string summary;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

Outcome commutator() {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> us(0.1, 5.0), u0(0.1, 2.0), ur(0.0, 2.0);
    QuadratureSpec q;
    q.cutoff = 1e4;
    double worst = 0.0, slowest = 0.0;
    for (int i = 0; i < 10; ++i) {
        ModelParams p = dimless(us(rng), ur(rng), u0(rng));
        auto t0 = Clock::now();
        cplx c = commutator_integral(p, q);
        slowest = std::max(slowest, seconds_since(t0));
        worst = std::max(worst, std::abs(c - I));
    }
    return {worst <= 1e-4 && slowest < 1.0, fmt("max |C - i| = %.2e (tol 1e-4), slowest %.3f s (limit 1 s)", worst, slowest)};
}

Outcome spectral_integrity() {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    double sr_worst = 0.0, pf_worst = 0.0;
    for (double sigma : {0.1, 1.0, 5.0})
        for (int a = 0; a < 10; ++a)
            for (int b = 0; b < 10; ++b) {
                ModelParams p = dimless(sigma, 2.0 * b / 9.0, 0.1 + 1.9 * a / 9.0);
                SpectralData s = find_roots(p);
                SumRules sr = sum_rules(s);
                sr_worst = std::max({sr_worst, std::abs(sr.sum_r), std::abs(sr.sum_r_eta + 1.0)});
                for (int i = 0; i < 100;) {
                    cplx eta(u(rng), u(rng));
                    bool near = std::abs((eta - cplx(0, p.eta_0)) * (eta - cplx(0, p.eta_0)) - p.eta_r * p.eta_r) < 1e-3;
                    for (cplx r : s.roots) near = near || std::abs(eta - r) < 1e-3;
                    if (near) continue;
                    ++i;
                    pf_worst = std::max(pf_worst, rel(partial_fraction(s, eta), 1.0 / zeta_dimless(p, eta)));
                }
            }
    ModelParams weak = dimless(1e-3, 2.0, 0.3), strong = dimless(1e3, 1.0, 0.5);
    double weak_err = match_err(find_roots(weak).roots, weak_coupling_roots(weak), false);
    double strong_err = match_err(find_roots(strong).roots, strong_coupling_roots(strong), true);
    bool ok = sr_worst <= 1e-10 && pf_worst <= 1e-10 && weak_err <= 1e-8 && strong_err <= 1e-3;
    return {ok, fmt("sum rules %.2e, reconstruction %.2e (tol 1e-10); weak %.2e (1e-8), strong %.2e (1e-3)", sr_worst,
                    pf_worst, weak_err, strong_err)};
}

Outcome stationary() {
    double worst = 0.0;
    for (ModelParams p : {kRef, dimless(0.3, 0.0, 0.2), dimless(3.0, 2.0, 1.5)}) {
        SpectralData s = find_roots(p);
        for (double dt : {0.1, 1.0, 5.0, 20.0}) worst = std::max(worst, rel(corr_qp(p, s, dt), quad_corr_qp(p, dt)));
    }
    return {worst <= 1e-6, fmt("max relative deviation %.2e (tol 1e-6)", worst)};
}

Outcome transient() {
    SpectralData s = find_roots(kRef);
    QuadratureSpec q;
    q.cutoff = 60.0;
    double worst = 0.0;
    for (auto [t, tp] : {std::pair{2.0, 1.0}, {5.0, 5.0}, {0.5, 0.3}})
        worst = std::max(worst, rel(quad_corr_tr_general(kRef, t, tp, q), corr_tr(kRef, s, t, tp)));
    return {worst <= 1e-5, fmt("max relative deviation %.2e (tol 1e-5)", worst)};
}

Outcome anchors() {
    double c_err = 0.0, p_err = 0.0, e_err = 0.0;
    for (ModelParams p : {kRef, ModelParams{2.0, 3.0, 0.5, 1.5, 0.0, 0.7}, dimless(5.0, 2.0, 0.1)}) {
        SpectralData s = find_roots(p);
        const double x0 = 1.0 / (2.0 * p.mass_m * p.omega0);
        c_err = std::max(c_err, rel(corr_full(p, s, 0.0, 0.0).total, x0));
        p_err = std::max(p_err, std::abs(variances(p, s, 0.0).p_var / (p.mass_m * p.omega0 / 2.0) - 1.0));
        e_err = std::max({e_err, std::abs(delta_E(p, s, 0.0)) / p.omega0, std::abs(delta_T(p, s, 0.0)) / p.omega0});
    }
    return {c_err <= 1e-8 && p_err <= 1e-6 && e_err <= 1e-6,
            fmt("C(0,0) %.2e (1e-8), p_var(0) %.2e (1e-6), energies %.2e (1e-6)", c_err, p_err, e_err)};
}

Outcome microscopic() {
    auto t0 = Clock::now();
    SpectralData s = find_roots(kRef);
    BathAudit loose;
    loose.energy_tol = 1.0;  // drift is measured below
    BathTrace tr = bath_evolve(bath_init(kRef, 2000, 50.0), 20.0, 0.05, loose);
    double x_err = 0.0, e_err = 0.0, drift = 0.0;
    for (std::size_t i = 0; i < tr.size(); ++i) {
        double ref = variances(kRef, s, tr.times[i]).x_var;
        x_err = std::max(x_err, std::abs(tr.x_var[i] - ref) / ref);
        e_err = std::max(e_err, std::abs(tr.delta_E[i] - delta_E(kRef, s, tr.times[i])));
        drift = std::max(drift, std::abs(tr.total_energy[i] - tr.total_energy[0]));
    }
    double elapsed = seconds_since(t0);
    bool ok = x_err <= 1e-2 && e_err <= 1e-2 && drift <= 1e-6 && elapsed < 300.0;
    return {ok, fmt("x_var %.2e, delta_E %.2e (tol 1e-2), energy drift %.2e (1e-6), %.1f s", x_err, e_err, drift,
                    elapsed)};
}

Outcome surfaces() {
    auto t0 = Clock::now();
    SweepGrid g;
    for (int i = 0; i < 20; ++i) g.eta0_values.push_back(0.05 + 0.95 * i / 19.0);
    for (int i = 0; i < 20; ++i) g.etar_values.push_back(2.0 * i / 19.0);
    ModelParams base;
    g.quantity = GridQuantity::delta_E_asy;
    std::vector<double> e = evaluate_grid(base, g);
    g.quantity = GridQuantity::delta_T_asy;
    std::vector<double> k = evaluate_grid(base, g);
    double elapsed = seconds_since(t0);
    auto argmax = [](const std::vector<double>& v) {
        return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
    };
    double lo = std::min(*std::min_element(e.begin(), e.end()), *std::min_element(k.begin(), k.end()));
    std::size_t ie = argmax(e), ik = argmax(k);
    double e0 = g.eta0_values[ie / 20], er = g.etar_values[ie % 20];
    bool e_ok = ie / 20 == 0 && std::abs(er - 1.0) <= 2.0 / 19.0 + 1e-12;
    bool k_ok = ik == 0;
    bool ok = lo >= -1e-10 && e_ok && k_ok && elapsed < 10.0;
    return {ok, fmt("min %.2e (>= -1e-10); energy argmax at (%.3f, %.3f); ", lo, e0, er) +
                    (k_ok ? "kinetic argmax at the corner; " : "kinetic argmax off the corner; ") +
                    fmt("%.2f s (limit 10 s)", elapsed)};
}

Outcome subvacuum() {
    ModelParams p = dimless(1.0, 1.0, 0.1);
    SpectralData s = find_roots(p);
    double min_t = 1e300, min_u = 1e300;
    for (int i = 0; i <= 3000; ++i) {
        double t = 0.01 * i;
        min_t = std::min(min_t, delta_T(p, s, t));
        Variances v = variances(p, s, t);
        min_u = std::min(min_u, v.x_var * v.p_var);
    }
    return {min_t < 0.0 && min_u >= 0.25 - 1e-12, fmt("min delta_T %.4e (< 0), min x_var*p_var %.15f (>= 1/4)", min_t, min_u)};
}

Outcome derivatives() {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.2, 10.0);
    const double h = 1e-4;
    SpectralData s = find_roots(kRef);
    auto C = [&](double t, double tp) { return corr_full(kRef, s, t, tp).total; };
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        double t = u(rng), tp = u(rng);
        cplx fd = (C(t + h, tp + h) - C(t + h, tp - h) - C(t - h, tp + h) + C(t - h, tp - h)) / (4.0 * h * h);
        worst = std::max(worst, rel(corr_vv(kRef, s, t, tp), fd));
    }
    return {worst <= 1e-5, fmt("max relative deviation %.2e (tol 1e-5)", worst)};
}

Outcome scaling_and_decay() {
    ModelParams a{1.0, 1.0, 1.0, 1.3, 0.8, 0.4}, b = a;
    b.mass_m = 2.0;
    b.omega0 = 3.0;
    SpectralData sa = find_roots(a);
    double scale_err = 0.0;
    for (auto [t, tp] : {std::pair{0.3, 0.1}, {2.0, 2.0}, {1.1, 4.0}}) {
        cplx lhs = corr_full(b, find_roots(b), t, tp).total;
        cplx rhs = corr_full(a, sa, 3.0 * t, 3.0 * tp).total / 6.0;
        scale_err = std::max(scale_err, std::abs(lhs - rhs) / std::abs(rhs));
    }
    double decay = 0.0;
    for (ModelParams p : {kRef, dimless(1.0, 0.0, 0.5), dimless(2.0, 0.5, 0.8)}) {
        SpectralData s = find_roots(p);
        double T = 10.0 * relaxation_time(s, p);
        decay = std::max(decay, std::abs(delta_E(p, s, T) - delta_E_asy(p, s)) / p.omega0);
    }
    ModelParams weak = kRef;
    weak.sigma = 1e-3;
    cplx free = 0.5 * std::exp(-I * 3.0);
    double free_err = rel(corr_full(weak, find_roots(weak), 4.0, 1.0).total, free);
    bool ok = scale_err <= 1e-12 && decay < 1e-3 && free_err < 5.0 * weak.sigma * weak.sigma;
    return {ok, fmt("scaling %.2e (1e-12), late-time %.2e (1e-3), free limit %.2e (5e-6)", scale_err, decay, free_err)};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"canonical commutator", commutator},
        {"spectral integrity", spectral_integrity},
        {"stationary correlator vs quadrature", stationary},
        {"transient correlator vs general quadrature", transient},
        {"initial-condition anchors", anchors},
        {"discrete reservoir oracle", microscopic},
        {"energy surfaces", surfaces},
        {"kinetic energy below its initial value", subvacuum},
        {"velocity correlator derivatives", derivatives},
        {"scaling, late-time decay, free limit", scaling_and_decay},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += o.pass ? 0 : 1;
        std::printf("criterion %2zu %s  %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, o.summary.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
