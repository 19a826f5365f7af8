#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>

#include "doctest.h"
#include "qbm/correlators.hpp"
#include "qbm/errors.hpp"

using namespace qbm;

namespace {

const ModelParams kRef{1.0, 1.0, 1.0, 1.0, 1.0, 0.5};

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

// int_0^W f(w) dw over 2 pi / alpha chunks
template <class F>
cplx chunked(F f, double W, double chunk) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    cplx sum = 0.0;
    for (double a = 0.0; a < W; a += chunk) {
        double b = std::min(W, a + chunk);
        sum += cplx(GK::integrate([&](double w) { return f(w).real(); }, a, b, 8, 1e-13),
                    GK::integrate([&](double w) { return f(w).imag(); }, a, b, 8, 1e-13));
    }
    return sum;
}

}  // namespace

TEST_CASE("reference values of the stationary and transient parts") {
    SpectralData s = find_roots(kRef);
    CHECK(std::abs(corr_qp(kRef, s, 0.0) - 0.44384049690514) < 1e-12);
    CHECK(std::abs(corr_qp(kRef, s, 1.0) - cplx(0.17488656521467, -0.36036279835219)) < 1e-12);
    CHECK(std::abs(corr_tr(kRef, s, 2.0, 1.0) - 0.053571747864263) < 1e-12);
    CHECK(std::abs(corr_tr(kRef, s, 5.0, 5.0) + 0.0052382390348109) < 1e-13);
}

TEST_CASE("stationary part: Hermiticity and equal-time modes agree") {
    SpectralData s = find_roots(kRef);
    for (double dt : {0.1, 0.7, 3.0, 12.0}) CHECK(std::abs(std::conj(corr_qp(kRef, s, dt)) - corr_qp(kRef, s, -dt)) < 1e-13);
    EpsilonPolicy ex;
    ex.equal_time_mode = EqualTimeMode::epsilon_extrapolation;
    CHECK(std::abs(corr_qp(kRef, s, 0.0, ex) - corr_qp(kRef, s, 0.0)) < 1e-10);
    CHECK(std::abs(corr_qp(kRef, s, 2.0, ex) - corr_qp(kRef, s, 2.0)) < 1e-10);
    for (double t : {0.0, 0.4, 3.0}) {
        EqualTimeMoments a = equal_time_moments(kRef, s, t), b = equal_time_moments(kRef, s, t, ex);
        CHECK(std::abs(a.xx - b.xx) < 1e-10);
        CHECK(std::abs(a.xv - b.xv) < 1e-10);
        CHECK(std::abs(a.vv - b.vv) < 1e-7);
    }
    EpsilonPolicy bad;
    bad.epsilon = 0.0;
    CHECK_THROWS_AS(corr_qp(kRef, s, 0.0, bad), ParameterError);
}

TEST_CASE("weak-coupling stationary variance tends to the free ground state") {
    ModelParams p = kRef;
    p.sigma = 1e-4;
    cplx v = corr_qp(p, find_roots(p), 0.0);
    double s2 = p.sigma * p.sigma;
    CHECK(std::abs(v - 0.5) < 10.0 * s2 * std::abs(std::log(p.sigma)));
}

TEST_CASE("initial-state anchors") {
    for (ModelParams p : {kRef, ModelParams{2.0, 0.5, 3.0, 2.5, 0.0, 0.3}, ModelParams{0.7, 1.9, 1.0, 0.3, 1.7, 1.2}}) {
        SpectralData s = find_roots(p);
        CorrelatorPoint c = corr_full(p, s, 0.0, 0.0);
        CHECK(std::abs(c.total - 1.0 / (2.0 * p.mass_m * p.omega0)) < 1e-8 / (2.0 * p.mass_m * p.omega0));
        Variances v = variances(p, s, 0.0);
        CHECK(std::abs(v.x_var * 2.0 * p.mass_m * p.omega0 - 1.0) < 1e-6);
        CHECK(std::abs(v.p_var * 2.0 / (p.mass_m * p.omega0) - 1.0) < 1e-6);
        CHECK(std::abs(v.xp_sym) < 1e-10);
    }
}

TEST_CASE("Hermiticity and reality of the transient part") {
    SpectralData s = find_roots(kRef);
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.0, 15.0);
    for (int i = 0; i < 50; ++i) {
        double t = u(rng), tp = u(rng);
        CorrelatorPoint a = corr_full(kRef, s, t, tp), b = corr_full(kRef, s, tp, t);
        CHECK(std::abs(a.total - std::conj(b.total)) < 1e-10);
        CHECK(a.total == a.qp_value + a.tr_value);
        // the commutator is state independent, so the transient part is real
        CHECK(std::abs(a.tr_value.imag()) < 1e-12);
    }
}

TEST_CASE("exact unit scaling") {
    ModelParams a{1.0, 1.0, 1.0, 1.3, 0.8, 0.4}, b = a;
    b.mass_m = 2.0;
    b.omega0 = 3.0;
    SpectralData s = find_roots(a);  // dimensionless data are shared
    for (auto [t, tp] : {std::pair{0.3, 0.1}, std::pair{2.0, 2.0}, std::pair{1.1, 4.0}}) {
        cplx lhs = corr_full(b, s, t, tp).total;
        cplx rhs = corr_full(a, s, 3.0 * t, 3.0 * tp).total / 6.0;
        CHECK(std::abs(lhs - rhs) < 1e-12);
    }
}

TEST_CASE("analytic derivatives against finite differences") {
    SpectralData s = find_roots(kRef);
    const double h = 1e-4;
    auto C = [&](double t, double tp) { return corr_full(kRef, s, t, tp).total; };
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(0.2, 10.0);
    std::vector<std::pair<double, double>> pts{{2.0, 1.5}};
    for (int i = 0; i < 20; ++i) pts.emplace_back(u(rng), u(rng));
    for (auto [t, tp] : pts) {
        CAPTURE(t);
        CAPTURE(tp);
        cplx fd2 = (C(t + h, tp + h) - C(t + h, tp - h) - C(t - h, tp + h) + C(t - h, tp - h)) / (4.0 * h * h);
        CHECK(rel(corr_vv(kRef, s, t, tp), fd2) < 1e-5);
        cplx fd1 = (C(t, tp + h) - C(t, tp - h)) / (2.0 * h);
        CHECK(rel(corr_dtp(kRef, s, t, tp), fd1) < 1e-7);
    }
}

TEST_CASE("free ground state velocity variance") {
    ModelParams p{1.5, 0.8, 1.0, 1.0, 1.0, 0.5};
    SpectralData s = find_roots(p);
    cplx vv = corr_vv(p, s, 0.0, 0.0);
    CHECK(std::abs(vv.real() / (p.omega0 / (2.0 * p.mass_m)) - 1.0) < 1e-6);
}

TEST_CASE("equal-time variance stays real and positive; Heisenberg bound") {
    SpectralData s = find_roots(kRef);
    for (double t = 0.0; t <= 30.0; t += 0.25) {
        CorrelatorPoint c = corr_full(kRef, s, t, t);
        CHECK(c.total.real() > 0.0);
        CHECK(std::abs(c.total.imag()) < 1e-12);
        Variances v = variances(kRef, s, t);
        CHECK(v.x_var * v.p_var >= 0.25 - 1e-12);
    }
}

TEST_CASE("subvacuum momentum fluctuations at the cost of position spread") {
    ModelParams p{1.0, 1.0, 1.0, 1.0, 1.0, 0.1};
    SpectralData s = find_roots(p);
    Variances v0 = variances(p, s, 0.0);
    bool found = false;
    for (double t = 0.1; t < 30.0 && !found; t += 0.05) {
        Variances v = variances(p, s, t);
        found = v.p_var < v0.p_var && v.x_var > v0.x_var;
    }
    CHECK(found);
}

TEST_CASE("transients die out after many relaxation times") {
    for (ModelParams p : {kRef, ModelParams{1.0, 1.0, 1.0, 1.0, 0.0, 0.5}, ModelParams{1.0, 1.0, 1.0, 2.0, 0.5, 0.8}}) {
        SpectralData s = find_roots(p);
        double T = 10.0 * relaxation_time(s, p);
        double x0 = variances(p, s, 0.0).x_var;
        CHECK(std::abs(corr_tr(p, s, T, T)) / x0 < 0.01);
        CHECK(std::abs(corr_tr(p, s, T, T)) < std::abs(corr_tr(p, s, 1.0, 1.0)));
    }
}

TEST_CASE("small coupling: only the total approaches the free correlator") {
    ModelParams p = kRef;
    p.sigma = 1e-3;
    SpectralData s = find_roots(p);
    CorrelatorPoint c = corr_full(p, s, 4.0, 1.0);
    cplx free = 0.5 * std::exp(-I * 3.0);
    CHECK(rel(c.total, free) < 5.0 * p.sigma * p.sigma);
    CHECK(std::abs(corr_full(p, s, 0.0, 0.0).total - 0.5) < 1e-8);
}

TEST_CASE("transient kernel G") {
    SpectralData s = find_roots(kRef);
    const double er = kRef.eta_r, e0 = kRef.eta_0;
    cplx c(er, -e0);

    // symmetric under exchanging eta_j with conj(eta_k)
    SpectralData sw = s;
    sw.roots[1] = std::conj(s.roots[2]);
    sw.roots[2] = std::conj(s.roots[1]);
    CHECK(std::abs(transient_G(s, 1, 2, c, 0.8) - transient_G(sw, 1, 2, c, 0.8)) < 1e-13);

    // integral representation: int_0^inf e^{-i w a} w dw / ((w + c)(w - conj eta_k)(w - eta_j))
    const double alpha = 1.0, W = 4000.0;
    cplx ek = std::conj(s.roots[0]), ej = s.roots[0];
    auto f = [&](double w) { return std::exp(-I * w * alpha) * w / ((w + c) * (w - ek) * (w - ej)); };
    cplx tail = std::exp(-I * alpha * W) / (I * alpha * W * W);
    cplx direct = chunked(f, W, 2.0 * pi / alpha) + tail;
    CHECK(std::abs(transient_G(s, 0, 0, c, alpha) - direct) < 1e-8);

    // decays at least like 1/alpha; the i/z leading terms of g cancel
    // within each summand, leaving 1/alpha^2
    double a1 = std::abs(transient_G(s, 0, 3, c, 200.0)) * 200.0;
    double a2 = std::abs(transient_G(s, 0, 3, c, 400.0)) * 400.0;
    CHECK(a2 < a1);
    CHECK(std::abs(a1 / (2.0 * a2) - 1.0) < 0.05);

    CHECK_THROWS_AS(transient_G(s, 0, 4, c, 1.0), DomainError);
    CHECK_THROWS_AS(transient_G(s, 0, 0, c, -1.0), DomainError);
}

TEST_CASE("transient kernel F") {
    SpectralData s = find_roots(kRef);
    for (int k = 0; k < 4; ++k)
        for (int j = 0; j < 4; ++j) {
            cplx f = transient_F(s, kRef, k, j, 1.7);
            cplx flipped = transient_F(s, kRef.eta_r, -kRef.eta_0, k, j, 1.7);
            CHECK(std::abs(f + flipped) < 1e-14 * std::max(1.0, std::abs(f)));
            // finite at 0+ and continuous into the limit value
            cplx f0 = transient_F(s, kRef, k, j, 0.0);
            CHECK(std::isfinite(std::abs(f0)));
            CHECK(std::abs(transient_F(s, kRef, k, j, 1e-7) - f0) < 1e-5);
        }
    CHECK(std::abs(transient_F(s, kRef, 0, 1, 1e3)) < 1e-2 * std::abs(transient_F(s, kRef, 0, 1, 1.0)));
}

TEST_CASE("domain checks") {
    SpectralData s = find_roots(kRef);
    CHECK_THROWS_AS(corr_tr(kRef, s, -1.0, 0.0), DomainError);
    CHECK_THROWS_AS(corr_full(kRef, s, 0.0, NAN), DomainError);
    ModelParams bad = kRef;
    bad.sigma = 0.0;
    CHECK_THROWS_AS(corr_qp(bad, s, 0.0), ParameterError);
}

TEST_CASE("zero-residue root at eta_r = 0 is handled") {
    ModelParams p{1.0, 1.0, 1.0, 1.0, 0.0, 0.5};
    SpectralData s = find_roots(p);
    Variances v = variances(p, s, 2.0);
    CHECK(std::isfinite(v.x_var));
    CHECK(v.x_var * v.p_var >= 0.25);
    CHECK(std::abs(corr_full(p, s, 0.0, 0.0).total - 0.5) < 1e-8);
}
