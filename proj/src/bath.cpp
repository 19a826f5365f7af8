#include "qbm/bath.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "parallel.hpp"
#include "qbm/errors.hpp"
#include "qbm/types.hpp"

namespace qbm {

// Oscillator units throughout (omega0 = m = mu = 1). With q = (x, Q_k) as
// coordinates and pi = (p, -R_k) as momenta the Hamiltonian reads
//   H = pi^T Dm pi / 2 + q^T K q / 2,  Dm = diag(1, M_k nu_k^2),
//   K_00 = 1 + sum c_k^2 / M_k,  K_0k = -c_k / M_k,  K_kk = 1 / M_k,
// with mode masses M_k = w_k and couplings c_k = w_k beta_k. The scaled
// coordinates y = Dm^{-1/2} q, rho = Dm^{1/2} pi reduce it to rho^2/2 + y^T S y/2
// with S = Dm^{1/2} K Dm^{1/2} = U diag(Omega^2) U^T.
struct BathState::Impl {
    ModelParams p;
    BathGrid grid;  // physical units
    bool coupled = true;
    int n = 0;
    Eigen::VectorXd nu, M, c;  // dimensionless
    Eigen::VectorXd Dm;        // size n + 1
    Eigen::MatrixXd U;
    Eigen::VectorXd omega;
    Eigen::VectorXd u;  // row of U for x
    // initial covariances of the normal coordinates and momenta
    Eigen::MatrixXd Cy, Cr;
    // reservoir-energy forms: W_R o Cy, W_R o Cr, W_P o Cy, W_P o Cr
    Eigen::MatrixXd Eyy, Eyr, Fy, Fr;
    double vacuum_R = 0.0;
    double sigma_sq = 0.0;
    double recurrence = 0.0;  // dimensionless time
};

BathState::BathState(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
const ModelParams& BathState::params() const { return impl_->p; }
const BathGrid& BathState::grid() const { return impl_->grid; }
int BathState::n_modes() const { return impl_->n; }
bool BathState::coupled() const { return impl_->coupled; }
double BathState::recurrence_time() const { return impl_->recurrence / impl_->p.omega0; }
double BathState::discrete_sigma_sq() const { return impl_->sigma_sq; }

BathGrid bath_grid(int n_modes, double nu_max) {
    if (n_modes < 2) throw DomainError("bath_grid: n_modes must be >= 2");
    if (!(std::isfinite(nu_max) && nu_max > 0.0)) throw DomainError("bath_grid: nu_max must be finite and > 0");
    const double nu_min = nu_max / (10.0 * n_modes);
    const double h = (nu_max - nu_min) / (n_modes - 1);
    BathGrid g;
    g.nu.resize(n_modes);
    g.weight.assign(n_modes, h);
    for (int k = 0; k < n_modes; ++k) g.nu[k] = (k + 1 == n_modes) ? nu_max : nu_min + k * h;
    g.weight.front() = nu_min + 0.5 * h;
    g.weight.back() = 0.5 * h;
    return g;
}

BathState bath_init(const ModelParams& p, int n_modes, double nu_max, bool coupled) {
    p.validate();
    const double need = 3.0 * p.omega0 * std::max({1.0, p.eta_r + 5.0 * p.eta_0, p.sigma});
    if (!(nu_max >= need)) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "bath_init: nu_max = %g is below 3 omega0 max(1, eta_r + 5 eta_0, sigma) = %g",
                      nu_max, need);
        throw DomainError(buf);
    }
    auto impl = std::make_shared<BathState::Impl>();
    BathState::Impl& b = *impl;
    b.p = p;
    b.coupled = coupled;
    b.n = n_modes;
    b.grid = bath_grid(n_modes, nu_max);
    const int n = n_modes, d = n + 1;
    b.nu.resize(n);
    b.M.resize(n);
    b.c.resize(n);
    for (int k = 0; k < n; ++k) {
        double nu = b.grid.nu[k] / p.omega0, w = b.grid.weight[k] / p.omega0;
        b.nu[k] = nu;
        b.M[k] = w;
        // dimensionless beta^2 / (m mu omega0)
        b.c[k] = coupled ? w * std::sqrt(coupling_beta_sq(p, p.omega0 * nu) / (p.mass_m * p.mu * p.omega0)) : 0.0;
    }
    b.sigma_sq = (b.c.array().square() / b.M.array()).sum();
    b.vacuum_R = 0.5 * b.nu.sum();
    b.recurrence = 2.0 * pi / ((b.grid.nu[1] - b.grid.nu[0]) / p.omega0);

    b.Dm.resize(d);
    b.Dm[0] = 1.0;
    b.Dm.tail(n) = b.M.array() * b.nu.array().square();

    // S = Dm^{1/2} K Dm^{1/2}: an arrowhead matrix
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(d, d);
    S(0, 0) = 1.0 + b.sigma_sq;
    for (int k = 0; k < n; ++k) {
        double off = -b.c[k] * b.nu[k] / std::sqrt(b.M[k]);
        S(0, k + 1) = S(k + 1, 0) = off;
        S(k + 1, k + 1) = b.nu[k] * b.nu[k];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    if (es.info() != Eigen::Success) throw ConvergenceError("bath_init: eigendecomposition failed");
    if (!(es.eigenvalues().minCoeff() > 0.0)) throw ConsistencyError("bath_init: coupled system is not stable");
    b.U = es.eigenvectors();
    b.omega = es.eigenvalues().cwiseSqrt();
    b.u = b.U.row(0).transpose();

    // decoupled ground state: var x = var p = 1/2, var Q_k = M nu / 2, var R_k = 1 / (2 M nu)
    Eigen::VectorXd vy(d), vr(d);
    vy[0] = vr[0] = 0.5;
    for (int k = 0; k < n; ++k) {
        vy[k + 1] = 0.5 / b.nu[k];
        vr[k + 1] = 0.5 * b.nu[k];
    }
    b.Cy.noalias() = b.U.transpose() * vy.asDiagonal() * b.U;
    b.Cr.noalias() = b.U.transpose() * vr.asDiagonal() * b.U;

    // H_R = sum_k [(Q_k - c_k x)^2 / M_k + M_k nu_k^2 R_k^2] / 2
    //     = y^T (Dm^{1/2} K_R Dm^{1/2}) y / 2 + sum_{k>=1} rho_k^2 / 2
    Eigen::MatrixXd KR = Eigen::MatrixXd::Zero(d, d);
    KR(0, 0) = b.sigma_sq;
    for (int k = 0; k < n; ++k) {
        double s = std::sqrt(b.Dm[k + 1]);
        KR(0, k + 1) = KR(k + 1, 0) = -b.c[k] / b.M[k] * s;
        KR(k + 1, k + 1) = b.Dm[k + 1] / b.M[k];
    }
    Eigen::MatrixXd WR = b.U.transpose() * KR * b.U;
    Eigen::MatrixXd WP = -b.u * b.u.transpose();
    WP.diagonal().array() += 1.0;
    b.Eyy = WR.cwiseProduct(b.Cy);
    b.Eyr = WR.cwiseProduct(b.Cr);
    b.Fy = WP.cwiseProduct(b.Cy);
    b.Fr = WP.cwiseProduct(b.Cr);
    return BathState(std::move(impl));
}

namespace {

void check_grid(const BathState& s, const std::vector<double>& times) {
    for (std::size_t i = 0; i < times.size(); ++i) {
        double t = times[i];
        if (!(std::isfinite(t) && t >= 0.0)) throw DomainError("bath_trace: times must be finite and >= 0");
        if (i > 0 && !(t > times[i - 1])) throw DomainError("bath_trace: times must be strictly ascending");
    }
    if (!times.empty() && !(times.back() < s.recurrence_time())) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "bath_trace: t = %g reaches the recurrence time %g of the discrete reservoir",
                      times.back(), s.recurrence_time());
        throw DomainError(buf);
    }
}

}  // namespace

BathTrace bath_trace(const BathState& s, const std::vector<double>& times, const BathAudit& audit, unsigned threads) {
    check_grid(s, times);
    const BathState::Impl& b = s.impl();
    const double w0 = b.p.omega0, m = b.p.mass_m;
    const std::size_t nt = times.size();
    const Eigen::Index d = b.n + 1;
    BathTrace tr;
    tr.times = times;
    for (auto* v : {&tr.delta_E, &tr.delta_T, &tr.x_var, &tr.p_var, &tr.xp_sym, &tr.uncertainty, &tr.reservoir_energy,
                    &tr.total_energy})
        v->assign(nt, 0.0);

    // Blocks of times share each pass over the dense forms.
    constexpr std::size_t kBlock = 32;
    const std::size_t nblocks = (nt + kBlock - 1) / kBlock;
    detail::parallel_for(
        nblocks,
        [&](std::size_t blk) {
            const std::size_t i0 = blk * kBlock, cnt = std::min(kBlock, nt - i0);
            Eigen::MatrixXd C(d, cnt), Sn(d, cnt), OS(d, cnt);  // cos, sin/Omega, -Omega sin
            for (std::size_t j = 0; j < cnt; ++j) {
                double tau = w0 * times[i0 + j];
                for (Eigen::Index a = 0; a < d; ++a) {
                    double ct = std::cos(b.omega[a] * tau), st = std::sin(b.omega[a] * tau);
                    C(a, j) = ct;
                    Sn(a, j) = st / b.omega[a];
                    OS(a, j) = -b.omega[a] * st;
                }
            }
            // x(t) = sum_a u_a (cos z0_a + sin/Omega sigma0_a), v = dx/dt
            Eigen::MatrixXd xa = b.u.asDiagonal() * C, xb = b.u.asDiagonal() * Sn;
            Eigen::MatrixXd va = b.u.asDiagonal() * OS, vb = xa;
            Eigen::MatrixXd CyXa = b.Cy * xa, CrXb = b.Cr * xb, CyVa = b.Cy * va, CrVb = b.Cr * vb;
            Eigen::MatrixXd EC = b.Eyy * C, ES = b.Eyr * Sn, FO = b.Fy * OS, FC = b.Fr * C;
            for (std::size_t j = 0; j < cnt; ++j) {
                double xx = xa.col(j).dot(CyXa.col(j)) + xb.col(j).dot(CrXb.col(j));
                double vv = va.col(j).dot(CyVa.col(j)) + vb.col(j).dot(CrVb.col(j));
                double xv = xa.col(j).dot(CyVa.col(j)) + xb.col(j).dot(CrVb.col(j));
                double hr = 0.5 * (C.col(j).dot(EC.col(j)) + Sn.col(j).dot(ES.col(j)) + OS.col(j).dot(FO.col(j)) +
                                   C.col(j).dot(FC.col(j)));
                std::size_t i = i0 + j;
                double dE = 0.5 * (xx + vv) - 0.5, dT = 0.5 * vv - 0.25;
                tr.x_var[i] = xx / (m * w0);
                tr.p_var[i] = m * w0 * vv;
                tr.xp_sym[i] = xv;
                tr.uncertainty[i] = xx * vv;
                tr.delta_E[i] = w0 * dE;
                tr.delta_T[i] = w0 * dT;
                tr.reservoir_energy[i] = w0 * (hr - b.vacuum_R);
                tr.total_energy[i] = w0 * (dE + hr - b.vacuum_R);
            }
        },
        threads);

    for (std::size_t i = 0; i < nt; ++i) {
        double drift = std::abs(tr.total_energy[i] - tr.total_energy[0]);
        if (!(drift <= audit.energy_tol * w0)) {
            char buf[200];
            std::snprintf(buf, sizeof buf, "bath_trace: total energy drifted by %.3e omega0 at t = %g (tolerance %.1e)",
                          drift / w0, tr.times[i], audit.energy_tol);
            throw IntegrationError(buf);
        }
        if (!(tr.uncertainty[i] >= 0.25 - 1e-9)) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "bath_trace: uncertainty product %.12g below 1/4 at t = %g", tr.uncertainty[i],
                          tr.times[i]);
            throw IntegrationError(buf);
        }
    }
    return tr;
}

BathTrace bath_evolve(const BathState& s, double t_final, double dt_step, const BathAudit& audit, unsigned threads) {
    if (!(std::isfinite(t_final) && t_final > 0.0)) throw DomainError("bath_evolve: t_final must be finite and > 0");
    if (!(std::isfinite(dt_step) && dt_step > 0.0)) throw DomainError("bath_evolve: dt_step must be finite and > 0");
    const auto n = static_cast<std::size_t>(std::floor(t_final / dt_step + 1e-9));
    std::vector<double> times(n + 1);
    for (std::size_t i = 0; i <= n; ++i) times[i] = i * dt_step;
    if (t_final - times.back() > 1e-9 * dt_step) times.push_back(t_final);
    return bath_trace(s, times, audit, threads);
}

std::vector<double> bath_covariance(const BathState& s, double t) {
    check_grid(s, {t});
    const BathState::Impl& b = s.impl();
    const Eigen::Index d = b.n + 1;
    const double tau = b.p.omega0 * t;
    Eigen::VectorXd ct(d), so(d), os(d);
    for (Eigen::Index a = 0; a < d; ++a) {
        ct[a] = std::cos(b.omega[a] * tau);
        so[a] = std::sin(b.omega[a] * tau) / b.omega[a];
        os[a] = -b.omega[a] * std::sin(b.omega[a] * tau);
    }
    // normal coordinates z and momenta sg; the initial state has no symmetric z-sg correlation
    Eigen::MatrixXd Zzz = ct.asDiagonal() * b.Cy * ct.asDiagonal() + so.asDiagonal() * b.Cr * so.asDiagonal();
    Eigen::MatrixXd Zss = os.asDiagonal() * b.Cy * os.asDiagonal() + ct.asDiagonal() * b.Cr * ct.asDiagonal();
    Eigen::MatrixXd Zzs = ct.asDiagonal() * b.Cy * os.asDiagonal() + so.asDiagonal() * b.Cr * ct.asDiagonal();
    Eigen::VectorXd sq = b.Dm.cwiseSqrt(), isq = sq.cwiseInverse();
    Eigen::MatrixXd Qq = sq.asDiagonal() * (b.U * Zzz * b.U.transpose()) * sq.asDiagonal();
    Eigen::MatrixXd Pp = isq.asDiagonal() * (b.U * Zss * b.U.transpose()) * isq.asDiagonal();
    Eigen::MatrixXd Qp = sq.asDiagonal() * (b.U * Zzs * b.U.transpose()) * isq.asDiagonal();

    // map q = (x, Q_k), pi = (p, -R_k) onto (x, R_k | p, Q_k)
    const Eigen::Index D = 2 * d;
    auto var = [&](Eigen::Index i) -> std::pair<int, double> {
        // returns (index into [q; pi], sign)
        if (i == 0) return {0, 1.0};                              // x
        if (i < d) return {static_cast<int>(d + i), -1.0};        // R_k = -pi_k
        if (i == d) return {static_cast<int>(d), 1.0};            // p
        return {static_cast<int>(i - d), 1.0};                    // Q_k
    };
    auto block = [&](int a, int c) {
        if (a < d && c < d) return Qq(a, c);
        if (a < d) return Qp(a, c - d);
        if (c < d) return Qp(c, a - d);
        return Pp(a - d, c - d);
    };
    std::vector<double> out(static_cast<std::size_t>(D * D));
    for (Eigen::Index i = 0; i < D; ++i) {
        auto [a, sa] = var(i);
        for (Eigen::Index j = 0; j < D; ++j) {
            auto [c, sc] = var(j);
            out[static_cast<std::size_t>(i * D + j)] = sa * sc * block(a, c);
        }
    }
    return out;
}

bool bath_physical(const std::vector<double>& cov, int dim, double tol) {
    if (dim <= 0 || dim % 2 != 0 || cov.size() != static_cast<std::size_t>(dim) * dim) return false;
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> V(cov.data(), dim, dim);
    if (!V.allFinite()) return false;
    double scale = std::max(1.0, V.cwiseAbs().maxCoeff());
    if ((V - V.transpose()).cwiseAbs().maxCoeff() > tol * scale) return false;
    if (V.diagonal().minCoeff() < -tol * scale) return false;
    const int h = dim / 2;
    Eigen::MatrixXcd H = V.cast<cplx>();
    for (int i = 0; i < h; ++i) {
        H(i, h + i) += 0.5 * I;
        H(h + i, i) -= 0.5 * I;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -tol * scale;
}

}  // namespace qbm
