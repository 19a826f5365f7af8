#include "qbm/qbm.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <iterator>
#include <new>
#include <string>
#include <vector>

#include "qbm/bath.hpp"
#include "qbm/config.hpp"
#include "qbm/errors.hpp"
#include "qbm/observables.hpp"
#include "qbm/oracle.hpp"
#include "qbm/validation.hpp"

struct qbm_config {
    qbm::Config cfg;
};
struct qbm_spectral {
    qbm::SpectralData data;
};
struct qbm_trace {
    std::vector<std::string> names;
    std::vector<std::vector<double>> cols;
};
struct qbm_bath {
    qbm::BathState state;
};
struct qbm_report {
    qbm::ValidationReport report;
};

namespace {

thread_local std::string g_last_error;

struct ArgumentError : std::exception {
    std::string msg;
    explicit ArgumentError(std::string m) : msg(std::move(m)) {}
    const char* what() const noexcept override { return msg.c_str(); }
};

template <class F>
qbm_status guard(F&& f) noexcept {
    try {
        f();
        g_last_error.clear();
        return QBM_OK;
    } catch (const qbm::Error& e) {
        g_last_error = e.what();
        return static_cast<qbm_status>(static_cast<int>(e.code()));
    } catch (const ArgumentError& e) {
        g_last_error = e.what();
        return QBM_E_ARGUMENT;
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return QBM_E_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return QBM_E_INTERNAL;
    } catch (...) {
        g_last_error = "unknown exception";
        return QBM_E_INTERNAL;
    }
}

void need(const void* ptr, const char* what) {
    if (!ptr) throw ArgumentError(std::string("null argument: ") + what);
}

qbm::ModelParams to_model(const qbm_params* p) {
    need(p, "params");
    qbm::ModelParams m{p->omega0, p->mass_m, p->mu, p->sigma, p->eta_r, p->eta_0};
    m.validate();
    return m;
}

qbm_params from_model(const qbm::ModelParams& m) { return {m.omega0, m.mass_m, m.mu, m.sigma, m.eta_r, m.eta_0}; }

int check_index(int j) {
    if (j < 0 || j > 3) throw ArgumentError("root index must be 0..3");
    return j;
}

qbm_trace* new_trace(std::vector<std::string> names, std::vector<std::vector<double>> cols) {
    auto* t = new qbm_trace;
    t->names = std::move(names);
    t->cols = std::move(cols);
    return t;
}

}  // namespace

extern "C" {

const char* qbm_version(void) { return "1.0.0"; }
const char* qbm_last_error(void) { return g_last_error.c_str(); }

const char* qbm_status_name(qbm_status s) {
    switch (s) {
        case QBM_OK: return "ok";
        case QBM_E_ARGUMENT: return "argument";
        case QBM_E_IO: return "io";
        default: return qbm::error_code_name(static_cast<qbm::ErrorCode>(static_cast<int>(s)));
    }
}

qbm_params qbm_params_default(void) { return from_model(qbm::ModelParams{}); }

qbm_status qbm_params_validate(const qbm_params* p) {
    return guard([&] { to_model(p); });
}

qbm_status qbm_config_load(const char* path, qbm_config** out) {
    return guard([&] {
        need(path, "path");
        need(out, "out");
        *out = new qbm_config{qbm::Config::load(path)};
    });
}

qbm_status qbm_config_parse(const char* text, const char* source, qbm_config** out) {
    return guard([&] {
        need(text, "text");
        need(out, "out");
        *out = new qbm_config{qbm::Config::parse(text, source ? source : "<config>")};
    });
}

void qbm_config_free(qbm_config* c) { delete c; }

int qbm_config_has(const qbm_config* c, const char* key) { return (c && key && c->cfg.has(key)) ? 1 : 0; }

qbm_status qbm_config_set(qbm_config* c, const char* key, const char* value) {
    return guard([&] {
        need(c, "config");
        need(key, "key");
        need(value, "value");
        c->cfg.set(key, value);
    });
}

qbm_status qbm_config_get_double(const qbm_config* c, const char* key, double fallback, double* out) {
    return guard([&] {
        need(c, "config");
        need(key, "key");
        need(out, "out");
        *out = c->cfg.get_double(key, fallback);
    });
}

qbm_status qbm_config_get_int(const qbm_config* c, const char* key, long fallback, long* out) {
    return guard([&] {
        need(c, "config");
        need(key, "key");
        need(out, "out");
        *out = c->cfg.get_int(key, fallback);
    });
}

qbm_status qbm_config_get_string(const qbm_config* c, const char* key, const char* fallback, char* buf, size_t cap,
                                 size_t* needed) {
    return guard([&] {
        need(c, "config");
        need(key, "key");
        std::string v = c->cfg.get_string(key, fallback ? fallback : "");
        if (needed) *needed = v.size();
        if (buf) {
            if (cap <= v.size()) throw ArgumentError("buffer too small");
            std::memcpy(buf, v.c_str(), v.size() + 1);
        }
    });
}

size_t qbm_config_entry_count(const qbm_config* c) { return c ? c->cfg.entries().size() : 0; }

qbm_status qbm_config_entry(const qbm_config* c, size_t i, const char** key, const char** value) {
    return guard([&] {
        need(c, "config");
        if (i >= c->cfg.entries().size()) throw ArgumentError("entry index out of range");
        auto it = c->cfg.entries().begin();
        std::advance(it, static_cast<long>(i));
        if (key) *key = it->first.c_str();
        if (value) *value = it->second.c_str();
    });
}

qbm_status qbm_config_params(const qbm_config* c, qbm_params* out) {
    return guard([&] {
        need(c, "config");
        need(out, "out");
        *out = from_model(qbm::model_from_config(c->cfg));
    });
}

qbm_status qbm_config_run_count(const qbm_config* c, size_t* n) {
    return guard([&] {
        need(c, "config");
        need(n, "n");
        *n = qbm::model_runs(c->cfg).size();
    });
}

qbm_status qbm_config_run(const qbm_config* c, size_t i, qbm_params* out, char* label, size_t label_cap) {
    return guard([&] {
        need(c, "config");
        need(out, "out");
        auto runs = qbm::model_runs(c->cfg);
        if (i >= runs.size()) throw ArgumentError("run index out of range");
        *out = from_model(runs[i].params);
        if (label) {
            if (label_cap <= runs[i].label.size()) throw ArgumentError("label buffer too small");
            std::memcpy(label, runs[i].label.c_str(), runs[i].label.size() + 1);
        }
    });
}

qbm_status qbm_spectral_compute(const qbm_params* p, qbm_spectral** out) {
    return guard([&] {
        need(out, "out");
        *out = new qbm_spectral{qbm::find_roots(to_model(p))};
    });
}

void qbm_spectral_free(qbm_spectral* s) { delete s; }

qbm_status qbm_spectral_root(const qbm_spectral* s, int j, double* re, double* im) {
    return guard([&] {
        need(s, "spectral");
        need(re, "re");
        need(im, "im");
        qbm::cplx v = s->data.roots[check_index(j)];
        *re = v.real();
        *im = v.imag();
    });
}

qbm_status qbm_spectral_residue(const qbm_spectral* s, int j, double* re, double* im) {
    return guard([&] {
        need(s, "spectral");
        need(re, "re");
        need(im, "im");
        qbm::cplx v = s->data.residues[check_index(j)];
        *re = v.real();
        *im = v.imag();
    });
}

qbm_status qbm_spectral_sum_rules(const qbm_spectral* s, double out[4]) {
    return guard([&] {
        need(s, "spectral");
        need(out, "out");
        qbm::SumRules r = qbm::sum_rules(s->data);
        out[0] = r.sum_r.real();
        out[1] = r.sum_r.imag();
        out[2] = r.sum_r_eta.real();
        out[3] = r.sum_r_eta.imag();
    });
}

qbm_status qbm_relaxation_time(const qbm_params* p, const qbm_spectral* s, double* out) {
    return guard([&] {
        need(s, "spectral");
        need(out, "out");
        *out = qbm::relaxation_time(s->data, to_model(p));
    });
}

qbm_status qbm_corr_full(const qbm_params* p, const qbm_spectral* s, double t, double t_prime, double* re,
                         double* im) {
    return guard([&] {
        need(s, "spectral");
        need(re, "re");
        need(im, "im");
        qbm::cplx v = qbm::corr_full(to_model(p), s->data, t, t_prime).total;
        *re = v.real();
        *im = v.imag();
    });
}

qbm_status qbm_corr_vv(const qbm_params* p, const qbm_spectral* s, double t, double t_prime, double* re,
                       double* im) {
    return guard([&] {
        need(s, "spectral");
        need(re, "re");
        need(im, "im");
        qbm::cplx v = qbm::corr_vv(to_model(p), s->data, t, t_prime);
        *re = v.real();
        *im = v.imag();
    });
}

qbm_status qbm_variances(const qbm_params* p, const qbm_spectral* s, double t, double out[3]) {
    return guard([&] {
        need(s, "spectral");
        need(out, "out");
        qbm::Variances v = qbm::variances(to_model(p), s->data, t);
        out[0] = v.x_var;
        out[1] = v.p_var;
        out[2] = v.xp_sym;
    });
}

qbm_status qbm_delta_E(const qbm_params* p, const qbm_spectral* s, double t, double* out) {
    return guard([&] {
        need(s, "spectral");
        need(out, "out");
        *out = qbm::delta_E(to_model(p), s->data, t);
    });
}

qbm_status qbm_delta_T(const qbm_params* p, const qbm_spectral* s, double t, double* out) {
    return guard([&] {
        need(s, "spectral");
        need(out, "out");
        *out = qbm::delta_T(to_model(p), s->data, t);
    });
}

qbm_status qbm_delta_E_asy(const qbm_params* p, const qbm_spectral* s, double* out) {
    return guard([&] {
        need(s, "spectral");
        need(out, "out");
        *out = qbm::delta_E_asy(to_model(p), s->data);
    });
}

qbm_status qbm_delta_T_asy(const qbm_params* p, const qbm_spectral* s, double* out) {
    return guard([&] {
        need(s, "spectral");
        need(out, "out");
        *out = qbm::delta_T_asy(to_model(p), s->data);
    });
}

qbm_status qbm_trace_compute(const qbm_params* p, const qbm_spectral* s, const double* times, size_t n,
                             unsigned threads, qbm_trace** out) {
    return guard([&] {
        need(s, "spectral");
        need(out, "out");
        if (n > 0) need(times, "times");
        qbm::EnergyTrace tr = qbm::energy_trace(to_model(p), s->data, std::vector<double>(times, times + n), {}, threads);
        *out = new_trace({"time", "delta_E", "delta_T", "x_var", "p_var", "uncertainty"},
                         {tr.times, tr.delta_E, tr.delta_T, tr.x_var, tr.p_var, tr.uncertainty});
    });
}

void qbm_trace_free(qbm_trace* t) { delete t; }
size_t qbm_trace_rows(const qbm_trace* t) { return (t && !t->cols.empty()) ? t->cols[0].size() : 0; }
size_t qbm_trace_column_count(const qbm_trace* t) { return t ? t->cols.size() : 0; }

const char* qbm_trace_column_name(const qbm_trace* t, size_t col) {
    return (t && col < t->names.size()) ? t->names[col].c_str() : nullptr;
}

const double* qbm_trace_column(const qbm_trace* t, size_t col) {
    return (t && col < t->cols.size()) ? t->cols[col].data() : nullptr;
}

qbm_status qbm_grid_quantity_parse(const char* name, qbm_grid_quantity* out) {
    return guard([&] {
        need(name, "name");
        need(out, "out");
        *out = static_cast<qbm_grid_quantity>(static_cast<int>(qbm::parse_grid_quantity(name)));
    });
}

const char* qbm_grid_quantity_name(qbm_grid_quantity q) {
    return qbm::grid_quantity_name(static_cast<qbm::GridQuantity>(static_cast<int>(q)));
}

qbm_status qbm_grid_axes(const qbm_config* c, size_t* n_eta0, size_t* n_etar) {
    return guard([&] {
        need(c, "config");
        need(n_eta0, "n_eta0");
        need(n_etar, "n_etar");
        qbm::SweepGrid g = qbm::grid_from_config(c->cfg);
        *n_eta0 = g.eta0_values.size();
        *n_etar = g.etar_values.size();
    });
}

qbm_status qbm_grid_evaluate(const qbm_config* c, unsigned threads, double* eta0, double* etar, double* values,
                             qbm_grid_quantity* quantity, double* sigma) {
    return guard([&] {
        need(c, "config");
        need(eta0, "eta0");
        need(etar, "etar");
        need(values, "values");
        qbm::SweepGrid g = qbm::grid_from_config(c->cfg);
        // base scales from the config; the grid fixes sigma, eta_0 and eta_r per cell
        qbm::ModelParams base;
        base.omega0 = c->cfg.get_double("omega0", base.omega0);
        base.mass_m = c->cfg.get_double("mass_m", base.mass_m);
        base.mu = c->cfg.get_double("mu", base.mu);
        std::vector<double> v = qbm::evaluate_grid(base, g, threads);
        std::copy(g.eta0_values.begin(), g.eta0_values.end(), eta0);
        std::copy(g.etar_values.begin(), g.etar_values.end(), etar);
        std::copy(v.begin(), v.end(), values);
        if (quantity) *quantity = static_cast<qbm_grid_quantity>(static_cast<int>(g.quantity));
        if (sigma) *sigma = g.sigma;
    });
}

qbm_status qbm_commutator(const qbm_params* p, double cutoff, double* re, double* im) {
    return guard([&] {
        need(re, "re");
        need(im, "im");
        qbm::QuadratureSpec q;
        q.cutoff = cutoff;
        qbm::cplx v = qbm::commutator_integral(to_model(p), q);
        *re = v.real();
        *im = v.imag();
    });
}

qbm_status qbm_quad_corr_qp(const qbm_params* p, double dt, double* re, double* im) {
    return guard([&] {
        need(re, "re");
        need(im, "im");
        qbm::cplx v = qbm::quad_corr_qp(to_model(p), dt);
        *re = v.real();
        *im = v.imag();
    });
}

qbm_status qbm_quad_corr_tr(const qbm_params* p, double t, double t_prime, double cutoff, double* re, double* im) {
    return guard([&] {
        need(re, "re");
        need(im, "im");
        qbm::QuadratureSpec q;
        q.cutoff = cutoff;
        qbm::cplx v = qbm::quad_corr_tr_general(to_model(p), t, t_prime, q);
        *re = v.real();
        *im = v.imag();
    });
}

qbm_status qbm_bath_create(const qbm_params* p, int n_modes, double nu_max, int coupled, qbm_bath** out) {
    return guard([&] {
        need(out, "out");
        *out = new qbm_bath{qbm::bath_init(to_model(p), n_modes, nu_max, coupled != 0)};
    });
}

void qbm_bath_free(qbm_bath* b) { delete b; }

double qbm_bath_recurrence_time(const qbm_bath* b) { return b ? b->state.recurrence_time() : 0.0; }

qbm_status qbm_bath_trace(const qbm_bath* b, const double* times, size_t n, double energy_tol, unsigned threads,
                          qbm_trace** out) {
    return guard([&] {
        need(b, "bath");
        need(out, "out");
        if (n > 0) need(times, "times");
        qbm::BathAudit audit;
        audit.energy_tol = energy_tol;
        qbm::BathTrace tr = qbm::bath_trace(b->state, std::vector<double>(times, times + n), audit, threads);
        *out = new_trace({"time", "delta_E", "delta_T", "x_var", "p_var", "uncertainty", "reservoir_energy",
                          "total_energy"},
                         {tr.times, tr.delta_E, tr.delta_T, tr.x_var, tr.p_var, tr.uncertainty, tr.reservoir_energy,
                          tr.total_energy});
    });
}

qbm_status qbm_validate(const qbm_params* p, qbm_level level, int corrupt_spectral, qbm_report** out) {
    return guard([&] {
        need(out, "out");
        qbm::ValidationHooks hooks;
        if (corrupt_spectral)
            hooks.corrupt_spectral = [](qbm::SpectralData& s) {
                auto big = std::max_element(s.residues.begin(), s.residues.end(),
                                            [](qbm::cplx a, qbm::cplx b) { return std::abs(a) < std::abs(b); });
                *big *= 1.001;
            };
        *out = new qbm_report{qbm::run_validation(
            to_model(p), level == QBM_LEVEL_FULL ? qbm::ValidationLevel::full : qbm::ValidationLevel::fast, hooks)};
    });
}

void qbm_report_free(qbm_report* r) { delete r; }
size_t qbm_report_count(const qbm_report* r) { return r ? r->report.checks.size() : 0; }

qbm_status qbm_report_check(const qbm_report* r, size_t i, const char** name, int* passed, double* measured,
                            double* tolerance, const char** detail) {
    return guard([&] {
        need(r, "report");
        if (i >= r->report.checks.size()) throw ArgumentError("check index out of range");
        const qbm::CheckResult& c = r->report.checks[i];
        if (name) *name = c.name.c_str();
        if (passed) *passed = c.passed ? 1 : 0;
        if (measured) *measured = c.measured;
        if (tolerance) *tolerance = c.tolerance;
        if (detail) *detail = c.detail.c_str();
    });
}

int qbm_report_all_passed(const qbm_report* r) { return (r && r->report.all_passed()) ? 1 : 0; }

}  // extern "C"
