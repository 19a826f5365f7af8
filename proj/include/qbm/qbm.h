#ifndef QBM_QBM_H
#define QBM_QBM_H

#include <stddef.h>

#if defined(_WIN32)
#define QBM_API __declspec(dllexport)
#else
#define QBM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Every function returning qbm_status leaves a message for the
   calling thread in qbm_last_error() when it fails. */
typedef enum {
    QBM_OK = 0,
    QBM_E_DOMAIN = 1,
    QBM_E_PARAMETER = 2,
    QBM_E_CONFIG = 3,
    QBM_E_DEGENERACY = 4,
    QBM_E_CONVERGENCE = 5,
    QBM_E_CONSISTENCY = 6,
    QBM_E_INTEGRATION = 7,
    QBM_E_TOLERANCE = 8,
    QBM_E_INTERNAL = 9,
    QBM_E_ARGUMENT = 10, /* null pointer, index out of range, short buffer */
    QBM_E_IO = 11
} qbm_status;

QBM_API const char* qbm_version(void);
QBM_API const char* qbm_last_error(void);
QBM_API const char* qbm_status_name(qbm_status s);

/* Physical parameters (hbar = 1). */
typedef struct {
    double omega0;
    double mass_m;
    double mu;
    double sigma;
    double eta_r;
    double eta_0;
} qbm_params;

QBM_API qbm_params qbm_params_default(void);
QBM_API qbm_status qbm_params_validate(const qbm_params* p);

/* ---- configuration files ---- */
typedef struct qbm_config qbm_config;

QBM_API qbm_status qbm_config_load(const char* path, qbm_config** out);
QBM_API qbm_status qbm_config_parse(const char* text, const char* source, qbm_config** out);
QBM_API void qbm_config_free(qbm_config* c);
QBM_API int qbm_config_has(const qbm_config* c, const char* key);
QBM_API qbm_status qbm_config_set(qbm_config* c, const char* key, const char* value);
QBM_API qbm_status qbm_config_get_double(const qbm_config* c, const char* key, double fallback, double* out);
QBM_API qbm_status qbm_config_get_int(const qbm_config* c, const char* key, long fallback, long* out);
/* Copies the raw value (or fallback) into buf; *needed receives the length without the terminator. */
QBM_API qbm_status qbm_config_get_string(const qbm_config* c, const char* key, const char* fallback, char* buf,
                                         size_t cap, size_t* needed);
/* Number of key/value entries and their text, in key order. */
QBM_API size_t qbm_config_entry_count(const qbm_config* c);
QBM_API qbm_status qbm_config_entry(const qbm_config* c, size_t i, const char** key, const char** value);
/* Model parameters; fails if sigma, eta_r or eta_0 holds a list. */
QBM_API qbm_status qbm_config_params(const qbm_config* c, qbm_params* out);
/* Runs expanded from a single list-valued key among sigma, eta_r, eta_0. */
QBM_API qbm_status qbm_config_run_count(const qbm_config* c, size_t* n);
QBM_API qbm_status qbm_config_run(const qbm_config* c, size_t i, qbm_params* out, char* label, size_t label_cap);

/* ---- spectral data: four roots eta_j of zeta(omega0 eta) and residues of omega0^2/zeta ---- */
typedef struct qbm_spectral qbm_spectral;

QBM_API qbm_status qbm_spectral_compute(const qbm_params* p, qbm_spectral** out);
QBM_API void qbm_spectral_free(qbm_spectral* s);
QBM_API qbm_status qbm_spectral_root(const qbm_spectral* s, int j, double* re, double* im);
QBM_API qbm_status qbm_spectral_residue(const qbm_spectral* s, int j, double* re, double* im);
/* out[0..3] = Re, Im of sum R_j and of sum R_j eta_j. */
QBM_API qbm_status qbm_spectral_sum_rules(const qbm_spectral* s, double out[4]);
QBM_API qbm_status qbm_relaxation_time(const qbm_params* p, const qbm_spectral* s, double* out);

/* ---- correlators and observables ---- */
QBM_API qbm_status qbm_corr_full(const qbm_params* p, const qbm_spectral* s, double t, double t_prime, double* re,
                                 double* im);
QBM_API qbm_status qbm_corr_vv(const qbm_params* p, const qbm_spectral* s, double t, double t_prime, double* re,
                               double* im);
/* out[0..2] = x_var, p_var, symmetrized xp. */
QBM_API qbm_status qbm_variances(const qbm_params* p, const qbm_spectral* s, double t, double out[3]);
QBM_API qbm_status qbm_delta_E(const qbm_params* p, const qbm_spectral* s, double t, double* out);
QBM_API qbm_status qbm_delta_T(const qbm_params* p, const qbm_spectral* s, double t, double* out);
QBM_API qbm_status qbm_delta_E_asy(const qbm_params* p, const qbm_spectral* s, double* out);
QBM_API qbm_status qbm_delta_T_asy(const qbm_params* p, const qbm_spectral* s, double* out);

/* ---- traces: named double columns of equal length ---- */
typedef struct qbm_trace qbm_trace;

/* Columns time, delta_E, delta_T, x_var, p_var, uncertainty. */
QBM_API qbm_status qbm_trace_compute(const qbm_params* p, const qbm_spectral* s, const double* times, size_t n,
                                     unsigned threads, qbm_trace** out);
QBM_API void qbm_trace_free(qbm_trace* t);
QBM_API size_t qbm_trace_rows(const qbm_trace* t);
QBM_API size_t qbm_trace_column_count(const qbm_trace* t);
QBM_API const char* qbm_trace_column_name(const qbm_trace* t, size_t col);
/* Borrowed pointer valid until qbm_trace_free. */
QBM_API const double* qbm_trace_column(const qbm_trace* t, size_t col);

/* ---- parameter surfaces ---- */
typedef enum { QBM_GRID_DELTA_E_ASY = 0, QBM_GRID_DELTA_T_ASY = 1, QBM_GRID_RELAXATION_TIME = 2 } qbm_grid_quantity;

QBM_API qbm_status qbm_grid_quantity_parse(const char* name, qbm_grid_quantity* out);
QBM_API const char* qbm_grid_quantity_name(qbm_grid_quantity q);
/* Axes from the config (eta0_values / eta0_min,max,n and etar analogues), sigma and quantity keys. */
QBM_API qbm_status qbm_grid_axes(const qbm_config* c, size_t* n_eta0, size_t* n_etar);
/* Fills eta0[n_eta0], etar[n_etar] and values[n_eta0 * n_etar] (row-major over eta0). */
QBM_API qbm_status qbm_grid_evaluate(const qbm_config* c, unsigned threads, double* eta0, double* etar,
                                     double* values, qbm_grid_quantity* quantity, double* sigma);

/* ---- quadrature oracles ---- */
QBM_API qbm_status qbm_commutator(const qbm_params* p, double cutoff, double* re, double* im);
QBM_API qbm_status qbm_quad_corr_qp(const qbm_params* p, double dt, double* re, double* im);
QBM_API qbm_status qbm_quad_corr_tr(const qbm_params* p, double t, double t_prime, double cutoff, double* re,
                                    double* im);

/* ---- discrete reservoir ---- */
typedef struct qbm_bath qbm_bath;

QBM_API qbm_status qbm_bath_create(const qbm_params* p, int n_modes, double nu_max, int coupled, qbm_bath** out);
QBM_API void qbm_bath_free(qbm_bath* b);
QBM_API double qbm_bath_recurrence_time(const qbm_bath* b);
/* Columns time, delta_E, delta_T, x_var, p_var, uncertainty, reservoir_energy, total_energy. */
QBM_API qbm_status qbm_bath_trace(const qbm_bath* b, const double* times, size_t n, double energy_tol,
                                  unsigned threads, qbm_trace** out);

/* ---- validation suite ---- */
typedef struct qbm_report qbm_report;
typedef enum { QBM_LEVEL_FAST = 0, QBM_LEVEL_FULL = 1 } qbm_level;

/* corrupt_spectral != 0 perturbs the spectral data fed to the reconstruction checks (negative control). */
QBM_API qbm_status qbm_validate(const qbm_params* p, qbm_level level, int corrupt_spectral, qbm_report** out);
QBM_API void qbm_report_free(qbm_report* r);
QBM_API size_t qbm_report_count(const qbm_report* r);
QBM_API qbm_status qbm_report_check(const qbm_report* r, size_t i, const char** name, int* passed, double* measured,
                                    double* tolerance, const char** detail);
QBM_API int qbm_report_all_passed(const qbm_report* r);

#ifdef __cplusplus
}
#endif

#endif
