/*
 * nlgb.h - C interface to the nonlinear Galton board simulator.
 *
 * Objects are opaque handles created by nlgb_*_create and released by the
 * matching nlgb_*_destroy. Every call that can fail returns an nlgb_status;
 * the message for the most recent failure on the calling thread is available
 * from nlgb_last_error(). Handles are not shared between threads by the
 * library; distinct handles may be used concurrently.
 *
 * Strings are returned through caller buffers: pass buf = NULL / cap = 0 to
 * learn the required size (including the terminating NUL) via *needed.
 */
#ifndef NLGB_H
#define NLGB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(NLGB_BUILDING)
#    define NLGB_API __declspec(dllexport)
#  else
#    define NLGB_API __declspec(dllimport)
#  endif
#else
#  define NLGB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nlgb_status {
  NLGB_OK = 0,
  NLGB_ERR_INVALID_ARGUMENT = 1,
  NLGB_ERR_NORMALIZATION = 2,
  NLGB_ERR_BOUNDS = 3,
  NLGB_ERR_NUMERIC = 4,
  NLGB_ERR_IO = 5,
  NLGB_ERR_INSUFFICIENT_DATA = 6,
  NLGB_ERR_SINGULAR_FIT = 7,
  NLGB_ERR_PARSE = 8,
  NLGB_ERR_INTERNAL = 99
} nlgb_status;

typedef enum nlgb_phase_rule {
  NLGB_RULE_NONE = 0,
  NLGB_RULE_KERR = 1,      /* F_c = 2 pi alpha |c_m|^2 */
  NLGB_RULE_LINEAR = 2,    /* F_u = F_d = m phi0 */
  NLGB_RULE_QUADRATIC = 3  /* F_u = F_d = m^2 phi0 */
} nlgb_phase_rule;

typedef enum nlgb_init_kind {
  NLGB_INIT_SYMMETRIC = 0, /* u_0 = 1/sqrt2, d_0 = i/sqrt2 */
  NLGB_INIT_UPDELTA = 1    /* u_0 = 1, d_0 = 0 */
} nlgb_init_kind;

typedef enum nlgb_dynamical_phase {
  NLGB_DYN_INDETERMINATE = 0,
  NLGB_DYN_I = 1,   /* ballistic */
  NLGB_DYN_II = 2,  /* single recollapse */
  NLGB_DYN_III = 3  /* chaotic */
} nlgb_dynamical_phase;

typedef enum nlgb_behavior {
  NLGB_BEHAVIOR_NONE = 0,
  NLGB_BEHAVIOR_OSCILLATING = 1,
  NLGB_BEHAVIOR_LOCALIZED = 2,
  NLGB_BEHAVIOR_ESCAPING = 3
} nlgb_behavior;

typedef enum nlgb_side { NLGB_SIDE_LEFT = 0, NLGB_SIDE_RIGHT = 1 } nlgb_side;

typedef struct nlgb_phase_label {
  nlgb_dynamical_phase phase;
  nlgb_behavior behavior;
  double m_eq; /* localized equilibrium position, else 0 */
} nlgb_phase_label;

typedef struct nlgb_collision {
  int64_t t_col;
  double intensity_before;
  double intensity_after;
} nlgb_collision;

typedef struct nlgb_fit_result {
  double a;
  double b;
  double r2;
  double alpha_I;
  size_t points;
} nlgb_fit_result;

typedef struct nlgb_track_sample {
  int64_t t;
  int valid;
  int64_t m_peak;
  double m_cm;
  double intensity;
} nlgb_track_sample;

/* Phase callback for custom rules: writes F_u and F_d for site m at step t. */
typedef void (*nlgb_phase_fn)(int64_t m, int64_t t, double p_u, double p_d, double* f_u, double* f_d, void* user);

typedef struct nlgb_config nlgb_config;
typedef struct nlgb_run nlgb_run;
typedef struct nlgb_sweep nlgb_sweep;

NLGB_API const char* nlgb_version(void);
NLGB_API const char* nlgb_last_error(void);
NLGB_API const char* nlgb_status_name(nlgb_status status);

/* Configuration. Defaults: no phase, Hadamard coin, symmetric init,
 * 300 steps, record every step, halfwidth 8. */
NLGB_API nlgb_status nlgb_config_create(nlgb_config** out);
NLGB_API nlgb_status nlgb_config_clone(const nlgb_config* config, nlgb_config** out);
NLGB_API void nlgb_config_destroy(nlgb_config* config);
NLGB_API nlgb_status nlgb_config_set_phase(nlgb_config* config, nlgb_phase_rule rule, double parameter);
NLGB_API nlgb_status nlgb_config_set_custom_phase(nlgb_config* config, const char* name, nlgb_phase_fn fn,
                                                  void* user);
NLGB_API nlgb_status nlgb_config_set_coin(nlgb_config* config, const double re[4], const double im[4]);
NLGB_API nlgb_status nlgb_config_set_init(nlgb_config* config, nlgb_init_kind kind);
NLGB_API nlgb_status nlgb_config_set_custom_init(nlgb_config* config, size_t n, const int64_t* m,
                                                 const double* u_re, const double* u_im, const double* d_re,
                                                 const double* d_im);
NLGB_API nlgb_status nlgb_config_load_init_file(nlgb_config* config, const char* path);
NLGB_API nlgb_status nlgb_config_set_steps(nlgb_config* config, int64_t steps);
NLGB_API nlgb_status nlgb_config_set_record_every(nlgb_config* config, int64_t record_every);
NLGB_API nlgb_status nlgb_config_set_halfwidth(nlgb_config* config, int halfwidth);
NLGB_API nlgb_status nlgb_config_get_steps(const nlgb_config* config, int64_t* steps);
NLGB_API nlgb_status nlgb_config_get_alpha(const nlgb_config* config, int* is_kerr, double* alpha);
NLGB_API nlgb_status nlgb_config_to_json(const nlgb_config* config, char* buf, size_t cap, size_t* needed);
NLGB_API nlgb_status nlgb_config_from_json(const char* json, nlgb_config** out);
NLGB_API nlgb_status nlgb_config_from_manifest(const char* path, nlgb_config** out);

/* Runs: evolution, observables and analysis happen in nlgb_run_create. */
NLGB_API nlgb_status nlgb_run_create(const nlgb_config* config, nlgb_run** out);
NLGB_API void nlgb_run_destroy(nlgb_run* run);
NLGB_API nlgb_status nlgb_run_snapshot_count(const nlgb_run* run, size_t* count);
NLGB_API nlgb_status nlgb_run_snapshot_info(const nlgb_run* run, size_t index, int64_t* t, int64_t* m_min,
                                            size_t* length);
NLGB_API nlgb_status nlgb_run_snapshot_probability(const nlgb_run* run, size_t index, double* p, size_t cap);
NLGB_API nlgb_status nlgb_run_snapshot_amplitudes(const nlgb_run* run, size_t index, double* u_re, double* u_im,
                                                  double* d_re, double* d_im, size_t cap);
NLGB_API nlgb_status nlgb_run_max_norm_defect(const nlgb_run* run, double* defect);
NLGB_API nlgb_status nlgb_run_sigma_over_t(const nlgb_run* run, int64_t t, double* value);
NLGB_API nlgb_status nlgb_run_track_length(const nlgb_run* run, size_t* length);
NLGB_API nlgb_status nlgb_run_track_sample(const nlgb_run* run, nlgb_side side, size_t index,
                                           nlgb_track_sample* sample);
NLGB_API nlgb_status nlgb_run_phase(const nlgb_run* run, nlgb_phase_label* label);
NLGB_API nlgb_status nlgb_run_collision(const nlgb_run* run, int* found, nlgb_collision* collision);
NLGB_API nlgb_status nlgb_run_report(const nlgb_run* run, char* buf, size_t cap, size_t* needed);
NLGB_API nlgb_status nlgb_run_write_artifacts(const nlgb_run* run, const char* dir);

/* Sweeps over alpha with the Kerr rule; `jobs` worker threads. */
NLGB_API nlgb_status nlgb_sweep_create(const nlgb_config* base, double alpha_from, double alpha_to,
                                       double alpha_step, int jobs, nlgb_sweep** out);
NLGB_API void nlgb_sweep_destroy(nlgb_sweep* sweep);
NLGB_API nlgb_status nlgb_sweep_size(const nlgb_sweep* sweep, size_t* size);
NLGB_API nlgb_status nlgb_sweep_entry(const nlgb_sweep* sweep, size_t index, double* alpha, int* has_t_col,
                                      int64_t* t_col, nlgb_phase_label* label);
NLGB_API nlgb_status nlgb_sweep_write_artifacts(const nlgb_sweep* sweep, const char* dir);

/* 1/t_col = a/alpha + b by least squares. */
NLGB_API nlgb_status nlgb_fit_hyperbola(size_t n, const double* alpha, const double* t_col, nlgb_fit_result* out);
NLGB_API nlgb_status nlgb_fit_sweep_index(const char* path, nlgb_fit_result* out);
NLGB_API nlgb_status nlgb_fit_report(const nlgb_fit_result* fit, char* buf, size_t cap, size_t* needed);

#ifdef __cplusplus
}
#endif

#endif /* NLGB_H */
