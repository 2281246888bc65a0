/* SPDX-License-Identifier: Apache-2.0 */

/*
 * C interface to the Fuzzy-PI hardware model (libtsfpi).
 *
 * Objects are opaque handles created by *_create / *_load / *_default and
 * released by the matching *_free. Every fallible call returns a
 * tsfpi_status; on failure tsfpi_last_error() describes the problem for the
 * calling thread until its next failing call.
 *
 * Handles are not internally synchronized: use one handle per thread or
 * lock around shared ones. Distinct handles are independent.
 */

#ifndef TSFPI_TSFPI_H
#define TSFPI_TSFPI_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(TSFPI_BUILDING)
#define TSFPI_API __declspec(dllexport)
#else
#define TSFPI_API __declspec(dllimport)
#endif
#else
#define TSFPI_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tsfpi_status {
  TSFPI_OK = 0,
  TSFPI_ERR_INVALID_ARGUMENT = 1,
  TSFPI_ERR_CONFIG = 2,
  TSFPI_ERR_DIVERGENCE = 3,
  TSFPI_ERR_IO = 4,
  TSFPI_ERR_INTERNAL = 5
} tsfpi_status;

typedef enum tsfpi_mode { TSFPI_MODE_ONESHOT = 0, TSFPI_MODE_PIPELINE = 1 } tsfpi_mode;

typedef enum tsfpi_variant { TSFPI_VARIANT_OS = 0, TSFPI_VARIANT_P = 1 } tsfpi_variant;

/* Status bits reported next to inference and controller outputs. */
#define TSFPI_FLAG_ZERO_DENOMINATOR 0x1u
#define TSFPI_FLAG_INPUT_SATURATED 0x2u

typedef struct tsfpi_config tsfpi_config;
typedef struct tsfpi_fim tsfpi_fim;
typedef struct tsfpi_controller tsfpi_controller;

TSFPI_API const char* tsfpi_version(void);
TSFPI_API const char* tsfpi_status_string(tsfpi_status status);
TSFPI_API const char* tsfpi_last_error(void);

/* ---- configuration ---------------------------------------------------- */

TSFPI_API tsfpi_status tsfpi_config_default(tsfpi_config** out);
TSFPI_API tsfpi_status tsfpi_config_load(const char* path, tsfpi_config** out);
TSFPI_API void tsfpi_config_free(tsfpi_config* cfg);

TSFPI_API tsfpi_status tsfpi_config_set_bits(tsfpi_config* cfg, int n_bits, int t_bits);
TSFPI_API tsfpi_status tsfpi_config_set_gains(tsfpi_config* cfg, double kp, double ki);
TSFPI_API tsfpi_status tsfpi_config_set_sample_time(tsfpi_config* cfg, double ts);
TSFPI_API tsfpi_status tsfpi_config_set_limits(tsfpi_config* cfg, double v_min, double v_max);
TSFPI_API tsfpi_status tsfpi_config_set_mode(tsfpi_config* cfg, tsfpi_mode mode);
TSFPI_API tsfpi_status tsfpi_config_set_log_every(tsfpi_config* cfg, int log_every);
/* Replaces the N list used by tsfpi_run_robot. */
TSFPI_API tsfpi_status tsfpi_config_set_robot_bits(tsfpi_config* cfg, const int* n_bits,
                                                   size_t count);

/*
 * Writes the effective configuration as JSON. If buf is NULL or too small
 * nothing is written and *needed receives the required size (including the
 * terminating NUL); TSFPI_ERR_INVALID_ARGUMENT is returned in the latter case.
 */
TSFPI_API tsfpi_status tsfpi_config_to_json(const tsfpi_config* cfg, char* buf, size_t cap,
                                            size_t* needed);

/* ---- inference engine ------------------------------------------------- */

/* Built from the config's bank, rules, N and T. */
TSFPI_API tsfpi_status tsfpi_fim_create(const tsfpi_config* cfg, tsfpi_fim** out);
TSFPI_API void tsfpi_fim_free(tsfpi_fim* fim);

/* Quantizes x0, x1 into sV.N, runs the one-shot datapath. */
TSFPI_API tsfpi_status tsfpi_fim_eval(const tsfpi_fim* fim, double x0, double x1, double* v_d,
                                      unsigned* flags);
/* Same with raw sV.N codes in and out. */
TSFPI_API tsfpi_status tsfpi_fim_eval_raw(const tsfpi_fim* fim, int64_t x0_raw, int64_t x1_raw,
                                          int64_t* v_d_raw, unsigned* flags);
/* Double-precision reference at the unquantized inputs. */
TSFPI_API tsfpi_status tsfpi_fim_eval_reference(const tsfpi_fim* fim, double x0, double x1,
                                                double* v_d);
/* One clock of the handle's pipeline; v_d belongs to the input four calls ago. */
TSFPI_API tsfpi_status tsfpi_fim_pipeline_step(tsfpi_fim* fim, double x0, double x1, double* v_d,
                                               unsigned* flags);
TSFPI_API tsfpi_status tsfpi_fim_pipeline_reset(tsfpi_fim* fim);

/* ---- controller ------------------------------------------------------- */

typedef struct tsfpi_step_record {
  double y;
  double y_sp;
  double e;
  double e_d;
  double x0;
  double x1;
  double v_d;
  double r;
  unsigned flags;
} tsfpi_step_record;

TSFPI_API tsfpi_status tsfpi_controller_create(const tsfpi_config* cfg, tsfpi_controller** out);
TSFPI_API void tsfpi_controller_free(tsfpi_controller* ctl);
TSFPI_API tsfpi_status tsfpi_controller_step(tsfpi_controller* ctl, double y, double y_sp,
                                             double* r);
/* rec may be NULL. */
TSFPI_API tsfpi_status tsfpi_controller_step_record(tsfpi_controller* ctl, double y, double y_sp,
                                                    tsfpi_step_record* rec);
TSFPI_API tsfpi_status tsfpi_controller_reset(tsfpi_controller* ctl);

/* ---- experiments ------------------------------------------------------ */

typedef struct tsfpi_surface_summary {
  size_t rows;
  double max_abs_fixed;
  int zero_denominators;
} tsfpi_surface_summary;

typedef struct tsfpi_mse_row {
  int n_bits;
  int t_bits;
  int grid_points;
  double mse;
  double max_abs_err;
} tsfpi_mse_row;

typedef struct tsfpi_robot_run {
  int n_bits; /* 0 for the float64 reference */
  int settled; /* every joint settled in every segment */
  double worst_final_error_deg;
  double max_diff_deg; /* vs the reference, after transients */
} tsfpi_robot_run;

/* summary may be NULL. */
TSFPI_API tsfpi_status tsfpi_run_surface(const tsfpi_config* cfg, const char* out_dir,
                                         tsfpi_surface_summary* summary);
/*
 * Up to cap rows are copied into rows (may be NULL when cap == 0); *count
 * receives the total number produced.
 */
TSFPI_API tsfpi_status tsfpi_run_mse_sweep(const tsfpi_config* cfg, const char* out_dir,
                                           tsfpi_mse_row* rows, size_t cap, size_t* count);
/* runs[0] is the reference run, then one entry per configured N. */
TSFPI_API tsfpi_status tsfpi_run_robot(const tsfpi_config* cfg, const char* out_dir,
                                       int step_log, tsfpi_robot_run* runs, size_t cap,
                                       size_t* count);

/* ---- cost model ------------------------------------------------------- */

typedef struct tsfpi_cost_estimate {
  double nlut;
  double rs_msps;
  double mflips;
  int extrapolated; /* N or T outside the fitted range */
} tsfpi_cost_estimate;

TSFPI_API tsfpi_status tsfpi_costmodel_estimate(tsfpi_variant variant, double n_bits,
                                                double t_bits, tsfpi_cost_estimate* out);
TSFPI_API tsfpi_status tsfpi_dynamic_power_saving(double n_ref_gates, double f_ref_mhz,
                                                  double n_work_gates, double f_work_mhz,
                                                  double* out);

#ifdef __cplusplus
}
#endif

#endif /* TSFPI_TSFPI_H */
