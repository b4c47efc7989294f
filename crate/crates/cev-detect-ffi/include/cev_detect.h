#ifndef CEV_DETECT_H
#define CEV_DETECT_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Fixed trace columns addressable through [`cevd_traces_column`].
 */
typedef enum CevdColumn {
  CevdColumn_K = 0,
  CevdColumn_Hillish = 1,
  CevdColumn_HillishNeg = 2,
  CevdColumn_Kendall = 3,
} CevdColumn;

/**
 * Reference models available to [`cevd_sample_simulate`].
 */
typedef enum CevdModel {
  /**
   * X ~ N(0,1) independent of Y ~ Pareto(1).
   */
  CevdModel_Example1 = 1,
  /**
   * X ~ Pareto(rho), Z ~ Pareto(1-rho), Y = min(X, Z).
   */
  CevdModel_Example2 = 2,
} CevdModel;

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum CevdStatus {
  CevdStatus_Ok = 0,
  CevdStatus_NullPointer = 1,
  CevdStatus_InvalidArgument = 2,
  CevdStatus_OutOfRange = 3,
  CevdStatus_BufferTooSmall = 4,
  CevdStatus_ComputationFailed = 5,
} CevdStatus;

/**
 * Detection verdict codes.
 */
typedef enum CevdVerdict {
  CevdVerdict_NotCev = 0,
  CevdVerdict_CevProduct = 1,
  CevdVerdict_CevNonproduct = 2,
  CevdVerdict_Inconclusive = 3,
} CevdVerdict;

/**
 * Opaque bivariate sample handle.
 */
typedef struct CevdSample CevdSample;

/**
 * Opaque trace-bundle handle (statistics over a k-grid).
 */
typedef struct CevdTraces CevdTraces;

/**
 * Detection thresholds; obtain defaults from
 * [`cevd_detection_config_default`] and adjust fields as needed.
 */
typedef struct CevdDetectionConfig {
  double window_lo_frac;
  double window_hi_frac;
  double window_width_frac;
  double rank_dispersion_threshold;
  double pickandsish_dispersion_threshold;
  double eps_hillish;
  double eps_pickandsish;
  double max_undefined_frac;
} CevdDetectionConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length in bytes.
 *
 * # Safety
 * `buf` must point to `len` writable bytes, or be null (query mode).
 */
size_t cevd_last_error_message(char *buf, size_t len);

/**
 * Build a sample from two arrays of length `len`.
 *
 * # Safety
 * `xs` and `ys` must point to `len` readable f64 values; `out` must be a
 * valid destination pointer.
 */
enum CevdStatus cevd_sample_new(const double *xs,
                                const double *ys,
                                size_t len,
                                struct CevdSample **out);

/**
 * Simulate a reference model (`rho` is ignored for `Example1`).
 *
 * # Safety
 * `out` must be a valid destination pointer.
 */
enum CevdStatus cevd_sample_simulate(enum CevdModel model,
                                     double rho,
                                     size_t n,
                                     uint64_t seed,
                                     struct CevdSample **out);

/**
 * Number of observations in a sample, or 0 for a null handle.
 *
 * # Safety
 * `sample` must be a live handle or null.
 */
size_t cevd_sample_len(const struct CevdSample *sample);

/**
 * Release a sample handle (null is a no-op).
 *
 * # Safety
 * `sample` must have been produced by this library and not freed before.
 */
void cevd_sample_free(struct CevdSample *sample);

/**
 * One-shot statistics at a single k: Hillish on (X,Y) and (-X,Y),
 * Kendall's tau, and Pickandsish at probe `p` (NaN when undefined).
 *
 * # Safety
 * All pointers must be valid; `sample` must be a live handle.
 */
enum CevdStatus cevd_statistics_at_k(const struct CevdSample *sample,
                                     size_t k,
                                     double p,
                                     double *out_hillish,
                                     double *out_hillish_neg,
                                     double *out_kendall,
                                     double *out_pickandsish);

/**
 * Compute all statistic traces over a k-grid with the given Pickandsish
 * probe levels.
 *
 * # Safety
 * `ks` must point to `ks_len` values, `ps` to `ps_len` values; `sample`
 * must be a live handle and `out` a valid destination pointer.
 */
enum CevdStatus cevd_traces_compute(const struct CevdSample *sample,
                                    const size_t *ks,
                                    size_t ks_len,
                                    const double *ps,
                                    size_t ps_len,
                                    struct CevdTraces **out);

/**
 * Grid length of a trace bundle, or 0 for a null handle.
 *
 * # Safety
 * `traces` must be a live handle or null.
 */
size_t cevd_traces_len(const struct CevdTraces *traces);

/**
 * Number of Pickandsish probe levels carried by the bundle.
 *
 * # Safety
 * `traces` must be a live handle or null.
 */
size_t cevd_traces_num_probes(const struct CevdTraces *traces);

/**
 * Probe level at `index` (ascending order).
 *
 * # Safety
 * `traces` must be a live handle; `out` must be valid.
 */
enum CevdStatus cevd_traces_probe(const struct CevdTraces *traces, size_t index, double *out);

/**
 * Copy one fixed column of the trace bundle into `buf`.
 *
 * # Safety
 * `buf` must hold at least `buf_len` f64 slots; `traces` must be live.
 */
enum CevdStatus cevd_traces_column(const struct CevdTraces *traces,
                                   enum CevdColumn column,
                                   double *buf,
                                   size_t buf_len);

/**
 * Copy the Pickandsish trace for probe `probe_index` into `buf`;
 * undefined entries become NaN.
 *
 * # Safety
 * `buf` must hold at least `buf_len` f64 slots; `traces` must be live.
 */
enum CevdStatus cevd_traces_pickandsish(const struct CevdTraces *traces,
                                        size_t probe_index,
                                        double *buf,
                                        size_t buf_len);

/**
 * Release a trace handle (null is a no-op).
 *
 * # Safety
 * `traces` must have been produced by this library and not freed before.
 */
void cevd_traces_free(struct CevdTraces *traces);

/**
 * Default detection thresholds.
 */
struct CevdDetectionConfig cevd_detection_config_default(void);

/**
 * Run detection on a trace bundle; `config` may be null for defaults.
 * The bundle must carry at least two Pickandsish probe levels.
 *
 * # Safety
 * `traces` must be live; `out` must be valid; `config` null or valid.
 */
enum CevdStatus cevd_product_verdict(const struct CevdTraces *traces,
                                     const struct CevdDetectionConfig *config,
                                     enum CevdVerdict *out);

/**
 * Closed-form Hillish limit constant of the example2 model.
 *
 * # Safety
 * `out` must be valid.
 */
enum CevdStatus cevd_hillish_limit_ex2(double rho, double *out);

/**
 * Closed-form Pickandsish limit constant of the example2 model.
 *
 * # Safety
 * `out` must be valid.
 */
enum CevdStatus cevd_pickandsish_limit_ex2(double rho, double p, double *out);

/**
 * Closed-form Kendall limit constant of the example2 model.
 *
 * # Safety
 * `out` must be valid.
 */
enum CevdStatus cevd_kendall_limit_ex2(double rho, double *out);

/**
 * Quadrature value of the Hillish limit constant I for a reference model
 * (`rho` is ignored for `Example1`).
 *
 * # Safety
 * `out` must be valid.
 */
enum CevdStatus cevd_numeric_i_mustar(enum CevdModel model, double rho, double tol, double *out);

/**
 * Quadrature value of the Kendall limit constant J for a reference model
 * (`rho` is ignored for `Example1`).
 *
 * # Safety
 * `out` must be valid.
 */
enum CevdStatus cevd_numeric_j_mustar(enum CevdModel model, double rho, double tol, double *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* CEV_DETECT_H */
