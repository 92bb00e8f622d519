/* C interface to the perturbed lattice walk library.
 *
 * Every fallible call returns a status code (PWL_OK on success) and stores a
 * message retrievable with pwl_last_error_message() on the calling thread.
 * Objects are opaque handles released with the matching *_free function.
 * Strings returned through char** are released with pwl_string_free.
 * Output paths of NULL or "-" write to standard output. */
#ifndef PWL_PWL_H
#define PWL_PWL_H

#include <stddef.h>
#include <stdint.h>

#if defined(PWL_BUILDING)
#define PWL_API __attribute__((visibility("default")))
#else
#define PWL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

enum pwl_status {
  PWL_OK = 0,
  PWL_NOT_A_PROBABILITY = 1,
  PWL_NOT_SYMMETRIC = 2,
  PWL_NOT_ANTISYMMETRIC = 3,
  PWL_REDUCIBLE = 4,
  PWL_DIMENSION_MISMATCH = 5,
  PWL_DEGENERATE_COVARIANCE = 6,
  PWL_BOX_TOO_SMALL = 7,
  PWL_WRONG_PARITY = 8,
  PWL_CAP_EXCEEDED = 9,
  PWL_GRID_TOO_SMALL = 10,
  PWL_SINGULAR_COVARIANCE = 11,
  PWL_QUADRATURE_NOT_CONVERGED = 12,
  PWL_UNSUPPORTED_DIMENSION = 13,
  PWL_PERIODIC = 14,
  PWL_INVALID_ARGUMENT = 15,
  PWL_IO = 16,
  PWL_PARSE = 17,
  PWL_SCALE_GUARD = 18,
  PWL_INTERNAL = 19
};

enum pwl_field_kind {
  PWL_FIELD_FREE = 0,
  PWL_FIELD_PERTURBED = 1,
  PWL_FIELD_TABOO = 2,
  PWL_FIELD_RHO = 3,
  PWL_FIELD_PI_ANTISYMMETRIC = 4,
  PWL_FIELD_PI_SYMMETRIC = 5
};

enum pwl_format { PWL_FORMAT_CSV = 0, PWL_FORMAT_JSON = 1 };

typedef struct pwl_spec pwl_spec;
typedef struct pwl_field pwl_field;
typedef struct pwl_profile pwl_profile;
typedef struct pwl_empirical pwl_empirical;
typedef struct pwl_report pwl_report;

typedef struct pwl_quadrature {
  double abs_tol;
  double rel_tol;
  int max_subdivisions;
} pwl_quadrature;

/* Per-check callback of pwl_verify. */
typedef void (*pwl_check_callback)(const char* name, int passed, double measured, double tolerance,
                                   const char* detail, double seconds, void* user);

PWL_API const char* pwl_last_error_message(void);
PWL_API const char* pwl_error_name(int status);
PWL_API void pwl_string_free(char* s);

/* Kernel specs: parsed from JSON and validated. */
PWL_API int pwl_spec_load(const char* path, pwl_spec** out);
PWL_API int pwl_spec_parse(const char* json, pwl_spec** out);
PWL_API void pwl_spec_free(pwl_spec* spec);
PWL_API int pwl_spec_dim(const pwl_spec* spec);
PWL_API int pwl_spec_is_periodic(const pwl_spec* spec);
/* covariance: ν×ν row-major, drift: ν entries. */
PWL_API int pwl_spec_moments(const pwl_spec* spec, double* covariance, double* drift);
PWL_API int pwl_spec_summary_json(const pwl_spec* spec, char** out);

/* Exact fields on the box [−R, R]^ν; radius ≤ 0 selects the exact radius. */
PWL_API int pwl_field_compute(const pwl_spec* spec, int kind, int n, int radius, pwl_field** out);
PWL_API int pwl_field_radius(const pwl_field* field);
PWL_API size_t pwl_field_size(const pwl_field* field);
PWL_API int pwl_field_value(const pwl_field* field, const int* x, double* out);
PWL_API int pwl_field_copy(const pwl_field* field, double* buffer, size_t length);
PWL_API int pwl_field_write_csv(const pwl_field* field, const pwl_spec* spec, const char* path);
PWL_API void pwl_field_free(pwl_field* field);

/* Correction profiles over [x_lo, x_hi]^ν. cfg may be NULL for defaults. */
PWL_API pwl_quadrature pwl_quadrature_default(void);
PWL_API int pwl_profile_compute(const pwl_spec* spec, int n, int x_lo, int x_hi, const pwl_quadrature* cfg,
                                int radius, pwl_profile** out);
PWL_API size_t pwl_profile_rows(const pwl_profile* profile);
/* values: exact_total, gaussian, exact_correction, delta_sum, delta_quadrature, delta_closed, psi_residual. */
PWL_API int pwl_profile_row(const pwl_profile* profile, size_t row, int* x, double* values);
PWL_API int pwl_profile_write(const pwl_profile* profile, const pwl_spec* spec, const char* path, int format);
PWL_API void pwl_profile_free(pwl_profile* profile);

/* Convergence ladder: one block of profile rows per n, with scaled_error = n^{ν/2}|psi_residual|. */
PWL_API int pwl_sweep_write(const pwl_spec* spec, const int* ladder, size_t count, int x_lo, int x_hi,
                            const pwl_quadrature* cfg, const char* path, int format);

/* Monte Carlo. */
PWL_API int pwl_sample(const pwl_spec* spec, int n, uint64_t samples, uint64_t seed, pwl_empirical** out);
PWL_API int pwl_sample_estimate(const pwl_empirical* field, const int* x, double* out);
PWL_API int pwl_sample_drift(const pwl_empirical* field, double* out);
PWL_API int pwl_sample_write_csv(const pwl_empirical* field, const pwl_spec* spec, const char* path);
PWL_API void pwl_sample_free(pwl_empirical* field);

/* Point evaluators; x has ν entries. */
PWL_API int pwl_gaussian_term(const pwl_spec* spec, int n, const double* x, double* out);
PWL_API int pwl_delta_sum(const pwl_spec* spec, int n, const double* x, double* out);
PWL_API int pwl_delta_quadrature(const pwl_spec* spec, int n, const double* x, const pwl_quadrature* cfg,
                                 double* out);
PWL_API int pwl_delta_closed(const pwl_spec* spec, int n, const double* x, double* out);
PWL_API int pwl_erf_sigma(double sigma, double x, double* out);
PWL_API double pwl_scale_guard(int n);

/* Numeric checks. */
PWL_API int pwl_convolution_identity(const pwl_spec* spec, int n, double* deviation);
PWL_API int pwl_fourier_check(const pwl_spec* spec, int n, int grid, double* deviation, double* gamma);
PWL_API int pwl_psi_tail(const pwl_spec* spec, int n, int power, double x_min, double* fitted_constant);
PWL_API int pwl_appendix_scaled(int l, double a, int dim, int n, double* scaled, double* series_limit);

/* Acceptance suite. */
PWL_API int pwl_verify(int quick, pwl_check_callback callback, void* user, pwl_report** out);
PWL_API int pwl_report_passed(const pwl_report* report);
PWL_API int pwl_report_json(const pwl_report* report, char** out);
PWL_API void pwl_report_free(pwl_report* report);

#ifdef __cplusplus
}
#endif

#endif /* PWL_PWL_H */
