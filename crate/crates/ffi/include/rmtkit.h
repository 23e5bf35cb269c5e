#ifndef RMTKIT_H
#define RMTKIT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define RMT_OK 0

#define RMT_ERR_NULL 1

#define RMT_ERR_INPUT 2

#define RMT_ERR_NUMERICAL 3

#define RMT_ERR_SOLVER 4

#define RMT_ERR_PARSE 5

#define RMT_ERR_IO 6

#define RMT_ERR_PANIC 7

#define RMT_ENSEMBLE_GOE 0

#define RMT_ENSEMBLE_GUE 1

#define RMT_ENSEMBLE_WISHART_REAL 2

#define RMT_ENSEMBLE_WISHART_COMPLEX 3

#define RMT_METHOD_DENSE 0

#define RMT_METHOD_TRIDIAGONAL 1

#define RMT_TW_PAINLEVE 0

#define RMT_TW_FREDHOLM 1

#define RMT_LAW_SEMICIRCLE 0

#define RMT_LAW_MP 1

// Opaque sampled spectrum, eigenvalues in descending order.
typedef struct RmtSpectrum RmtSpectrum;

// Opaque Tracy–Widom CDF table.
typedef struct RmtTwTable RmtTwTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer is
// valid until the next failing call on the same thread.
const char *rmt_last_error(void);

// Library version as a static NUL-terminated string.
const char *rmt_version(void);

// Ai(x) and Ai'(x).
//
// # Safety
// `ai` and `ai_prime` must be valid for writes.
int32_t rmt_airy(double x, double *ai, double *ai_prime);

// Tracy–Widom CDF F_β(s) for β ∈ {1, 2} with the default β=1 variant.
//
// # Safety
// `out` must be valid for a write.
int32_t rmt_tw_cdf(int32_t beta, double s, int32_t method, double *out);

// Probability that an n×n GUE (σ²=1) has no eigenvalue above `a`.
//
// # Safety
// `out` must be valid for a write.
int32_t rmt_gue_gap_probability(size_t n, double a, double *out);

// Density (`cdf == 0`) or distribution function of the semicircle or
// Marčenko–Pastur law. `gamma` is ignored for the semicircle.
//
// # Safety
// `out` must be valid for a write.
int32_t rmt_law_eval(int32_t law, double sigma2, double gamma, double x, int32_t cdf, double *out);

// Builds a TW_β table on `start:stop:step`.
//
// # Safety
// `out` must be valid for a write; the handle it receives must be released
// with `rmt_tw_table_free`.
int32_t rmt_tw_table_new(int32_t beta,
                         int32_t method,
                         double start,
                         double stop,
                         double step,
                         struct RmtTwTable **out);

// Number of grid points in a table.
//
// # Safety
// `table` must be a live handle or null.
int32_t rmt_tw_table_len(const struct RmtTwTable *table, size_t *out);

// Interpolated CDF. `clamped` is set to 1 when `s` lies outside the table.
//
// # Safety
// `table` must be a live handle; `out` and `clamped` valid for writes.
int32_t rmt_tw_table_cdf(const struct RmtTwTable *table, double s, double *out, int32_t *clamped);

// Upper-tail p-value 1 − F_β(statistic).
//
// # Safety
// `table` must be a live handle; `out` and `clamped` valid for writes.
int32_t rmt_tw_table_pvalue(const struct RmtTwTable *table,
                            double statistic,
                            double *out,
                            int32_t *clamped);

// Releases a table. Null is a no-op.
//
// # Safety
// `table` must come from `rmt_tw_table_new` and not be used afterwards.
void rmt_tw_table_free(struct RmtTwTable *table);

// Samples one spectrum. `p` is used by the Wishart ensembles only.
//
// # Safety
// `out` must be valid for a write; release the handle with
// `rmt_spectrum_free`.
int32_t rmt_sample_spectrum(int32_t ensemble,
                            size_t n,
                            size_t p,
                            double sigma2,
                            uint64_t seed,
                            int32_t method,
                            struct RmtSpectrum **out);

// Number of eigenvalues in a spectrum.
//
// # Safety
// `spectrum` must be a live handle; `out` valid for a write.
int32_t rmt_spectrum_len(const struct RmtSpectrum *spectrum, size_t *out);

// Copies the eigenvalues (descending) into `buf`, which must hold at least
// `rmt_spectrum_len` values.
//
// # Safety
// `spectrum` must be a live handle; `buf` valid for `capacity` writes.
int32_t rmt_spectrum_copy(const struct RmtSpectrum *spectrum, double *buf, size_t capacity);

// Releases a spectrum. Null is a no-op.
//
// # Safety
// `spectrum` must come from `rmt_sample_spectrum` and not be used afterwards.
void rmt_spectrum_free(struct RmtSpectrum *spectrum);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RMTKIT_H */
