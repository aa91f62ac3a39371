#ifndef LEVYMULT_H
#define LEVYMULT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Parsed run configuration.
 */
typedef struct LmConfig LmConfig;

/**
 * Complex samples on a spatial grid.
 */
typedef struct LmField LmField;

/**
 * Symbol values on a frequency grid.
 */
typedef struct LmSymbolGrid LmSymbolGrid;

/**
 * Status codes. Library errors keep the numbering of `Error::code`.
 */
typedef int32_t LmStatus;

#define LM_OK 0

#define LM_ERR_ATOM_AT_ORIGIN 1

#define LM_ERR_NON_INTEGRABLE_MEASURE 2

#define LM_ERR_SHAPE_MISMATCH 3

#define LM_ERR_MODULATOR_EXCEEDS_ONE 4

#define LM_ERR_QUADRATURE_NOT_CONVERGED 5

#define LM_ERR_MODULATOR_UNDEFINED 6

#define LM_ERR_EPS_TOO_LARGE 7

#define LM_ERR_REQUIRES_FINITE_MEASURE 8

#define LM_ERR_REQUIRES_EQUAL_MATRICES 9

#define LM_ERR_DEGENERATE_DENOMINATOR 10

#define LM_ERR_K_NORM_EXCEEDS_ONE 11

#define LM_ERR_ZERO_FREQUENCY_VECTOR 12

#define LM_ERR_ALPHA_OUT_OF_RANGE 13

#define LM_ERR_ZERO_COORDINATE 14

#define LM_ERR_GRID_MISMATCH 15

#define LM_ERR_PAIRING_MISMATCH 16

#define LM_ERR_TRACE_MISMATCH 17

#define LM_ERR_QUADRATURE_NODES_INSUFFICIENT 18

#define LM_ERR_STEP_TOO_COARSE 19

#define LM_ERR_UNSUPPORTED_DIMENSION 20

#define LM_ERR_INVALID_ARGUMENT 21

#define LM_ERR_PARSE 22

#define LM_ERR_VALIDATION 23

#define LM_ERR_FORMAT 24

#define LM_ERR_IO 25

#define LM_ERR_CSV 26

#define LM_ERR_NULL 100

#define LM_ERR_UTF8 101

#define LM_ERR_PANIC 102

#define LM_ERR_BUFFER 103

#define LM_ERR_COMMAND 104

/**
 * Message of the last failure on this thread, or NULL. Owned by the library.
 */
const char *lm_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *lm_version(void);

/**
 * Parses a TOML configuration.
 */
LmStatus lm_config_parse(const char *text, struct LmConfig **out);

/**
 * Overrides the seed of a parsed configuration.
 */
LmStatus lm_config_set_seed(struct LmConfig *cfg, uint64_t seed);

/**
 * Overrides the output directory of a parsed configuration.
 */
LmStatus lm_config_set_out(struct LmConfig *cfg, const char *dir);

void lm_config_free(struct LmConfig *cfg);

/**
 * Runs a CLI command ("symbol", "apply", "pair", "probe", "mc",
 * "gaussian-mc", "selftest"). `passed` receives whether every check passed.
 */
LmStatus lm_run_command(const struct LmConfig *cfg, const char *command, bool *passed);

/**
 * Tabulates the configured symbol on the configured grid.
 */
LmStatus lm_symbol_evaluate(const struct LmConfig *cfg, struct LmSymbolGrid **out);

/**
 * Number of grid points.
 */
size_t lm_symbol_len(const struct LmSymbolGrid *m);

LmStatus lm_symbol_max_abs(const struct LmSymbolGrid *m, double *out);

/**
 * Copies the values, row-major in centered frequency order, into `re` and
 * `im`, each of length `len` = lm_symbol_len.
 */
LmStatus lm_symbol_values(const struct LmSymbolGrid *m, double *re, double *im, size_t len);

void lm_symbol_free(struct LmSymbolGrid *m);

/**
 * Closed-form stable symbol m(ξ) for 0 < α < 2.
 */
LmStatus lm_symbol_stable(double alpha, double xi, double *re, double *im);

/**
 * Field from `d` axes of lengths and point counts and row-major samples.
 */
LmStatus lm_field_new(size_t d,
                      const double *lengths,
                      const size_t *points,
                      const double *re,
                      const double *im,
                      struct LmField **out);

size_t lm_field_len(const struct LmField *f);

LmStatus lm_field_values(const struct LmField *f, double *re, double *im, size_t len);

void lm_field_free(struct LmField *f);

/**
 * Mf for a tabulated symbol and a field on the same grid.
 */
LmStatus lm_apply(const struct LmSymbolGrid *m, const struct LmField *f, struct LmField **out);

/**
 * ∫ (Mf) g dx evaluated in space and in frequency; `out` receives
 * [re_spatial, im_spatial, re_spectral, im_spectral].
 */
LmStatus lm_pairing(const struct LmSymbolGrid *m,
                    const struct LmField *f,
                    const struct LmField *g,
                    double *out);

#endif  /* LEVYMULT_H */
