#ifndef HIDDENFLOW_H
#define HIDDENFLOW_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum HfStatus {
  HF_STATUS_OK = 0,
  HF_STATUS_NULL_ARGUMENT = 1,
  HF_STATUS_INVALID_UTF8 = 2,
  HF_STATUS_INVALID_ARGUMENT = 3,
  HF_STATUS_CATALOG = 4,
  HF_STATUS_PACKAGE = 5,
  HF_STATUS_INTERNAL = 6,
} HfStatus;

typedef enum HfCase {
  HF_CASE_CONVERGENCE = 0,
  HF_CASE_DIVERGENCE = 1,
  HF_CASE_ABSENCE = 2,
} HfCase;

typedef enum HfSeverity {
  HF_SEVERITY_LOW = 0,
  HF_SEVERITY_MEDIUM = 1,
  HF_SEVERITY_HIGH = 2,
} HfSeverity;

/**
 * Opaque endpoint catalog.
 */
typedef struct HfCatalog HfCatalog;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *hf_version(void);

/**
 * Message for the last failed call on this thread, or NULL. The pointer is
 * valid until the next call into the library on the same thread.
 */
const char *hf_last_error(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, not yet freed.
 */
void hf_string_free(char *s);

/**
 * The built-in catalog.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum HfStatus hf_catalog_builtin(struct HfCatalog **out);

/**
 * Parse a catalog from TOML text.
 *
 * # Safety
 * `toml` must be a NUL-terminated string and `out` a valid pointer.
 */
enum HfStatus hf_catalog_from_toml(const char *toml, struct HfCatalog **out);

/**
 * # Safety
 * `catalog` must be NULL or a handle from this library, not yet freed.
 */
void hf_catalog_free(struct HfCatalog *catalog);

/**
 * Number of entries in the catalog.
 *
 * # Safety
 * `catalog` must be a live handle and `out` a valid pointer.
 */
enum HfStatus hf_catalog_len(const struct HfCatalog *catalog, size_t *out);

/**
 * Analyze the package directory or tarball at `path` and return the JSON
 * report, the same document the `scan` command prints. A package that
 * fails to load is a [`HfStatus::Package`] error.
 *
 * # Safety
 * `catalog` must be a live handle, `path` a NUL-terminated string and
 * `json_out` a valid pointer. The returned string is freed with
 * [`hf_string_free`].
 */
enum HfStatus hf_analyze_package(const struct HfCatalog *catalog,
                                 const char *path,
                                 bool count_syntactic,
                                 char **json_out);

/**
 * Conformance case for spec totals and detected endpoint counts.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum HfStatus hf_classify(uint32_t s_in,
                          uint32_t s_out,
                          uint32_t d_src,
                          uint32_t d_snk,
                          enum HfCase *out);

/**
 * Severity of a data class and sink action, both given by their report
 * names (`"input-message"`, `"other-node"`). `extrapolated` may be NULL.
 *
 * # Safety
 * Strings must be NUL-terminated; `out` must be a valid pointer.
 */
enum HfStatus hf_severity(const char *data_class,
                          const char *action,
                          enum HfSeverity *out,
                          bool *extrapolated);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HIDDENFLOW_H */
