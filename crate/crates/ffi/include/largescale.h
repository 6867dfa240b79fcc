#ifndef LARGESCALE_H
#define LARGESCALE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes shared by every entry point.
 */
typedef enum LssStatus {
  Ok = 0,
  NullPointer = 1,
  InvalidUtf8 = 2,
  Schema = 3,
  InvalidArgument = 4,
  Mismatch = 5,
  Internal = 6,
} LssStatus;

/**
 * Opaque workspace handle.
 */
typedef struct LssWorkspace LssWorkspace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a JSON workspace into a handle. The handle must be released
 * with `lss_workspace_free`.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum LssStatus lss_workspace_parse(const char *json, struct LssWorkspace **out);

/**
 * Renders a workspace back to canonical JSON. The string must be
 * released with `lss_string_free`.
 *
 * # Safety
 * `ws` must come from `lss_workspace_parse`; `out` must be valid.
 */
enum LssStatus lss_workspace_to_json(const struct LssWorkspace *ws, char **out);

/**
 * # Safety
 * `ws` must come from `lss_workspace_parse` and not be freed twice.
 */
void lss_workspace_free(struct LssWorkspace *ws);

/**
 * # Safety
 * `s` must come from an `lss_*` out-parameter and not be freed twice.
 */
void lss_string_free(char *s);

/**
 * Converts the named family to its entourage, returning a workspace
 * JSON holding the family, the entourage and round-trip diagnostics.
 *
 * # Safety
 * Pointer contract as in `lss_workspace_to_json`; `name` is a valid
 * NUL-terminated string.
 */
enum LssStatus lss_family_to_entourage(const struct LssWorkspace *ws, const char *name, char **out);

/**
 * Builds the depth-`depth` chain of the first family, the chain metric
 * and the equivalence report, returned as workspace JSON.
 *
 * # Safety
 * Pointer contract as in `lss_workspace_to_json`.
 */
enum LssStatus lss_metrize(const struct LssWorkspace *ws, uintptr_t depth, char **out);

/**
 * Higson defect of function `f` over the first family with the final
 * exhaustion stage (or no truncation when the workspace has none).
 *
 * # Safety
 * Pointer contract as in `lss_workspace_to_json`.
 */
enum LssStatus lss_higson_defect(const struct LssWorkspace *ws,
                                 const char *function_name,
                                 double *out);

/**
 * Runs the full law suite with the given seed and 500 trials; writes the
 * JSON report and sets `all_pass`.
 *
 * # Safety
 * `out_report` and `all_pass` must be valid pointers.
 */
enum LssStatus lss_run_laws(uint64_t seed, char **out_report, bool *all_pass);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* LARGESCALE_H */
