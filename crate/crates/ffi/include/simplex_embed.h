#ifndef SIMPLEX_EMBED_H
#define SIMPLEX_EMBED_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes. The first three match the CLI exit codes.
typedef enum HsStatus {
  HS_STATUS_OK = 0,
  HS_STATUS_NOT_EXISTS = 1,
  HS_STATUS_INCONCLUSIVE = 2,
  HS_STATUS_INVALID_ARGUMENT = 3,
  HS_STATUS_PARSE_ERROR = 4,
  HS_STATUS_INTERNAL = 5,
} HsStatus;

// Opaque Coxeter diagram.
typedef struct HsDiagram HsDiagram;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parse a diagram from the text format (first diagram in `text`) or from
// a name such as `(2,3,7)` or `[3^{[3,3]}]`.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer. The
// handle written to `out` must be released with [`hs_diagram_free`].
enum HsStatus hs_diagram_parse(const char *text, struct HsDiagram **out);

// # Safety
// `d` must come from [`hs_diagram_parse`] and not be freed twice. Null is
// ignored.
void hs_diagram_free(struct HsDiagram *d);

// Number of vertices, or 0 for a null handle.
//
// # Safety
// `d` must be null or a live handle.
uintptr_t hs_diagram_rank(const struct HsDiagram *d);

// Classification (tag, signature, components) as JSON.
//
// # Safety
// `d` must be a live handle and `out_json` a valid pointer; free the
// result with [`hs_string_free`].
enum HsStatus hs_diagram_classify(const struct HsDiagram *d, char **out_json);

// Chamber search for H inside G. The full report is written to
// `out_json`; the status is `Ok` (found), `NotExists` or `Inconclusive`.
// `max_chambers` of 0 selects the default budget.
//
// # Safety
// `h` and `g` must be live handles and `out_json` a valid pointer; free
// the result with [`hs_string_free`].
enum HsStatus hs_embed(const struct HsDiagram *h,
                       const struct HsDiagram *g,
                       uintptr_t max_chambers,
                       char **out_json);

// Re-verify a search report or embedding certificate given as JSON.
// `Ok` means every certificate re-verified and every not-found claim
// replayed; `Inconclusive` means the report claims nothing.
//
// # Safety
// `json` must be a NUL-terminated string.
enum HsStatus hs_verify_json(const char *json);

// # Safety
// `s` must come from this library and not be freed twice. Null is
// ignored.
void hs_string_free(char *s);

// Message for the last failing call on this thread, or null. Valid until
// the next call into the library from the same thread.
const char *hs_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SIMPLEX_EMBED_H */
