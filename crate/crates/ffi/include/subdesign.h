#ifndef SUBDESIGN_H
#define SUBDESIGN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. Zero is success.
 */
typedef enum {
  SD_STATUS_OK = 0,
  SD_STATUS_NULL_POINTER = 1,
  SD_STATUS_INVALID_UTF8 = 2,
  SD_STATUS_PARSE = 3,
  SD_STATUS_INVALID_FIELD = 4,
  SD_STATUS_INVALID_PARAMETER = 5,
  SD_STATUS_BUDGET_EXCEEDED = 6,
  SD_STATUS_HYPOTHESIS_VIOLATED = 7,
  SD_STATUS_INCONSISTENT = 8,
  SD_STATUS_INTERNAL = 9,
} SdStatus;

/**
 * A constructed moment-curve design.
 */
typedef struct SdDesign SdDesign;

/**
 * A finite field GF(p^h).
 */
typedef struct SdField SdField;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *sd_last_error(void);

/**
 * Frees a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void sd_string_free(char *s);

/**
 * Parses a field such as `"7"`, `"3^2"` or `"2^3:modulus=1,1,0,1"`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` writable.
 */
SdStatus sd_field_parse(const char *spec, SdField **out);

/**
 * Number of elements of the field.
 *
 * # Safety
 * `field` must be a live handle.
 */
uint64_t sd_field_order(const SdField *field);

/**
 * # Safety
 * `field` must come from [`sd_field_parse`] and not have been freed.
 */
void sd_field_free(SdField *field);

/**
 * Builds the design of `family` (`"tangent"`, `"diverted"` or `"secant"`).
 * A negative `omega` picks the smallest valid ω; tangent ignores it.
 *
 * # Safety
 * `field` must be a live handle, `family` NUL-terminated, `out` writable.
 */
SdStatus sd_design_build(const SdField *field,
                         const char *family,
                         size_t r,
                         size_t s,
                         int64_t omega,
                         SdDesign **out);

/**
 * Number of members.
 *
 * # Safety
 * `design` must be a live handle.
 */
size_t sd_design_len(const SdDesign *design);

/**
 * # Safety
 * `design` must come from [`sd_design_build`] and not have been freed.
 */
void sd_design_free(SdDesign *design);

/**
 * JSON form of the design, the same document `subdesign construct` prints.
 * Free the result with [`sd_string_free`].
 *
 * # Safety
 * `design` must be a live handle and `out` writable.
 */
SdStatus sd_design_to_json(const SdDesign *design, char **out);

/**
 * Measures the weak and strong parameters against codimension-`s`
 * subspaces. `samples == 0` scans exhaustively; otherwise `samples` random
 * subspaces drawn from `seed` give lower bounds.
 *
 * # Safety
 * `design` must be a live handle; `weak` and `strong` writable.
 */
SdStatus sd_design_measure(const SdDesign *design,
                           uint64_t samples,
                           uint64_t seed,
                           uint64_t budget,
                           size_t *weak,
                           size_t *strong);

/**
 * Whether the members form a 1-generator set, scanned exhaustively.
 * `equivalence_failed` is set when there are more members than field
 * elements, where a missing blocker no longer follows.
 *
 * # Safety
 * `design` must be a live handle; the out pointers writable.
 */
SdStatus sd_design_hp_check(const SdDesign *design,
                            uint64_t budget,
                            bool *is_generator,
                            bool *equivalence_failed);

/**
 * Lower bounds on the size of a `k`-generator set for degree `d`. Pass
 * `q == 0` for no field-size cap.
 *
 * # Safety
 * `finite_bound` and `closed_field_bound` must be writable.
 */
SdStatus sd_lower_bound(uint64_t d,
                        uint64_t k,
                        uint64_t q,
                        uint64_t *finite_bound,
                        uint64_t *closed_field_bound);

/**
 * Gaussian binomial `[m choose r]_q` as a decimal string. Free the result
 * with [`sd_string_free`].
 *
 * # Safety
 * `out` must be writable.
 */
SdStatus sd_gaussian_binomial(size_t m, size_t r, uint64_t q, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SUBDESIGN_H */
