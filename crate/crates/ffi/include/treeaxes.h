#ifndef TREEAXES_H
#define TREEAXES_H

/* Generated by cbindgen from the treeaxes-ffi sources; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TaStatus {
  TA_STATUS_OK = 0,
  TA_STATUS_NULL_ARGUMENT = 1,
  TA_STATUS_INVALID_UTF8 = 2,
  TA_STATUS_PARSE = 3,
  TA_STATUS_INVALID_INPUT = 4,
  TA_STATUS_UNSUPPORTED = 5,
  /**
   * The operation needs a nontrivial or loxodromic element.
   */
  TA_STATUS_DEGENERATE = 6,
  TA_STATUS_INTERNAL = 7,
} TaStatus;

/**
 * A group presentation (free product of free and finite cyclic factors).
 */
typedef struct TaPresentation TaPresentation;

/**
 * A reduced word, tied to the presentation it was parsed with.
 */
typedef struct TaWord TaWord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next call on the same thread.
 */
const char *ta_last_error(void);

/**
 * Library version as a static string.
 */
const char *ta_version(void);

/**
 * Parses `F2`, `Z2*Z3` or TOML such as `free_rank = 2`.
 *
 * # Safety
 * `spec` must be a nul-terminated string; `out` must be writable.
 */
enum TaStatus ta_presentation_parse(const char *spec, struct TaPresentation **out);

/**
 * # Safety
 * `p` must come from `ta_presentation_parse` and not be used afterwards.
 */
void ta_presentation_free(struct TaPresentation *p);

/**
 * Parses and freely reduces a word such as `abAB` (capitals are inverses).
 *
 * # Safety
 * `p` must be a live presentation, `word` nul-terminated, `out` writable.
 */
enum TaStatus ta_word_parse(const struct TaPresentation *p, const char *word, struct TaWord **out);

/**
 * # Safety
 * `w` must come from this library and not be used afterwards.
 */
void ta_word_free(struct TaWord *w);

/**
 * Reduced form of the word; release with `ta_string_free`.
 *
 * # Safety
 * `w` must be a live word and `out` writable.
 */
enum TaStatus ta_word_to_string(const struct TaWord *w, char **out);

/**
 * Translation length in the Cayley tree (free groups) or the Bass–Serre
 * tree (free products); 0 for elliptic elements.
 *
 * # Safety
 * `w` must be a live word and `out` writable.
 */
enum TaStatus ta_translation_length(const struct TaWord *w, size_t *out);

/**
 * w = root^exponent with root not a proper power. The root is a new handle.
 *
 * # Safety
 * `w` must be a live word; `root` and `exponent` writable.
 */
enum TaStatus ta_root(const struct TaWord *w, struct TaWord **root, uint32_t *exponent);

/**
 * Whether the word is part of a free basis; free groups only.
 *
 * # Safety
 * `w` must be a live word and `out` writable.
 */
enum TaStatus ta_is_primitive(const struct TaWord *w, bool *out);

/**
 * Full analysis (cyclic core, root, translation length, primitivity, axis)
 * as JSON; release with `ta_string_free`.
 *
 * # Safety
 * `w` must be a live word and `out` writable.
 */
enum TaStatus ta_analyze_json(const struct TaWord *w, char **out);

/**
 * # Safety
 * `s` must be a string returned by this library, or null.
 */
void ta_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TREEAXES_H */
