#ifndef LINKSTAB_H
#define LINKSTAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of a C ABI call.
 */
typedef enum LsStatus {
  /**
   * The call succeeded.
   */
  LS_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  LS_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  LS_STATUS_ENCODING = 2,
  /**
   * The document failed to parse; see `ls_last_error_message`.
   */
  LS_STATUS_PARSE = 3,
  /**
   * The input defines no state (every amplitude vanishes).
   */
  LS_STATUS_ILL_DEFINED = 4,
  /**
   * The state is not a stabilizer state.
   */
  LS_STATUS_NOT_STABILIZER = 5,
  /**
   * Any other domain error; see `ls_last_error_message`.
   */
  LS_STATUS_INVALID = 6,
  /**
   * An internal invariant failed.
   */
  LS_STATUS_INTERNAL = 7,
} LsStatus;

/**
 * Opaque handle: a parsed surgery presentation.
 */
typedef struct LsManifold LsManifold;

/**
 * Opaque handle: a parsed tensor network.
 */
typedef struct LsNetwork LsNetwork;

/**
 * Opaque handle: an exact dense state.
 */
typedef struct LsState LsState;

/**
 * Opaque handle: a stabilizer tableau.
 */
typedef struct LsTableau LsTableau;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a manifold document. On success `*out` owns the handle.
 *
 * # Safety
 * `text` must be a valid C string and `out` a valid pointer.
 */
enum LsStatus ls_manifold_parse(const char *text, struct LsManifold **out);

/**
 * Releases a manifold handle; null is ignored.
 *
 * # Safety
 * `m` must be null or a pointer from `ls_manifold_parse`.
 */
void ls_manifold_free(struct LsManifold *m);

/**
 * Parses a network document. On success `*out` owns the handle.
 *
 * # Safety
 * `text` must be a valid C string and `out` a valid pointer.
 */
enum LsStatus ls_network_parse(const char *text, struct LsNetwork **out);

/**
 * Releases a network handle; null is ignored.
 *
 * # Safety
 * `n` must be null or a pointer from `ls_network_parse`.
 */
void ls_network_free(struct LsNetwork *n);

/**
 * Evaluates a manifold to its boundary state. A presentation whose
 * amplitudes all vanish yields `LS_STATUS_ILL_DEFINED`.
 *
 * # Safety
 * `m` must come from `ls_manifold_parse`; `out` must be valid.
 */
enum LsStatus ls_manifold_state(const struct LsManifold *m, bool sign_flip, struct LsState **out);

/**
 * Contracts a network to its open-leg state.
 *
 * # Safety
 * `n` must come from `ls_network_parse`; `out` must be valid.
 */
enum LsStatus ls_network_state(const struct LsNetwork *n, struct LsState **out);

/**
 * Releases a state handle; null is ignored.
 *
 * # Safety
 * `s` must be null or a pointer from a state-producing call.
 */
void ls_state_free(struct LsState *s);

/**
 * Number of sites of the state; 0 for a null handle.
 *
 * # Safety
 * `s` must be null or a valid state handle.
 */
uintptr_t ls_state_site_count(const struct LsState *s);

/**
 * Qudit dimension of the state; 0 for a null handle.
 *
 * # Safety
 * `s` must be null or a valid state handle.
 */
uint64_t ls_state_level(const struct LsState *s);

/**
 * Serializes the state as a JSON object with the level, the site
 * names, and one entry per nonzero amplitude carrying the exact
 * coefficient vector and a float pair.
 *
 * # Safety
 * `s` must be a valid state handle; `out` receives a string owned by
 * the caller and released with `ls_string_free`.
 */
enum LsStatus ls_state_json(const struct LsState *s, char **out);

/**
 * Tests whether the state is a pure stabilizer state.
 *
 * # Safety
 * `s` must be a valid state handle; `out` must be valid.
 */
enum LsStatus ls_state_is_stabilizer(const struct LsState *s, bool *out);

/**
 * Entanglement entropy of the named region, in dits and nats.
 *
 * # Safety
 * `s` must be a valid state handle; `sites` must hold `n_sites`
 * valid C strings; `dits` and `nats` must be valid pointers.
 */
enum LsStatus ls_state_entropy(const struct LsState *s,
                               const char *const *sites,
                               uintptr_t n_sites,
                               double *dits,
                               double *nats);

/**
 * GHZ count of the tripartition `(a, b, c)` of the state's sites.
 *
 * # Safety
 * `s` must be a valid state handle; each list must hold the stated
 * number of valid C strings; `out` must be valid.
 */
enum LsStatus ls_state_ghz_count(const struct LsState *s,
                                 const char *const *a,
                                 uintptr_t n_a,
                                 const char *const *b,
                                 uintptr_t n_b,
                                 const char *const *c,
                                 uintptr_t n_c,
                                 int64_t *out);

/**
 * Compiles a manifold directly to a stabilizer tableau.
 *
 * # Safety
 * `m` must come from `ls_manifold_parse`; `out` must be valid.
 */
enum LsStatus ls_manifold_tableau(const struct LsManifold *m,
                                  bool sign_flip,
                                  struct LsTableau **out);

/**
 * Finds the stabilizer tableau of a state by exhaustive search.
 *
 * # Safety
 * `s` must be a valid state handle; `out` must be valid.
 */
enum LsStatus ls_state_tableau(const struct LsState *s, struct LsTableau **out);

/**
 * Releases a tableau handle; null is ignored.
 *
 * # Safety
 * `t` must be null or a pointer from a tableau-producing call.
 */
void ls_tableau_free(struct LsTableau *t);

/**
 * Number of generators; 0 for a null handle.
 *
 * # Safety
 * `t` must be null or a valid tableau handle.
 */
uintptr_t ls_tableau_generator_count(const struct LsTableau *t);

/**
 * Renders the tableau, one generator per line.
 *
 * # Safety
 * `t` must be a valid tableau handle; `out` receives a string owned
 * by the caller and released with `ls_string_free`.
 */
enum LsStatus ls_tableau_text(const struct LsTableau *t, char **out);

/**
 * Verlinde dimension of the genus-`genus` space at odd prime `r`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum LsStatus ls_verlinde_dim(uint64_t r, uint64_t genus, uint64_t *out);

/**
 * Message of the most recent failure on this thread. The pointer
 * stays valid until the next failing call on the same thread; do not
 * free it.
 */
const char *ls_last_error_message(void);

/**
 * Releases a string returned through an `out` parameter; null is
 * ignored.
 *
 * # Safety
 * `s` must be null or a string pointer obtained from this library.
 */
void ls_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LINKSTAB_H */
