#ifndef CPT_EQ_H
#define CPT_EQ_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CptEqClass {
  CPT_EQ_CLASS_GENERIC = 0,
  CPT_EQ_CLASS_WEAKLY_DOMINATED = 1,
  CPT_EQ_CLASS_STRICTLY_DOMINATED = 2,
  CPT_EQ_CLASS_EQUIVALENT = 3,
} CptEqClass;

typedef enum CptEqStatus {
  CPT_EQ_STATUS_OK = 0,
  CPT_EQ_STATUS_NULL_POINTER = 1,
  CPT_EQ_STATUS_INVALID_ARGUMENT = 2,
  CPT_EQ_STATUS_LENGTH_MISMATCH = 3,
  CPT_EQ_STATUS_NOT_TWO_BY_TWO = 4,
  CPT_EQ_STATUS_PRECONDITION_VIOLATED = 5,
  CPT_EQ_STATUS_BUFFER_TOO_SMALL = 6,
  CPT_EQ_STATUS_PANIC = 7,
} CptEqStatus;

typedef enum CptEqWeighting {
  CPT_EQ_WEIGHTING_IDENTITY = 0,
  CPT_EQ_WEIGHTING_PRELEC = 1,
  CPT_EQ_WEIGHTING_DUAL_PRELEC = 2,
} CptEqWeighting;

/**
 * Opaque game handle.
 */
typedef struct CptEqGame CptEqGame;

/**
 * Opaque preferences handle.
 */
typedef struct CptEqPreferences CptEqPreferences;

/**
 * Classification of a 2x2 game. `kind` is the canonical type 1 to 4, or 0
 * when the class has none. `alpha` and `beta` are set for generic games;
 * for weakly dominated ones a coefficient tending to 0 or infinity is
 * reported as 0 or `INFINITY`.
 */
typedef struct CptEqClassification {
  enum CptEqClass class_;
  uint32_t kind;
  double alpha;
  double beta;
} CptEqClassification;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL
 * terminated, truncated to `len - 1` bytes) and returns the full message
 * length in bytes.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t cpt_eq_last_error(char *buf, size_t len);

/**
 * Static description of a status code.
 */
const char *cpt_eq_status_str(enum CptEqStatus status);

/**
 * Creates preferences with reference point `reference`, value exponents
 * `a` (gains) and `b` (losses), loss aversion `lambda`, and one weighting
 * function per frame. `a = b = lambda = 1` gives the identity value.
 *
 * # Safety
 * `out` must be a valid pointer to write the handle to.
 */
enum CptEqStatus cpt_eq_preferences_new(double reference,
                                        double a,
                                        double b,
                                        double lambda,
                                        enum CptEqWeighting gain,
                                        double gain_alpha,
                                        enum CptEqWeighting loss,
                                        double loss_alpha,
                                        struct CptEqPreferences **out);

/**
 * # Safety
 * `prefs` must be null or a handle from [`cpt_eq_preferences_new`] not yet
 * freed.
 */
void cpt_eq_preferences_free(struct CptEqPreferences *prefs);

/**
 * CPT value of the prospect `(probs, outcomes)` of length `len`.
 *
 * # Safety
 * Arrays must hold `len` values; `prefs` must be a live handle.
 */
enum CptEqStatus cpt_eq_value(const struct CptEqPreferences *prefs,
                              const double *probs,
                              const double *outcomes,
                              size_t len,
                              double *out);

/**
 * Regret `V(p, x) - V(p, y)`.
 *
 * # Safety
 * Arrays must hold `len` values; `prefs` must be a live handle.
 */
enum CptEqStatus cpt_eq_regret(const struct CptEqPreferences *prefs,
                               const double *probs,
                               const double *x,
                               const double *y,
                               size_t len,
                               double *out);

/**
 * Creates a game with `players` players; `counts[i]` strategies for
 * player `i`. `payoffs` holds `players` consecutive tensors in joint index
 * order (last player fastest), `players * prod(counts)` values in all.
 *
 * # Safety
 * `counts` must hold `players` values and `payoffs` the number above.
 */
enum CptEqStatus cpt_eq_game_new(size_t players,
                                 const size_t *counts,
                                 const double *payoffs,
                                 size_t payoffs_len,
                                 struct CptEqGame **out);

/**
 * # Safety
 * `game` must be null or a handle from [`cpt_eq_game_new`] not yet freed.
 */
void cpt_eq_game_free(struct CptEqGame *game);

/**
 * Number of joint profiles of `game`, or 0 for a null handle.
 *
 * # Safety
 * `game` must be null or a live handle.
 */
size_t cpt_eq_game_joint_size(const struct CptEqGame *game);

/**
 * CPT correlated equilibrium check of `mu` (joint index order). `prefs`
 * is an array of one handle per player. Writes membership and the smallest
 * slack.
 *
 * # Safety
 * Pointers must be valid for the stated lengths; handles must be live.
 */
enum CptEqStatus cpt_eq_check_correlated(const struct CptEqGame *game,
                                         const struct CptEqPreferences *const *prefs,
                                         size_t prefs_len,
                                         const double *mu,
                                         size_t mu_len,
                                         double tolerance,
                                         bool *out_member,
                                         double *out_worst);

/**
 * Classifies a 2x2 game and writes the vertices of its CPT correlated
 * equilibrium polytope into `vertices` (4 values each, up to
 * `vertex_capacity` vertices). `out_vertex_count` always receives the
 * true count; a short buffer yields `BufferTooSmall`.
 *
 * # Safety
 * `vertices` must hold `4 * vertex_capacity` values; other pointers must
 * be valid.
 */
enum CptEqStatus cpt_eq_classify_2x2(const struct CptEqGame *game,
                                     const struct CptEqPreferences *const *prefs,
                                     size_t prefs_len,
                                     struct CptEqClassification *out_class,
                                     double *vertices,
                                     size_t vertex_capacity,
                                     size_t *out_vertex_count);

/**
 * Rasterizes `C(player, signal)` on a grid of the given resolution over
 * the opponents' profiles and writes the number of member points and of
 * connected components. Players and strategies count from 0.
 *
 * # Safety
 * Pointers must be valid; handles must be live.
 */
enum CptEqStatus cpt_eq_region_components(const struct CptEqGame *game,
                                          const struct CptEqPreferences *const *prefs,
                                          size_t prefs_len,
                                          size_t player,
                                          size_t signal,
                                          size_t resolution,
                                          double tolerance,
                                          size_t *out_members,
                                          size_t *out_components);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CPT_EQ_H */
