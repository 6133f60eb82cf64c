#ifndef GAMEABS_H
#define GAMEABS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes. Zero is success.
typedef enum GameabsStatus {
  GAMEABS_STATUS_OK = 0,
  GAMEABS_STATUS_NULL_POINTER = 1,
  GAMEABS_STATUS_INVALID_ARGUMENT = 2,
  GAMEABS_STATUS_IO = 3,
  GAMEABS_STATUS_PARSE = 4,
  // The profile or maps do not fit the game.
  GAMEABS_STATUS_MISMATCH = 5,
  GAMEABS_STATUS_SOLVER = 6,
  GAMEABS_STATUS_PROVIDER = 7,
  GAMEABS_STATUS_PANIC = 99,
} GameabsStatus;

// Solver choice for [`gameabs_solve`].
typedef enum GameabsVariant {
  GAMEABS_VARIANT_CFR_PLUS = 0,
  GAMEABS_VARIANT_CFR = 1,
} GameabsVariant;

// A benchmark game.
typedef struct GameabsGame GameabsGame;

// A behavioural strategy profile keyed by infoset.
typedef struct GameabsProfile GameabsProfile;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. The pointer
// stays valid until the next failing call on the same thread.
const char *gameabs_last_error(void);

// Library version as a static NUL-terminated string.
const char *gameabs_version(void);

// Builds a game from `kuhn:N` or `leduc:R`.
//
// # Safety
// `spec` must be a NUL-terminated string and `out` a valid pointer.
enum GameabsStatus gameabs_game_new(const char *spec, struct GameabsGame **out);

// # Safety
// `game` must come from [`gameabs_game_new`] and not be used afterwards.
void gameabs_game_free(struct GameabsGame *game);

// Sequence count and utility-matrix nonzeros.
//
// # Safety
// All pointers must be valid.
enum GameabsStatus gameabs_game_size(const struct GameabsGame *game,
                                     size_t *num_sequences,
                                     size_t *nnz);

// Solves `game` until the exploitability reaches `target_eps` or
// `max_iterations` pass. Writes the average profile and its exploitability.
//
// # Safety
// All pointers must be valid; `eps_out` may be NULL.
enum GameabsStatus gameabs_solve(const struct GameabsGame *game,
                                 enum GameabsVariant variant,
                                 double target_eps,
                                 size_t max_iterations,
                                 struct GameabsProfile **out,
                                 double *eps_out);

// Average best-response gain against `profile` in `game`.
//
// # Safety
// All pointers must be valid.
enum GameabsStatus gameabs_exploitability(const struct GameabsGame *game,
                                          const struct GameabsProfile *profile,
                                          double *out);

// Number of infosets the profile covers.
//
// # Safety
// `profile` must be valid or NULL.
size_t gameabs_profile_len(const struct GameabsProfile *profile);

// Copies the action probabilities of infoset `key` into `probs`, which has
// room for `capacity` values. `len_out` receives the number of actions even
// when `capacity` is too small (then nothing is copied and the call fails).
//
// # Safety
// `probs` must point to `capacity` writable doubles (or be NULL when
// `capacity` is 0); the other pointers must be valid.
enum GameabsStatus gameabs_profile_get(const struct GameabsProfile *profile,
                                       const char *key,
                                       double *probs,
                                       size_t capacity,
                                       size_t *len_out);

// Writes the profile as JSON (gzip when the path ends in `.gz`).
//
// # Safety
// Pointers must be valid; `path` NUL-terminated.
enum GameabsStatus gameabs_profile_save(const struct GameabsProfile *profile, const char *path);

// # Safety
// `path` must be NUL-terminated and `out` valid.
enum GameabsStatus gameabs_profile_load(const char *path, struct GameabsProfile **out);

// # Safety
// `profile` must come from this library and not be used afterwards.
void gameabs_profile_free(struct GameabsProfile *profile);

// Abstracts `game` with the maps in `maps_path`, solves the abstract game,
// lifts the result and writes its exploitability in `game`.
//
// # Safety
// Pointers must be valid; `maps_path` NUL-terminated.
enum GameabsStatus gameabs_evaluate_maps(const struct GameabsGame *game,
                                         const char *maps_path,
                                         double target_eps,
                                         size_t max_iterations,
                                         double *eps_out);

// Runs the experiment described by a JSON config file and writes the
// number of records. Results land in the config's output directory.
//
// # Safety
// `config_path` must be NUL-terminated; `records_out` may be NULL.
enum GameabsStatus gameabs_run_experiment(const char *config_path, size_t *records_out);

// Writes the game's spec string (`kuhn:N` or `leduc:R`) into `buf` of
// `capacity` bytes, NUL-terminated. Fails when the buffer is too small.
//
// # Safety
// `buf` must point to `capacity` writable bytes.
enum GameabsStatus gameabs_game_spec(const struct GameabsGame *game, char *buf, size_t capacity);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GAMEABS_H */
