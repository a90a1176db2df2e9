#ifndef FLOQUET_H
#define FLOQUET_H

#pragma once

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FqStatus {
  FQ_STATUS_OK = 0,
  FQ_STATUS_NULL_POINTER = 1,
  FQ_STATUS_INVALID_ARGUMENT = 2,
  FQ_STATUS_INVALID_DIMENSIONS = 3,
  FQ_STATUS_INVALID_CIRCUIT = 4,
  FQ_STATUS_PARSE = 5,
  FQ_STATUS_NONDETERMINISTIC = 6,
  FQ_STATUS_UNDECOMPOSABLE = 7,
  FQ_STATUS_ODD_SYNDROME = 8,
  FQ_STATUS_NO_CROSSING = 9,
  FQ_STATUS_ABOVE_THRESHOLD = 10,
  FQ_STATUS_IO = 11,
  FQ_STATUS_OTHER = 12,
  FQ_STATUS_PANIC = 13,
} FqStatus;

typedef enum FqFamily {
  FQ_FAMILY_STANDARD = 0,
  FQ_FAMILY_DYNAMIC = 1,
} FqFamily;

typedef enum FqObservable {
  FQ_OBSERVABLE_H = 0,
  FQ_OBSERVABLE_V = 1,
  FQ_OBSERVABLE_SUM = 2,
} FqObservable;

typedef struct FqCircuit FqCircuit;

typedef struct FqDecoder FqDecoder;

typedef struct FqDem FqDem;

typedef struct FqShots FqShots;

/**
 * One logical error rate with its 95% interval.
 */
typedef struct FqRatePoint {
  enum FqFamily family;
  enum FqObservable observable;
  uint32_t d;
  double p;
  uint64_t shots;
  uint64_t failures;
  double rate;
  double ci_low;
  double ci_high;
} FqRatePoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *fq_last_error(void);

/**
 * Release a string returned by this library.
 *
 * # Safety
 * `s` must come from this library or be NULL.
 */
void fq_string_free(char *s);

/**
 * Build a memory-experiment circuit on an `l1` x `l2` torus. `p > 0` adds
 * circuit-level depolarizing noise.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum FqStatus fq_circuit_build(enum FqFamily fam,
                               size_t l1,
                               size_t l2,
                               size_t cycles,
                               enum FqObservable obs,
                               double p,
                               struct FqCircuit **out);

/**
 * # Safety
 * `text` must be a NUL-terminated string, `out` a valid pointer.
 */
enum FqStatus fq_circuit_parse(const char *text, struct FqCircuit **out);

/**
 * Serialize a circuit; free the result with `fq_string_free`.
 *
 * # Safety
 * `c` must be a live handle, `out` a valid pointer.
 */
enum FqStatus fq_circuit_to_text(const struct FqCircuit *c, char **out);

/**
 * # Safety
 * `c` must be a live handle or NULL.
 */
size_t fq_circuit_num_qubits(const struct FqCircuit *c);

/**
 * # Safety
 * `c` must be a live handle or NULL.
 */
size_t fq_circuit_num_detectors(const struct FqCircuit *c);

/**
 * # Safety
 * `c` must be a live handle or NULL.
 */
size_t fq_circuit_num_observables(const struct FqCircuit *c);

/**
 * # Safety
 * `c` must come from this library or be NULL; it is invalid afterwards.
 */
void fq_circuit_free(struct FqCircuit *c);

/**
 * Circuit distance up to `w_max`; writes -1 when it exceeds `w_max`.
 *
 * # Safety
 * `c` must be a live handle, `out` a valid pointer.
 */
enum FqStatus fq_circuit_distance(const struct FqCircuit *c, size_t w_max, int64_t *out);

/**
 * Frame-sample `shots` shots of a circuit.
 *
 * # Safety
 * `c` must be a live handle, `out` a valid pointer.
 */
enum FqStatus fq_sample(const struct FqCircuit *c,
                        size_t shots,
                        uint64_t seed,
                        struct FqShots **out);

/**
 * # Safety
 * `s` must be a live handle or NULL.
 */
size_t fq_shots_count(const struct FqShots *s);

/**
 * # Safety
 * `s` must be a live handle or NULL.
 */
size_t fq_shots_num_detectors(const struct FqShots *s);

/**
 * Number of detection events in shot `shot`.
 *
 * # Safety
 * `s` must be a live handle, `out` a valid pointer.
 */
enum FqStatus fq_shots_fired_count(const struct FqShots *s, size_t shot, size_t *out);

/**
 * Observable flips of shot `shot` as a bit mask.
 *
 * # Safety
 * `s` must be a live handle, `out` a valid pointer.
 */
enum FqStatus fq_shots_observable_mask(const struct FqShots *s, size_t shot, uint64_t *out);

/**
 * # Safety
 * `s` must come from this library or be NULL; it is invalid afterwards.
 */
void fq_shots_free(struct FqShots *s);

/**
 * # Safety
 * `c` must be a live handle, `out` a valid pointer.
 */
enum FqStatus fq_dem_extract(const struct FqCircuit *c, struct FqDem **out);

/**
 * # Safety
 * `text` must be a NUL-terminated string, `out` a valid pointer.
 */
enum FqStatus fq_dem_parse(const char *text, struct FqDem **out);

/**
 * # Safety
 * `m` must be a live handle, `out` a valid pointer.
 */
enum FqStatus fq_dem_to_text(const struct FqDem *m, char **out);

/**
 * # Safety
 * `m` must be a live handle or NULL.
 */
size_t fq_dem_num_mechanisms(const struct FqDem *m);

/**
 * # Safety
 * `m` must come from this library or be NULL; it is invalid afterwards.
 */
void fq_dem_free(struct FqDem *m);

/**
 * # Safety
 * `m` must be a live handle, `out` a valid pointer.
 */
enum FqStatus fq_decoder_new(const struct FqDem *m, struct FqDecoder **out);

/**
 * Decode one syndrome given as `n` detector indices; writes the predicted
 * observable mask.
 *
 * # Safety
 * `dec` must be a live handle, `defects` must point to `n` values (or be
 * NULL when `n` is 0), `out` a valid pointer.
 */
enum FqStatus fq_decoder_decode(const struct FqDecoder *dec,
                                const size_t *defects,
                                size_t n,
                                uint64_t *out);

/**
 * Decode every shot and count those whose prediction differs from the
 * sampled observable flips.
 *
 * # Safety
 * `dec` and `s` must be live handles, `out` a valid pointer.
 */
enum FqStatus fq_decoder_count_failures(const struct FqDecoder *dec,
                                        const struct FqShots *s,
                                        uint64_t *out);

/**
 * # Safety
 * `dec` must come from this library or be NULL; it is invalid afterwards.
 */
void fq_decoder_free(struct FqDecoder *dec);

/**
 * H, V and summed logical error rates at distance `d`; `out` must hold
 * three points.
 *
 * # Safety
 * `out` must point to an array of three `FqRatePoint`.
 */
enum FqStatus fq_logical_error_rate(enum FqFamily fam,
                                    size_t d,
                                    double p,
                                    uint64_t shots,
                                    uint64_t seed,
                                    struct FqRatePoint *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FLOQUET_H */
