#ifndef PLANSYM_H
#define PLANSYM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PlansymStatus {
  PLANSYM_STATUS_OK = 0,
  PLANSYM_STATUS_NULL_POINTER = 1,
  PLANSYM_STATUS_INVALID_UTF8 = 2,
  /**
   * Malformed or unsupported PDDL, or a bad state dump.
   */
  PLANSYM_STATUS_INPUT = 3,
  /**
   * State or action cap exceeded.
   */
  PLANSYM_STATUS_CAP = 4,
  /**
   * Index out of range or buffer too small.
   */
  PLANSYM_STATUS_RANGE = 5,
  PLANSYM_STATUS_PANIC = 6,
} PlansymStatus;

typedef struct PlansymSpace PlansymSpace;

typedef struct PlansymTask PlansymTask;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Last error message of this thread; empty if none. The pointer is valid
 * until the next failing call on the same thread.
 */
const char *plansym_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *plansym_version(void);

/**
 * Parses and grounds a task from PDDL texts.
 *
 * # Safety
 * `domain` and `instance` must be NUL-terminated strings; `out` must be
 * valid for writes.
 */
enum PlansymStatus plansym_task_load(const char *domain,
                                     const char *instance,
                                     struct PlansymTask **out);

/**
 * # Safety
 * `task` must come from [`plansym_task_load`] and not be used afterwards.
 */
void plansym_task_free(struct PlansymTask *task);

/**
 * # Safety
 * `task` must be a live handle or null (yields 0).
 */
size_t plansym_task_num_atoms(const struct PlansymTask *task);

/**
 * # Safety
 * `task` must be a live handle or null (yields 0).
 */
size_t plansym_task_num_objects(const struct PlansymTask *task);

/**
 * # Safety
 * `task` must be a live handle or null (yields 0).
 */
size_t plansym_task_num_actions(const struct PlansymTask *task);

/**
 * Expands the reachable state space, refusing more than `max_states`.
 *
 * # Safety
 * `task` must be a live handle; `out` must be valid for writes.
 */
enum PlansymStatus plansym_space_expand(const struct PlansymTask *task,
                                        size_t max_states,
                                        struct PlansymSpace **out);

/**
 * # Safety
 * `space` must come from [`plansym_space_expand`] and not be used afterwards.
 */
void plansym_space_free(struct PlansymSpace *space);

/**
 * # Safety
 * `space` must be a live handle or null (yields 0).
 */
size_t plansym_space_num_states(const struct PlansymSpace *space);

/**
 * # Safety
 * `space` must be a live handle or null (yields 0).
 */
size_t plansym_space_num_transitions(const struct PlansymSpace *space);

/**
 * Index of the initial state.
 *
 * # Safety
 * `space` must be a live handle or null (yields 0).
 */
size_t plansym_space_initial(const struct PlansymSpace *space);

/**
 * Optimal cost-to-go of `state`; -1 for dead ends.
 *
 * # Safety
 * `space` must be a live handle; `out` must be valid for writes.
 */
enum PlansymStatus plansym_space_vstar(const struct PlansymSpace *space,
                                       size_t state,
                                       int64_t *out);

/**
 * Number of isomorphism classes among the expanded states.
 *
 * # Safety
 * Both handles must be live and from the same task; `out` valid for writes.
 */
enum PlansymStatus plansym_space_num_classes(const struct PlansymTask *task,
                                             const struct PlansymSpace *space,
                                             size_t *out);

/**
 * Decides whether two state dumps (atoms such as `at(b1,rooma)`) of one
 * task are isomorphic. Writes 1 or 0 to `out`.
 *
 * # Safety
 * `task` must be live; `a` and `b` NUL-terminated; `out` valid for writes.
 */
enum PlansymStatus plansym_states_isomorphic(const struct PlansymTask *task,
                                             const char *a,
                                             const char *b,
                                             int32_t *out);

/**
 * Writes the 32-character hex digest of a state's canonical form plus a
 * NUL into `buf`, which must hold at least 33 bytes.
 *
 * # Safety
 * `task` must be live; `state` NUL-terminated; `buf` valid for `len` bytes.
 */
enum PlansymStatus plansym_state_digest(const struct PlansymTask *task,
                                        const char *state,
                                        char *buf,
                                        size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PLANSYM_H */
