#ifndef HOALG_H
#define HOALG_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of a call. `HOALG_STATUS_TASK_FAILED` means the run completed and its report
 * (written as usual) contains a failing task.
 */
typedef enum HoalgStatus {
  HOALG_STATUS_OK = 0,
  HOALG_STATUS_NULL_ARGUMENT = 1,
  HOALG_STATUS_INVALID_UTF8 = 2,
  HOALG_STATUS_PARSE_ERROR = 3,
  HOALG_STATUS_VALIDATION_ERROR = 4,
  HOALG_STATUS_WINDOW_TOO_NARROW = 5,
  HOALG_STATUS_TASK_FAILED = 6,
  HOALG_STATUS_INVALID_OPTION = 7,
  HOALG_STATUS_INTERNAL = 8,
} HoalgStatus;

/**
 * A validated presentation plus run options.
 */
typedef struct HoalgSession HoalgSession;

/**
 * Library version as a static NUL-terminated string; do not free.
 */
const char *hoalg_version(void);

/**
 * Parses and validates a presentation. On success `*out` receives a new session.
 * On failure `*out` is set to null and, if `err` is non-null, `*err` receives the error
 * as JSON.
 *
 * # Safety
 * `text` must be a valid NUL-terminated string. `out` must be a valid pointer to write to.
 * `err` must be null or a valid pointer to write to.
 */
enum HoalgStatus hoalg_session_load(const char *text, struct HoalgSession **out, char **err);

/**
 * Releases a session. Null is ignored.
 *
 * # Safety
 * `session` must be null or a pointer returned by [`hoalg_session_load`] that has not been
 * freed.
 */
void hoalg_session_free(struct HoalgSession *session);

/**
 * Overrides the seed of sampled checks.
 *
 * # Safety
 * `session` must be a live session handle.
 */
enum HoalgStatus hoalg_session_set_seed(struct HoalgSession *session, uint64_t seed);

/**
 * Overrides the coefficient field: `"Q"` or `"Fp:<p>"`.
 *
 * # Safety
 * `session` must be a live session handle and `field` a valid NUL-terminated string.
 */
enum HoalgStatus hoalg_session_set_field(struct HoalgSession *session, const char *field);

/**
 * Overrides the truncation window, written `a:wmin:wmax:dmin:dmax`.
 *
 * # Safety
 * `session` must be a live session handle and `window` a valid NUL-terminated string.
 */
enum HoalgStatus hoalg_session_set_window(struct HoalgSession *session, const char *window);

/**
 * Number of tasks listed in the presentation.
 *
 * # Safety
 * `session` must be null or a live session handle.
 */
uintptr_t hoalg_session_task_count(const struct HoalgSession *session);

/**
 * Runs every task of the session and writes the JSON report (the same document the
 * command-line tool prints) to `*report`.
 *
 * # Safety
 * `session` must be a live session handle. `report` must be null or a valid pointer to
 * write to; a string written there must be released with [`hoalg_string_free`].
 */
enum HoalgStatus hoalg_session_run(const struct HoalgSession *session, char **report);

/**
 * Canonical printed form of the session's presentation.
 *
 * # Safety
 * `session` must be a live session handle and `out` a valid pointer to write to.
 */
enum HoalgStatus hoalg_session_print(const struct HoalgSession *session, char **out);

/**
 * Releases a string returned through an output parameter. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string allocated by this library that has not been freed.
 */
void hoalg_string_free(char *s);

#endif /* HOALG_H */
