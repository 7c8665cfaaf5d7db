/* C interface for the maslov library.
 *
 * Every function returns a maslov_status; outputs are written through
 * pointers only on MASLOV_OK. Strings returned by the library are released
 * with maslov_string_free, loop handles with maslov_loop_free.
 * maslov_last_error() gives a thread-local message for the latest failure;
 * the pointer stays valid until the next failing call on the same thread.
 */

#ifndef MASLOV_H
#define MASLOV_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum maslov_status {
  MASLOV_OK = 0,
  MASLOV_ERR_NULL_ARGUMENT = 1,
  MASLOV_ERR_INVALID_UTF8 = 2,
  MASLOV_ERR_PARSE = 3,
  MASLOV_ERR_WRONG_FIELD = 4,
  MASLOV_ERR_COMPUTE = 5,
} maslov_status;

/* Opaque handle around a validated closed loop of lagrangian frames. */
typedef struct MaslovLoop MaslovLoop;

/* Parse a loop from its JSON wire format:
 *   {"field": "real"|"complex", "n": <int>,
 *    "samples": [[[re, im], ...] row-major 2n x n matrices],
 *    "closed": true}
 */
maslov_status maslov_loop_from_json(const char *json, MaslovLoop **out);

/* Loop of lines making k half-turns, sampled `samples` times. */
maslov_status maslov_rotation_loop(int64_t k, size_t samples, MaslovLoop **out);

void maslov_loop_free(MaslovLoop *loop);

maslov_status maslov_loop_len(const MaslovLoop *loop, size_t *out);

/* Maslov index (winding number); real loops only. */
maslov_status maslov_loop_index(const MaslovLoop *loop, int64_t *out);

/* Z4 holonomy as a unit complex number. branch_negative = 0 selects the +i
 * square-root convention, anything else -i. */
maslov_status maslov_loop_holonomy(const MaslovLoop *loop, int branch_negative,
                                   double *out_re, double *out_im);

/* Dual-route gerbe-class report on the built-in sphere cover, as JSON:
 *   {"giraud_evaluation": [re, im], "equator_holonomy": [re, im],
 *    "equal": bool, "max_deviation": float, "chern_evaluation": int,
 *    "z4_holonomy": "i"|"-i"|..., "square_relation_holds": bool,
 *    "value": [re, im], "consistent": bool}
 */
maslov_status maslov_gerbe_report_json(int branch_negative, char **out);

/* Verification suite; the result is a JSON array of check reports. */
maslov_status maslov_verify_json(uint64_t seed, size_t samples, char **out);

void maslov_string_free(char *s);

const char *maslov_last_error(void);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* MASLOV_H */
