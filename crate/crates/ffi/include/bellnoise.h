#ifndef BELLNOISE_H
#define BELLNOISE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BnStatus {
  BN_STATUS_OK = 0,
  BN_STATUS_NULL_POINTER = 1,
  BN_STATUS_INVALID_ARGUMENT = 2,
  BN_STATUS_CONFIG = 3,
  BN_STATUS_METHOD_GEOMETRY = 4,
  BN_STATUS_NUMERICAL = 5,
  BN_STATUS_GRID_MISMATCH = 6,
  BN_STATUS_NOT_DENSITY_MATRIX = 7,
  BN_STATUS_NOT_XCORR = 8,
  BN_STATUS_IO = 9,
  BN_STATUS_PANIC = 10,
} BnStatus;

typedef enum BnBellState {
  BN_BELL_STATE_PSI_MINUS = 0,
  BN_BELL_STATE_PSI_PLUS = 1,
  BN_BELL_STATE_PHI_PLUS = 2,
  BN_BELL_STATE_PHI_MINUS = 3,
} BnBellState;

typedef enum BnGeometry {
  BN_GEOMETRY_DEPHASING = 0,
  BN_GEOMETRY_ISOTROPIC = 1,
  BN_GEOMETRY_TRANSVERSE = 2,
} BnGeometry;

typedef enum BnMethod {
  BN_METHOD_ANALYTIC = 0,
  BN_METHOD_QSBA = 1,
  BN_METHOD_CUMULANT2 = 2,
  BN_METHOD_MONTE_CARLO = 3,
} BnMethod;

/*
 Validated simulation scenario.
 */
typedef struct BnScenario BnScenario;

/*
 Concurrence trace produced by [`bn_scenario_run`].
 */
typedef struct BnTrace BnTrace;

/*
 One row of a concurrence trace. `stderr` is NaN for deterministic
 methods.
 */
typedef struct BnTraceRow {
  double t;
  enum BnMethod method;
  enum BnBellState state;
  double concurrence;
  double stderr;
} BnTraceRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failure on this thread, or an empty string. The
 pointer stays valid until the next failing call on the same thread.
 */
const char *bn_last_error(void);

/*
 Writes the density matrix of a Bell state.

 # Safety
 `re` and `im` must each point to 16 writable doubles.
 */
enum BnStatus bn_bell_state(enum BnBellState state, double *re, double *im);

/*
 Wootters concurrence of a density matrix.

 # Safety
 `re` and `im` must each point to 16 readable doubles; `out` must be
 writable.
 */
enum BnStatus bn_concurrence(const double *re, const double *im, double *out);

/*
 Closed-form concurrence under white noise of the given geometry, or
 under dephasing when `geometry` is dephasing (then `t_white` is the
 white-noise time and `gamma` the cross-correlation).

 # Safety
 `out` must be writable.
 */
enum BnStatus bn_white_concurrence(enum BnGeometry geometry,
                                   enum BnBellState state,
                                   double gamma,
                                   double t_white,
                                   double t,
                                   double *out);

/*
 First zero of the white-noise concurrence, `+inf` when there is none.

 # Safety
 `out` must be writable.
 */
enum BnStatus bn_sudden_death_time(enum BnGeometry geometry,
                                   enum BnBellState state,
                                   double gamma,
                                   double t_white,
                                   double *out);

/*
 Quasi-static concurrence for transverse noise; `correlated` selects
 fully correlated rather than independent noise.

 # Safety
 `out` must be writable; `valid` may be NULL.
 */
enum BnStatus bn_qsba_concurrence(enum BnBellState state,
                                  bool correlated,
                                  double sigma1,
                                  double sigma2,
                                  double omega,
                                  double t,
                                  double *out,
                                  bool *valid);

/*
 Parses a scenario from config text.

 # Safety
 `text` must be a NUL-terminated string; `out` must be writable.
 */
enum BnStatus bn_scenario_parse(const char *text, struct BnScenario **out);

/*
 Loads a bundled preset (`fig1` … `fig6`).

 # Safety
 `name` must be a NUL-terminated string; `out` must be writable.
 */
enum BnStatus bn_scenario_preset(const char *name, struct BnScenario **out);

/*
 # Safety
 `scenario` must come from this library and not be used afterwards.
 */
void bn_scenario_free(struct BnScenario *scenario);

/*
 Runs every method of the scenario. `threads == 0` uses the default
 worker pool; the result does not depend on the thread count.

 # Safety
 `scenario` must be a live handle; `out` must be writable.
 */
enum BnStatus bn_scenario_run(const struct BnScenario *scenario,
                              uint32_t threads,
                              struct BnTrace **out);

/*
 # Safety
 `trace` must be a live handle or NULL.
 */
size_t bn_trace_len(const struct BnTrace *trace);

/*
 # Safety
 `trace` must be a live handle; `out` must be writable.
 */
enum BnStatus bn_trace_row(const struct BnTrace *trace, size_t index, struct BnTraceRow *out);

/*
 Writes the trace as CSV.

 # Safety
 `trace` must be a live handle; `path` a NUL-terminated string.
 */
enum BnStatus bn_trace_write_csv(const struct BnTrace *trace, const char *path);

/*
 # Safety
 `trace` must come from this library and not be used afterwards.
 */
void bn_trace_free(struct BnTrace *trace);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BELLNOISE_H */
