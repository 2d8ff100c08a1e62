#ifndef BIAS_LEARN_H
#define BIAS_LEARN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BlMeasure {
  /**
   * Each ones-count gets equal mass, spread uniformly within it.
   */
  BL_MEASURE_CATEGORY_UNIFORM = 0,
  /**
   * Every admissible input has equal mass.
   */
  BL_MEASURE_FLAT_UNIFORM = 1,
} BlMeasure;

typedef enum BlStatus {
  BL_STATUS_OK = 0,
  BL_STATUS_NULL_POINTER = 1,
  BL_STATUS_INVALID_ARGUMENT = 2,
  BL_STATUS_IO = 3,
  BL_STATUS_PARSE = 4,
  BL_STATUS_DIVERGED = 5,
  BL_STATUS_PANIC = 6,
} BlStatus;

/**
 * Opaque multitask network together with the task of each output unit.
 */
typedef struct BlNetwork BlNetwork;

typedef struct BlTrainConfig {
  double learning_rate;
  size_t max_epochs;
  double target_error;
} BlTrainConfig;

typedef struct BlTrainResult {
  size_t epochs;
  double final_error;
  bool converged;
} BlTrainResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *bl_version(void);

/**
 * Message for the most recent failure on this thread, or an empty string.
 */
const char *bl_last_error_message(void);

struct BlTrainConfig bl_train_config_default(void);

/**
 * Creates a network with sigmoid hidden layers `hidden[0..hidden_len]`, a
 * `rep_dim`-dimensional representation and one output unit per task code.
 * Task codes are truth tables over ones-counts 1..4 read as a binary
 * number, most significant bit first (parity is 0b1010 = 10).
 *
 * # Safety
 * `hidden` and `task_codes` must point to the stated number of elements;
 * `out` must be writable.
 */
enum BlStatus bl_network_new(const size_t *hidden,
                             size_t hidden_len,
                             size_t rep_dim,
                             const uint32_t *task_codes,
                             size_t task_count,
                             double init_scale,
                             uint64_t seed,
                             struct BlNetwork **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `net` must come from this library and not be used afterwards.
 */
void bl_network_free(struct BlNetwork *net);

/**
 * Loads a checkpoint written by `bl_network_save` or the command-line tool.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum BlStatus bl_network_load(const char *path_, struct BlNetwork **out);

/**
 * # Safety
 * `net` must be a live handle; `path` a NUL-terminated string.
 */
enum BlStatus bl_network_save(const struct BlNetwork *net, const char *path_);

/**
 * # Safety
 * `net` must be a live handle; `out` must be writable.
 */
enum BlStatus bl_network_task_count(const struct BlNetwork *net, size_t *out);

/**
 * # Safety
 * `net` must be a live handle; `out` must be writable.
 */
enum BlStatus bl_network_rep_dim(const struct BlNetwork *net, size_t *out);

/**
 * Total weight count `W_R + n W_O`.
 *
 * # Safety
 * `net` must be a live handle; `out` must be writable.
 */
enum BlStatus bl_network_param_count(const struct BlNetwork *net, size_t *out);

/**
 * Output of task `task` on one input.
 *
 * # Safety
 * `bits` must point to `len` bytes; `out` must be writable.
 */
enum BlStatus bl_network_predict(const struct BlNetwork *net,
                                 size_t task,
                                 const uint8_t *bits,
                                 size_t len,
                                 double *out);

/**
 * Representation output for one input, written to `out[0..out_len]`;
 * `out_len` must equal the representation dimension.
 *
 * # Safety
 * `bits` must point to `len` bytes; `out` to `out_len` writable doubles.
 */
enum BlStatus bl_network_represent(const struct BlNetwork *net,
                                   const uint8_t *bits,
                                   size_t len,
                                   double *out,
                                   size_t out_len);

/**
 * Samples `m` examples per task from `measure` (seeded by `seed`) and trains
 * the whole network jointly. On `BL_STATUS_DIVERGED` the network is left
 * unchanged.
 *
 * # Safety
 * `net` must be a live handle; `config` readable; `result` writable or null.
 */
enum BlStatus bl_network_train(struct BlNetwork *net,
                               size_t m,
                               uint64_t seed,
                               enum BlMeasure measure_mode,
                               const struct BlTrainConfig *config,
                               struct BlTrainResult *result);

/**
 * Exact mean generalization error over the network's tasks.
 *
 * # Safety
 * `net` must be a live handle; `out` must be writable.
 */
enum BlStatus bl_network_gen_error(const struct BlNetwork *net,
                                   enum BlMeasure measure_mode,
                                   double *out);

/**
 * Representation error of the network's representation over all 14 tasks,
 * using `restarts` output-only training restarts per task.
 *
 * # Safety
 * `net` must be a live handle; `out` must be writable.
 */
enum BlStatus bl_representation_error(const struct BlNetwork *net,
                                      enum BlMeasure measure_mode,
                                      size_t restarts,
                                      double *out);

/**
 * Measure-weighted nearest-centroid accuracy of recovering the ones-count
 * from the representation output.
 *
 * # Safety
 * `net` must be a live handle; `out` must be writable.
 */
enum BlStatus bl_category_separation(const struct BlNetwork *net,
                                     enum BlMeasure measure_mode,
                                     double *out);

/**
 * `(W_O + W_R) / (W_O + W_R / n)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum BlStatus bl_n_task_gain(double rep_weights, double output_weights, size_t n, double *out);

/**
 * Per-task capacity logarithm `c_cap (W_O + W_R / n) ln(1/epsilon)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum BlStatus bl_capacity_log_composite(double rep_weights,
                                        double output_weights,
                                        size_t n,
                                        double epsilon,
                                        double c_cap,
                                        double *out);

/**
 * Examples per task `m = a + b / n`; any of the out-pointers may be null.
 *
 * # Safety
 * Non-null out-pointers must be writable.
 */
enum BlStatus bl_m_bound(double rep_weights,
                         double output_weights,
                         size_t n,
                         double epsilon,
                         double delta,
                         double c_sample,
                         double *out_m,
                         double *out_a,
                         double *out_b);

/**
 * Tasks needed before the learnt representation serves novel tasks.
 *
 * # Safety
 * `out` must be writable.
 */
enum BlStatus bl_n_bound(double rep_weights,
                         double epsilon,
                         double delta,
                         double c_cap,
                         double c_sample,
                         double *out);

/**
 * Examples for a novel task when only the output unit is learnt.
 *
 * # Safety
 * `out` must be writable.
 */
enum BlStatus bl_novel_task_m_bound(double output_weights,
                                    double epsilon,
                                    double delta,
                                    double c_sample,
                                    double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BIAS_LEARN_H */
