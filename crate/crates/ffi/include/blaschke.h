#ifndef BLASCHKE_H
#define BLASCHKE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum BlStatus {
  BL_STATUS_OK = 0,
  BL_STATUS_NULL_POINTER = 1,
  BL_STATUS_INVALID_ARGUMENT = 2,
  BL_STATUS_INVALID_SIGNAL = 3,
  // A numerical precondition failed (vanishing modulus, zero signal, …).
  BL_STATUS_NUMERICAL = 4,
  BL_STATUS_IO = 5,
  BL_STATUS_BUFFER_TOO_SMALL = 6,
  BL_STATUS_PANIC = 7,
} BlStatus;

// Result of an unwinding run.
typedef struct BlDecomposition BlDecomposition;

// A uniformly sampled complex signal.
typedef struct BlSignal BlSignal;

// Parameters of [`bl_unwind`]. Start from [`bl_unwind_options_default`].
typedef struct BlUnwindOptions {
  size_t depth;
  size_t detrend_order;
  double stabilizer;
  bool reflect;
  // Hz; `0` disables the carrier.
  double carrier_hz;
} BlUnwindOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Crate version, a static NUL-terminated string.
const char *bl_version(void);

// Message of the last failure on this thread, or null if there was none.
// The pointer stays valid until the next failing call on this thread.
const char *bl_last_error_message(void);

// Creates a signal from `len` samples over `duration` seconds. `im` may be null
// for a real signal.
//
// # Safety
// `re` (and `im` when non-null) must point to `len` readable doubles; `out` must
// be writable.
enum BlStatus bl_signal_new(const double *re,
                            const double *im,
                            size_t len,
                            double duration,
                            struct BlSignal **out);

// Reads a `t,re,im` CSV file.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum BlStatus bl_signal_read_csv(const char *path, struct BlSignal **out);

// Writes a `t,re,im` CSV file.
//
// # Safety
// `sig` must be a live handle and `path` a NUL-terminated string.
enum BlStatus bl_signal_write_csv(const struct BlSignal *sig, const char *path);

// Sample count, or 0 for a null handle.
//
// # Safety
// `sig` must be null or a live handle.
size_t bl_signal_len(const struct BlSignal *sig);

// Duration in seconds, or NaN for a null handle.
//
// # Safety
// `sig` must be null or a live handle.
double bl_signal_duration(const struct BlSignal *sig);

// Copies the samples into `re` and `im` (either may be null), each of capacity `cap`.
//
// # Safety
// `sig` must be a live handle; non-null buffers must hold `cap` doubles.
enum BlStatus bl_signal_copy(const struct BlSignal *sig, double *re, double *im, size_t cap);

// # Safety
// `sig` must be null or a handle not yet freed.
void bl_signal_free(struct BlSignal *sig);

struct BlUnwindOptions bl_unwind_options_default(void);

// Blaschke unwinding of `sig`. A null `options` uses the defaults.
//
// # Safety
// `sig` must be a live handle, `options` null or readable, `out` writable.
enum BlStatus bl_unwind(const struct BlSignal *sig,
                        const struct BlUnwindOptions *options,
                        struct BlDecomposition **out);

// Levels achieved, or 0 for a null handle.
//
// # Safety
// `dec` must be null or a live handle.
size_t bl_decomposition_depth(const struct BlDecomposition *dec);

// Component `index` (zero-based), demodulated, as a new signal handle.
//
// # Safety
// `dec` must be a live handle and `out` writable.
enum BlStatus bl_decomposition_component(const struct BlDecomposition *dec,
                                         size_t index,
                                         struct BlSignal **out);

// The first trend `L₁` as a new signal handle.
//
// # Safety
// `dec` must be a live handle and `out` writable.
enum BlStatus bl_decomposition_trend(const struct BlDecomposition *dec, struct BlSignal **out);

// Copies the Dirichlet norms `‖G₀‖ … ‖G_depth‖` into `buf`; `written` receives
// the count (also on `BufferTooSmall`).
//
// # Safety
// `dec` must be a live handle, `buf` must hold `cap` doubles, `written` writable.
enum BlStatus bl_decomposition_dirichlet_norms(const struct BlDecomposition *dec,
                                               double *buf,
                                               size_t cap,
                                               size_t *written);

// # Safety
// `dec` must be null or a handle not yet freed.
void bl_decomposition_free(struct BlDecomposition *dec);

// `F = B·G`; either out-parameter may be null if that factor is not wanted.
//
// # Safety
// `sig` must be a live handle; non-null outputs must be writable.
enum BlStatus bl_weiss_factorize(const struct BlSignal *sig,
                                 double eps,
                                 struct BlSignal **blaschke_out,
                                 struct BlSignal **outer_out);

// Winding number of a closed boundary curve (unrounded).
//
// # Safety
// `sig` must be a live handle and `out` writable.
enum BlStatus bl_winding_number(const struct BlSignal *sig, double *out);

// Winding of the Blaschke factor at each of `count` increasing radii in (0, 1).
// Radii skipped as too close to a root get `INT64_MIN`.
//
// # Safety
// `sig` must be a live handle; `radii` must hold `count` doubles and `windings`
// `count` writable integers.
enum BlStatus bl_root_scan(const struct BlSignal *sig,
                           const double *radii,
                           size_t count,
                           double eps,
                           int64_t *windings);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BLASCHKE_H */
