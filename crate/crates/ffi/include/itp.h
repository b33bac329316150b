#ifndef ITP_H
#define ITP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ItpFamilyKind {
  // `θ_i = a`.
  ITP_FAMILY_KIND_CONSTANT = 0,
  // `θ_i = a·i^(−b)`, `i ≥ start`.
  ITP_FAMILY_KIND_POWER_LAW = 1,
  // `θ_i = a·b^i`, `i ≥ 1`.
  ITP_FAMILY_KIND_GEOMETRIC = 2,
  // `1 − cos θ_i = a·i^(−b)`, `i ≥ start`.
  ITP_FAMILY_KIND_OVERLAP_POWER_LAW = 3,
} ItpFamilyKind;

typedef enum ItpSequence {
  ITP_SEQUENCE_CONTINUED_FRACTION = 0,
  ITP_SEQUENCE_BINOMIAL = 1,
} ItpSequence;

typedef enum ItpSpinPattern {
  ITP_SPIN_PATTERN_UP = 0,
  ITP_SPIN_PATTERN_DOWN = 1,
  ITP_SPIN_PATTERN_MIXED = 2,
} ItpSpinPattern;

typedef enum ItpStatus {
  ITP_STATUS_OK = 0,
  ITP_STATUS_NULL_POINTER = 1,
  ITP_STATUS_INVALID_ARGUMENT = 2,
  ITP_STATUS_DIMENSION = 3,
  ITP_STATUS_NORMALIZATION = 4,
  ITP_STATUS_TAIL_MISMATCH = 5,
  ITP_STATUS_UNSUPPORTED = 6,
  ITP_STATUS_PANIC = 7,
} ItpStatus;

typedef enum ItpVerdict {
  ITP_VERDICT_NONZERO_CONVERGENT = 0,
  ITP_VERDICT_ZERO_EXACT_FACTOR = 1,
  ITP_VERDICT_ZERO_DIVERGENT_SERIES = 2,
  ITP_VERDICT_ZERO_OSCILLATORY_PHASE = 3,
} ItpVerdict;

// An infinite product state.
typedef struct ItpProductState ItpProductState;

typedef struct ItpAngleFamily {
  enum ItpFamilyKind kind;
  double a;
  double b;
  uint64_t start;
} ItpAngleFamily;

typedef struct ItpOverlap {
  // `ln |⟨Ψ|Φ⟩|`; `-INFINITY` for the zero verdicts.
  double log_magnitude;
  // Phase in `(−π, π]`; meaningful only when `has_phase` is non-zero.
  double phase;
  int32_t has_phase;
  enum ItpVerdict verdict;
} ItpOverlap;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer
// stays valid until the next failing call on the same thread.
const char *itp_last_error_message(void);

// A state with `prefix_len` explicit factors followed by a constant tail,
// all of dimension `dim`. `prefix` holds `prefix_len * dim` amplitudes,
// `tail` holds `dim`.
//
// # Safety
// Pointers must be valid for the stated lengths; `out` must be writable.
enum ItpStatus itp_state_new_constant(size_t dim,
                                      const double *prefix,
                                      size_t prefix_len,
                                      const double *tail,
                                      struct ItpProductState **out);

// A qubit state whose tail factors are `R(θ_k)·base`. `prefix` holds
// `2 * prefix_len` amplitudes, `base` holds 2.
//
// # Safety
// Pointers must be valid for the stated lengths; `out` must be writable.
enum ItpStatus itp_state_new_rotated(const double *prefix,
                                     size_t prefix_len,
                                     const double *base,
                                     const struct ItpAngleFamily *angles,
                                     struct ItpProductState **out);

// The blocked spin chain with the sites in `flips` reversed.
//
// # Safety
// `flips` must hold `n_flips` entries; `out` must be writable.
enum ItpStatus itp_state_new_spin(enum ItpSpinPattern pattern,
                                  const size_t *flips,
                                  size_t n_flips,
                                  struct ItpProductState **out);

// A copy of `state` with factor `n` replaced by `dim` amplitudes.
//
// # Safety
// `state` must be a live handle; `amps` must hold `dim` amplitudes.
enum ItpStatus itp_state_with_factor(const struct ItpProductState *state,
                                     size_t n,
                                     const double *amps,
                                     size_t dim,
                                     struct ItpProductState **out);

// Releases a handle. Null is ignored.
//
// # Safety
// `state` must be null or a handle not yet freed.
void itp_state_free(struct ItpProductState *state);

// `⟨a|b⟩` with its verdict.
//
// # Safety
// `a`, `b` must be live handles; `out` must be writable.
enum ItpStatus itp_inner_product(const struct ItpProductState *a,
                                 const struct ItpProductState *b,
                                 struct ItpOverlap *out);

// `∏_{i<n} ⟨a_i|b_i⟩` as `re + i·im`.
//
// # Safety
// `a`, `b` must be live handles; `re`, `im` must be writable.
enum ItpStatus itp_truncated_overlap(const struct ItpProductState *a,
                                     const struct ItpProductState *b,
                                     size_t n,
                                     double *re,
                                     double *im);

// Writes 1 to `same_sector` when `Σ |1 − ⟨a_i|b_i⟩|` converges, else 0.
// `sum_estimate` (optional) receives the sum, or `INFINITY`.
//
// # Safety
// `a`, `b` must be live handles; `same_sector` must be writable;
// `sum_estimate` may be null.
enum ItpStatus itp_sector_equivalent(const struct ItpProductState *a,
                                     const struct ItpProductState *b,
                                     int32_t *same_sector,
                                     double *sum_estimate);

// Overlap of two `steps`-friend chains whose per-friend angles differ by a
// constant with cosine `cos_delta`: writes `∏ δ_i` and `exp(−Σ ε_i)`.
//
// # Safety
// `product` and `exp_approx` must be writable.
enum ItpStatus itp_constant_decay(double cos_delta,
                                  size_t steps,
                                  double *product,
                                  double *exp_approx);

// The `index`-th (0-based) element of a √2 sequence as `"p/q"` (or `"p"`).
// Release the string with [`itp_string_free`].
//
// # Safety
// `out` must be writable.
enum ItpStatus itp_sqrt2_term(enum ItpSequence sequence, size_t index, char **out);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must be null or a string from this library not yet freed.
void itp_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ITP_H */
