#ifndef PCTELE_H
#define PCTELE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PcteleStatus {
  PCTELE_STATUS_OK = 0,
  PCTELE_STATUS_NULL_POINTER = 1,
  PCTELE_STATUS_INVALID_ARGUMENT = 2,
  PCTELE_STATUS_INVALID_CHANNEL = 3,
  PCTELE_STATUS_NOT_NORMALIZED = 4,
  PCTELE_STATUS_INTERNAL = 5,
  PCTELE_STATUS_PANIC = 6,
} PcteleStatus;

typedef enum PcteleMode {
  PCTELE_MODE_EXACT = 0,
  PCTELE_MODE_SAMPLE = 1,
} PcteleMode;

typedef enum PcteleCircuit {
  PCTELE_CIRCUIT_U1 = 0,
  PCTELE_CIRCUIT_U2 = 1,
  PCTELE_CIRCUIT_CHANNEL1 = 2,
  PCTELE_CIRCUIT_CHANNEL2 = 3,
} PcteleCircuit;

// Real channel coefficients: 2 for the one-qubit protocol, 4 for two.
typedef struct PcteleChannel PcteleChannel;

// Seeded random stream for sampled runs.
typedef struct PcteleRng PcteleRng;

// Result of one sampled run.
typedef struct PcteleTrial {
  // 1 when the auxiliary qubit read 0.
  int32_t success;
  // Bell code(s), controller bit, auxiliary bit; `num_outcomes` are valid.
  uint8_t outcomes[4];
  size_t num_outcomes;
  // Fidelity with the input, or -1 on failure.
  double fidelity;
} PcteleTrial;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
// Valid until the next call on the same thread.
const char *pctele_last_error(void);

// Library version as a static NUL-terminated string.
const char *pctele_version(void);

// Validates `betas[0..len]` and stores a new channel in `*out`.
//
// # Safety
// `betas` must point to `len` doubles and `out` must be writable.
enum PcteleStatus pctele_channel_new(const double *betas, size_t len, struct PcteleChannel **out);

// # Safety
// `channel` must come from [`pctele_channel_new`] and not be used again.
void pctele_channel_free(struct PcteleChannel *channel);

// Number of coefficients (2 or 4), or 0 for a null handle.
//
// # Safety
// `channel` must be null or a live handle.
size_t pctele_channel_len(const struct PcteleChannel *channel);

// Closed-form success probability for the protocol matching the channel.
//
// # Safety
// `channel` must be a live handle and `out` writable.
enum PcteleStatus pctele_success_probability(const struct PcteleChannel *channel, double *out);

// Success probability summed over the exact branch enumeration.
//
// # Safety
// `alpha` must point to `2 * alpha_len` doubles; `channel` live; `out` writable.
enum PcteleStatus pctele_exact_success_probability(const struct PcteleChannel *channel,
                                                   const double *alpha,
                                                   size_t alpha_len,
                                                   double *out);

// New stream for trial `stream` under `seed`. Never null.
struct PcteleRng *pctele_rng_new(uint64_t seed, uint64_t stream);

// # Safety
// `rng` must come from [`pctele_rng_new`] and not be used again.
void pctele_rng_free(struct PcteleRng *rng);

// One sampled protocol run.
//
// # Safety
// Pointers must be valid as for [`pctele_exact_success_probability`]; `rng`
// must be a live handle and `out` writable.
enum PcteleStatus pctele_teleport(const struct PcteleChannel *channel,
                                  const double *alpha,
                                  size_t alpha_len,
                                  struct PcteleRng *rng,
                                  struct PcteleTrial *out);

// JSON report, the same document the command line prints with
// `--output json`. `trials` and `seed` are ignored in exact mode.
//
// # Safety
// Pointers as for [`pctele_exact_success_probability`]; `out` writable.
enum PcteleStatus pctele_report_json(const struct PcteleChannel *channel,
                                     const double *alpha,
                                     size_t alpha_len,
                                     enum PcteleMode mode,
                                     uint64_t trials,
                                     uint64_t seed,
                                     char **out);

// Gate netlist for `circuit`, ending with a `# max_deviation` line.
//
// # Safety
// `channel` must be a live handle and `out` writable.
enum PcteleStatus pctele_netlist(enum PcteleCircuit circuit,
                                 const struct PcteleChannel *channel,
                                 char **out);

// Amplitudes of the channel state as interleaved `(re, im)` pairs; `out`
// must hold `2 * 2^n` doubles where `n` is 3 or 5 qubits.
//
// # Safety
// `channel` must be a live handle and `out` must have room for `out_len` doubles.
enum PcteleStatus pctele_channel_state(const struct PcteleChannel *channel,
                                       double *out,
                                       size_t out_len);

// # Safety
// `s` must be null or a string returned by this library, not freed before.
void pctele_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PCTELE_H */
