/* Copyright 2026 The epochmesh Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the epochmesh core: epoch-ratcheted encryption, the
 * microbenchmarks, the network simulator and the CSV tooling, behind opaque
 * handles and integer status codes.
 *
 * Conventions:
 *   - every function returns EPM_OK (0) or a negative EPM_ERR_* code;
 *     epm_last_error() carries a human-readable detail for the calling
 *     thread,
 *   - out-parameters are written only on success,
 *   - returned buffers and strings are owned by the caller and released
 *     with epm_buffer_free() / epm_string_free(),
 *   - handles are released with their matching *_free(); NULL is tolerated.
 */

#ifndef EPOCHMESH_H
#define EPOCHMESH_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define EPM_OK 0
#define EPM_ERR_ARG (-1)       /* null pointer or malformed argument */
#define EPM_ERR_CONFIG (-2)    /* invalid configuration value */
#define EPM_ERR_PARSE (-3)     /* malformed bytes or text input */
#define EPM_ERR_CRYPTO (-4)    /* decryption failed: wrong key or epoch */
#define EPM_ERR_EXHAUSTED (-5) /* ratchet reached the end of its key tree */
#define EPM_ERR_RANGE (-6)     /* epoch outside the tree */
#define EPM_ERR_IO (-7)        /* file could not be read or written */
#define EPM_ERR_INTERNAL (-8)

const char* epm_version(void);
/* Static name for a status code. */
const char* epm_error_name(int code);
/* Thread-local detail message for the most recent failure ("" when none). */
const char* epm_last_error(void);

void epm_buffer_free(uint8_t* buf);
void epm_string_free(char* str);

/* ---- deterministic randomness ---- */

typedef struct epm_rng epm_rng;

int epm_rng_seeded(uint64_t seed, epm_rng** out);
int epm_rng_system(epm_rng** out);
void epm_rng_free(epm_rng* rng);

/* ---- epoch-ratcheted keys ---- */

typedef struct epm_public_key epm_public_key;
typedef struct epm_secret_key epm_secret_key;

/* Number of the last epoch of a tree of the given depth (2^(depth+1) - 2). */
int epm_max_epoch(uint32_t depth, uint64_t* out);
/* The identity path for an epoch, as a "0"/"1" string ("" for the root). */
int epm_epoch_identity(uint64_t epoch, uint32_t depth, char** out);

int epm_keygen(uint32_t depth, epm_rng* rng, epm_public_key** pk, epm_secret_key** sk);
void epm_public_key_free(epm_public_key* pk);
void epm_secret_key_free(epm_secret_key* sk);

int epm_public_key_epoch(const epm_public_key* pk, uint64_t* out);
int epm_public_key_depth(const epm_public_key* pk, uint32_t* out);
/* The public half of the ratchet: moving the epoch counter. */
int epm_public_key_set_epoch(epm_public_key* pk, uint64_t epoch);

int epm_secret_key_epoch(const epm_secret_key* sk, uint64_t* out);
int epm_secret_key_depth(const epm_secret_key* sk, uint32_t* out);
int epm_secret_key_stack_size(const epm_secret_key* sk, size_t* out);
/* One ratchet step; EPM_ERR_EXHAUSTED at the end of the tree. */
int epm_secret_key_update(epm_secret_key* sk, epm_rng* rng);
/* Ratchets forward until the key sits at the given epoch. */
int epm_secret_key_update_to(epm_secret_key* sk, uint64_t epoch, epm_rng* rng);

int epm_public_key_to_bytes(const epm_public_key* pk, uint8_t** out, size_t* out_len);
int epm_public_key_from_bytes(const uint8_t* data, size_t len, epm_public_key** out);
int epm_secret_key_to_bytes(const epm_secret_key* sk, uint8_t** out, size_t* out_len);
int epm_secret_key_from_bytes(const uint8_t* data, size_t len, epm_secret_key** out);

/* ---- encryption ---- */

int epm_encrypt(const epm_public_key* pk, uint64_t epoch, const uint8_t* msg, size_t msg_len,
                epm_rng* rng, uint8_t** out, size_t* out_len);
/* Uses the epoch carried by the ciphertext. EPM_ERR_CRYPTO covers both "not
 * addressed to this key" and "epoch key already deleted". */
int epm_decrypt(const epm_secret_key* sk, const uint8_t* ct, size_t ct_len, uint8_t** out,
                size_t* out_len);
int epm_ciphertext_epoch(const uint8_t* ct, size_t ct_len, uint64_t* out);

/* ---- tooling ---- */

/* Benchmark CSV: operation,size_bytes,iterations,mean_ns,stddev_ns. */
int epm_bench(uint32_t depth, const size_t* sizes, size_t n_sizes, uint32_t iterations,
              char** out_csv);
/* Runs a simulation campaign from a config file; writes runs.csv and
 * timeline_<seed>.csv into out_dir. jobs 0 means one worker per core. */
int epm_simulate(const char* config_path, const char* out_dir, uint32_t jobs);
/* Summarizes a runs.csv produced by epm_simulate. */
int epm_analyze(const char* runs_csv_path, char** out_summary_csv);
/* Converts raw motion data to the canonical trace CSV. */
int epm_trace_convert(const char* in_path, const char* out_path, const char* schema,
                      double time_scale, double pos_scale);

#ifdef __cplusplus
}
#endif

#endif /* EPOCHMESH_H */
