/* C interface to the bpatch delta toolkit.
 *
 * Every function returns a bpatch_status. On failure a human-readable
 * message for the calling thread is available from bpatch_last_error()
 * until the next call on that thread. Buffers returned through
 * bpatch_buffer are owned by the caller and released with
 * bpatch_buffer_free(). Opaque handles are released with their matching
 * _destroy function; passing NULL to a destroy/free function is a no-op.
 */
#ifndef BPATCH_BPATCH_H
#define BPATCH_BPATCH_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(BPATCH_BUILDING_LIBRARY)
#    define BPATCH_API __declspec(dllexport)
#  else
#    define BPATCH_API __declspec(dllimport)
#  endif
#else
#  define BPATCH_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bpatch_status {
  BPATCH_OK = 0,
  BPATCH_E_INVALID_ARGUMENT = 1,
  BPATCH_E_ENCODING_RANGE = 2,
  BPATCH_E_TRUNCATED = 3,
  BPATCH_E_SIZE_LIMIT = 4,
  BPATCH_E_MALFORMED_SCRIPT = 5,
  BPATCH_E_PATCH_TOO_LARGE = 6,
  BPATCH_E_MALFORMED_PATCH = 7,
  BPATCH_E_IO = 8,
  BPATCH_E_VERIFICATION_FAILED = 9,
  BPATCH_E_CONFIG = 10,
  BPATCH_E_DIGEST_MISMATCH = 11,
  BPATCH_E_INTERNAL = 12
} bpatch_status;

typedef enum bpatch_mode { BPATCH_MODE_MINIMAL = 0, BPATCH_MODE_FAST = 1 } bpatch_mode;

typedef enum bpatch_scenario { BPATCH_SCENARIO_NU = 0, BPATCH_SCENARIO_MN = 1, BPATCH_SCENARIO_MJ = 2 } bpatch_scenario;

typedef enum bpatch_report_format { BPATCH_REPORT_CSV = 0, BPATCH_REPORT_JSON = 1 } bpatch_report_format;

typedef struct bpatch_buffer {
  uint8_t* data;
  size_t size;
} bpatch_buffer;

typedef struct bpatch_diff_options {
  bpatch_mode mode;
  uint32_t fast_cutoff; /* 0 selects the default */
} bpatch_diff_options;

typedef struct bpatch_diff_result {
  uint64_t old_bytes;
  uint64_t new_bytes;
  uint64_t patch_bytes;
  double compression_factor; /* new_bytes / patch_bytes */
  bpatch_scenario scenario;  /* meaningful when new_bytes > 0 */
} bpatch_diff_result;

typedef struct bpatch_patch_info {
  uint32_t body_bits;
  uint8_t wnbd_meta;
  uint8_t wnbc_meta;
  uint8_t wnba_meta;
  uint64_t triples;
  uint64_t discarded;
  uint64_t copied;
  uint64_t added;
  uint64_t patch_bytes;
} bpatch_patch_info;

typedef struct bpatch_estimate {
  uint64_t fragments;
  double duration_s;
  double energy_mAh;
} bpatch_estimate;

typedef struct bpatch_savings {
  bpatch_estimate full;
  bpatch_estimate incremental;
  double time_ratio; /* +inf when only the full update takes time */
  double energy_saving_mAh;
  double reconstruction_mAh;
  double net_saving_mAh;
} bpatch_savings;

typedef struct bpatch_profile bpatch_profile;
typedef struct bpatch_bench bpatch_bench;

/* Library and error reporting. */
BPATCH_API const char* bpatch_version(void);
BPATCH_API const char* bpatch_last_error(void);
BPATCH_API const char* bpatch_status_string(bpatch_status status);
BPATCH_API void bpatch_buffer_free(bpatch_buffer* buffer);

/* Patch generation and application over memory. options may be NULL (minimal). */
BPATCH_API bpatch_status bpatch_diff(const uint8_t* old_data, size_t old_size, const uint8_t* new_data, size_t new_size,
                                     const bpatch_diff_options* options, bpatch_buffer* patch_out);
BPATCH_API bpatch_status bpatch_apply(const uint8_t* old_data, size_t old_size, const uint8_t* patch, size_t patch_size,
                                      bpatch_buffer* new_out);
/* *matches is 1 when the patch turns old into expected_new. A patch that
 * fails to decode yields BPATCH_OK with *matches = 0; the reason is in
 * bpatch_last_error(). */
BPATCH_API bpatch_status bpatch_verify(const uint8_t* old_data, size_t old_size, const uint8_t* expected_new,
                                       size_t expected_size, const uint8_t* patch, size_t patch_size, int* matches);
BPATCH_API bpatch_status bpatch_inspect(const uint8_t* patch, size_t patch_size, bpatch_patch_info* info_out);

/* File-level operations. Outputs are written to a temporary file and
 * renamed into place on success, so a failed call never leaves a partial
 * output behind. result_out may be NULL. */
BPATCH_API bpatch_status bpatch_diff_files(const char* old_path, const char* new_path, const char* patch_path,
                                           const bpatch_diff_options* options, bpatch_diff_result* result_out);
/* expect_sha256_hex may be NULL; otherwise the SHA-256 of the output must
 * match (case-insensitive) or BPATCH_E_DIGEST_MISMATCH is returned and no
 * file is written. */
BPATCH_API bpatch_status bpatch_apply_files(const char* old_path, const char* patch_path, const char* out_path,
                                            const char* expect_sha256_hex, uint64_t* bytes_written);
BPATCH_API bpatch_status bpatch_inspect_file(const char* patch_path, bpatch_patch_info* info_out);
/* hex_out receives 64 hex characters and a terminating NUL. */
BPATCH_API bpatch_status bpatch_sha256_file(const char* path, char hex_out[65]);
BPATCH_API bpatch_status bpatch_file_size(const char* path, uint64_t* size_out);

/* FUOTA link profiles. */
BPATCH_API bpatch_status bpatch_profile_create(bpatch_profile** profile_out);
BPATCH_API void bpatch_profile_destroy(bpatch_profile* profile);
/* Overrides fields from a `key = value` file. */
BPATCH_API bpatch_status bpatch_profile_load(bpatch_profile* profile, const char* path);
BPATCH_API bpatch_status bpatch_profile_set(bpatch_profile* profile, const char* key, const char* value);
BPATCH_API bpatch_status bpatch_profile_get(const bpatch_profile* profile, const char* key, double* value_out);

BPATCH_API bpatch_status bpatch_estimate_update(const bpatch_profile* profile, uint64_t image_bytes,
                                                bpatch_estimate* estimate_out);
BPATCH_API bpatch_status bpatch_estimate_fragments(const bpatch_profile* profile, uint64_t fragments,
                                                   bpatch_estimate* estimate_out);
BPATCH_API bpatch_status bpatch_compare_strategies(const bpatch_profile* profile, uint64_t full_image_bytes,
                                                   uint64_t patch_bytes, bpatch_savings* savings_out);
BPATCH_API bpatch_status bpatch_classify(uint64_t patch_bytes, uint64_t image_bytes, bpatch_scenario* scenario_out);
BPATCH_API const char* bpatch_scenario_name(bpatch_scenario scenario);

/* Corpus benchmark. modes is a bit set of (1 << bpatch_mode). */
BPATCH_API bpatch_status bpatch_bench_run(const char* manifest_path, unsigned modes, uint32_t fast_cutoff,
                                          bpatch_bench** bench_out);
BPATCH_API void bpatch_bench_destroy(bpatch_bench* bench);
BPATCH_API size_t bpatch_bench_row_count(const bpatch_bench* bench);
BPATCH_API bpatch_status bpatch_bench_report(const bpatch_bench* bench, bpatch_report_format format, int timings,
                                             bpatch_buffer* report_out);

/* Synthetic corpus: image_bytes random base image, then `steps` versions
 * each mutating its predecessor at the matching rate (fraction of bytes
 * touched by flips and block inserts/deletes). Writes v0.bin.. and
 * manifest.tsv into dir. */
BPATCH_API bpatch_status bpatch_synth_corpus(const char* dir, uint64_t image_bytes, uint64_t seed, const double* rates,
                                             size_t steps);

#ifdef __cplusplus
}
#endif

#endif /* BPATCH_BPATCH_H */
