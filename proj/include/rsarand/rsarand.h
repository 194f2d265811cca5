#ifndef RSARAND_RSARAND_H
#define RSARAND_RSARAND_H

/* C interface to the rsarand generator library.
 *
 * Every function returns an rsarand_status; on failure a description of the
 * most recent error on the calling thread is available from
 * rsarand_last_error(). Handles are opaque and owned by the caller, who
 * releases them with the matching *_free function. Strings returned through
 * char** out-parameters are released with rsarand_string_free. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(RSARAND_BUILDING)
#    define RSARAND_API __declspec(dllexport)
#  else
#    define RSARAND_API __declspec(dllimport)
#  endif
#else
#  define RSARAND_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rsarand_status {
  RSARAND_OK = 0,
  RSARAND_E_INVALID_ARGUMENT = 1,
  RSARAND_E_INVALID_PARAMS = 2,
  RSARAND_E_INVALID_SEED = 3,
  RSARAND_E_NOT_INVERTIBLE = 4,
  RSARAND_E_NOT_FOUND = 5,
  RSARAND_E_DERIVATION_EXHAUSTED = 6,
  RSARAND_E_UNSUPPORTED_SKIP_MODE = 7,
  RSARAND_E_MALFORMED_SNAPSHOT = 8,
  RSARAND_E_INSUFFICIENT_SAMPLES = 9,
  RSARAND_E_TIE_DETECTED = 10,
  RSARAND_E_IO = 11,
  RSARAND_E_INTERNAL = 12
} rsarand_status;

typedef enum rsarand_skip_kind {
  RSARAND_SKIP_LCG = 0,
  RSARAND_SKIP_UNIT = 1,
  RSARAND_SKIP_CONSTANT = 2
} rsarand_skip_kind;

typedef enum rsarand_selector {
  RSARAND_SELECT_FLOAT_LEADING = 0,
  RSARAND_SELECT_RAW_LOW_BITS = 1,
  RSARAND_SELECT_RAW_WORD = 2
} rsarand_selector;

typedef enum rsarand_input_format {
  RSARAND_INPUT_F64LE = 0,
  RSARAND_INPUT_RAW64 = 1
} rsarand_input_format;

typedef enum rsarand_report_format {
  RSARAND_REPORT_TEXT = 0,
  RSARAND_REPORT_JSON = 1
} rsarand_report_format;

typedef struct rsarand_params rsarand_params;
typedef struct rsarand_stream rsarand_stream;
typedef struct rsarand_source rsarand_source;
typedef struct rsarand_report rsarand_report;

typedef struct rsarand_params_info {
  uint64_t p1, p2, n, e, q, a, q1, q2, p2inv, b;
  rsarand_skip_kind skip_kind;
  uint64_t skip_value; /* constant skip only */
  int test_mode;
} rsarand_params_info;

typedef struct rsarand_test_result {
  const char* name;     /* valid while the report lives */
  const char* params;
  const char* message;  /* empty unless skipped or failed with an error */
  rsarand_selector selector;
  uint64_t samples;
  double statistic;
  uint64_t dof;
  double p_value;
  int status;           /* 0 completed, 1 skipped, 2 error */
  int pass_1e3;
  int pass_1e6;
} rsarand_test_result;

typedef struct rsarand_report_summary {
  uint64_t completed, skipped, errors, outside_1e6, outside_1e3;
  double expected_outside_1e3, sigma_outside_1e3;
  int rate_consistent;
  int passed;
} rsarand_report_summary;

typedef void (*rsarand_selftest_callback)(const char* suite, int passed, const char* detail,
                                          double seconds, void* user);

RSARAND_API const char* rsarand_version(void);
RSARAND_API const char* rsarand_last_error(void);
RSARAND_API const char* rsarand_status_name(rsarand_status status);
RSARAND_API void rsarand_string_free(char* s);

/* Parameters. */
RSARAND_API rsarand_status rsarand_params_derive(uint64_t master_seed, uint64_t stream_id, uint64_t e,
                                                 rsarand_params** out);
RSARAND_API rsarand_status rsarand_params_from_text(const char* text, rsarand_params** out);
RSARAND_API rsarand_status rsarand_params_to_text(const rsarand_params* params, char** out);
RSARAND_API rsarand_status rsarand_params_get_info(const rsarand_params* params, rsarand_params_info* out);
RSARAND_API rsarand_status rsarand_params_with_skip_mode(const rsarand_params* params, rsarand_skip_kind kind,
                                                         uint64_t value, rsarand_params** out);
/* Replaces the skip multiplier. test_mode permits weak multipliers such as
 * 3 and relaxes the production checks on the whole parameter set. */
RSARAND_API rsarand_status rsarand_params_with_multiplier(const rsarand_params* params, uint64_t a,
                                                          int test_mode, rsarand_params** out);
RSARAND_API rsarand_status rsarand_params_with_exponent(const rsarand_params* params, uint64_t e,
                                                        int test_mode, rsarand_params** out);
RSARAND_API void rsarand_params_free(rsarand_params* params);

/* Streams. lanes == 1 gives the scalar generator; lanes > 1 the
 * lane-vectorized one, whose output is the block-major lane interleave. */
RSARAND_API rsarand_status rsarand_stream_create(const rsarand_params* params, uint64_t m0, uint64_t s0,
                                                 uint32_t lanes, rsarand_stream** out);
RSARAND_API rsarand_status rsarand_stream_restore(const char* snapshot_text, rsarand_stream** out);
RSARAND_API rsarand_status rsarand_stream_snapshot(const rsarand_stream* stream, char** out);
RSARAND_API rsarand_status rsarand_stream_set_threads(rsarand_stream* stream, unsigned threads);
RSARAND_API rsarand_status rsarand_stream_next_f64(rsarand_stream* stream, double* out, size_t count);
RSARAND_API rsarand_status rsarand_stream_next_raw(rsarand_stream* stream, uint64_t* out, size_t count);
RSARAND_API rsarand_status rsarand_stream_modulus(const rsarand_stream* stream, uint64_t* n);
RSARAND_API void rsarand_stream_free(rsarand_stream* stream);

/* Sources for the test battery. rsarand_source_from_stream takes ownership
 * of the stream; do not free it afterwards. */
RSARAND_API rsarand_status rsarand_source_from_stream(rsarand_stream* stream, rsarand_source** out);
/* Interstream protocol: streams first_stream .. first_stream+count-1 of the
 * master seed, each with its own prime pair, all switched to one common
 * multiplier, seeded m0 = 0 and s0 = 1, drawn round-robin. */
RSARAND_API rsarand_status rsarand_source_interleaved(uint64_t master_seed, uint64_t first_stream,
                                                      uint32_t count, uint64_t e, rsarand_source** out);
/* path "-" reads standard input. raw64 input needs the stream modulus. */
RSARAND_API rsarand_status rsarand_source_from_file(const char* path, rsarand_input_format format,
                                                    uint64_t modulus, rsarand_source** out);
RSARAND_API void rsarand_source_free(rsarand_source* source);

/* Battery. tests is a comma-separated list of test names or groups
 * ("all", "lsb", "serial", "collision"); NULL or "" selects every test.
 * samples is the per-test budget. */
RSARAND_API rsarand_status rsarand_battery_run(rsarand_source* source, uint64_t samples, const char* tests,
                                               rsarand_report** out);
RSARAND_API rsarand_status rsarand_battery_test_names(char** out);
RSARAND_API size_t rsarand_report_count(const rsarand_report* report);
RSARAND_API rsarand_status rsarand_report_get(const rsarand_report* report, size_t index,
                                              rsarand_test_result* out);
RSARAND_API rsarand_status rsarand_report_summary_get(const rsarand_report* report,
                                                      rsarand_report_summary* out);
RSARAND_API rsarand_status rsarand_report_to_string(const rsarand_report* report, rsarand_report_format format,
                                                 char** out);
RSARAND_API void rsarand_report_free(rsarand_report* report);

/* Self-test. suites is a comma-separated list or NULL for all; *all_passed
 * receives 1 when every suite passed. */
RSARAND_API rsarand_status rsarand_selftest(const char* suites, rsarand_selftest_callback callback, void* user,
                                            int* all_passed);

#ifdef __cplusplus
}
#endif

#endif /* RSARAND_RSARAND_H */
