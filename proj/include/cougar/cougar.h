#ifndef COUGAR_H
#define COUGAR_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(COUGAR_BUILDING_LIBRARY)
#define COUGAR_API __declspec(dllexport)
#else
#define COUGAR_API __declspec(dllimport)
#endif
#else
#define COUGAR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cougar_status {
  COUGAR_OK = 0,
  COUGAR_ERR_INVALID_ARG = 1,  /* null handle, bad index, malformed argument */
  COUGAR_ERR_CONFIG = 2,       /* unknown key, bad value, inconsistent parameters */
  COUGAR_ERR_IO = 3,           /* unreadable input or unwritable output */
  COUGAR_ERR_TOPOLOGY = 4,     /* malformed trace, distribution or projection */
  COUGAR_ERR_INTERNAL = 5
} cougar_status;

typedef struct cougar_config cougar_config;
typedef struct cougar_report cougar_report;
typedef struct cougar_trace cougar_trace;
typedef struct cougar_topology cougar_topology;

/* Message of the most recent failure on the calling thread; "" if none. */
COUGAR_API const char* cougar_last_error(void);
COUGAR_API const char* cougar_version(void);

/* Configuration. Strings returned through out-parameters are owned by the
 * handle and stay valid until the next call on it. */
COUGAR_API cougar_status cougar_config_create(cougar_config** out);
COUGAR_API cougar_status cougar_config_load(const char* path, cougar_config** out);
COUGAR_API cougar_status cougar_config_apply_text(cougar_config* cfg, const char* text);
COUGAR_API cougar_status cougar_config_set(cougar_config* cfg, const char* key, const char* value);
COUGAR_API cougar_status cougar_config_get(cougar_config* cfg, const char* key, const char** value);
COUGAR_API cougar_status cougar_config_render(cougar_config* cfg, const char** text);
COUGAR_API cougar_status cougar_config_validate(const cougar_config* cfg);
COUGAR_API void cougar_config_destroy(cougar_config* cfg);

/* Experiments. */
COUGAR_API cougar_status cougar_run(const cougar_config* cfg, cougar_report** out);
COUGAR_API cougar_status cougar_report_write(const cougar_report* report, const char* dir);
/* weighting: 0 = nodes, 1 = mining power. *reached is 0 when the percentile
 * is never attained, in which case *time_us is left at 0. */
COUGAR_API cougar_status cougar_report_percentile(const cougar_report* report, double q, int weighting,
                                                  double* time_us, int* reached);
COUGAR_API cougar_status cougar_report_coverage(const cougar_report* report, double* fraction);
COUGAR_API cougar_status cougar_report_hash(const cougar_report* report, uint64_t* hash);
COUGAR_API size_t cougar_report_warning_count(const cougar_report* report);
COUGAR_API const char* cougar_report_warning(const cougar_report* report, size_t index);
COUGAR_API void cougar_report_destroy(cougar_report* report);

/* values: "a,b,c", "start:stop:step" or "all" (split axis only). */
COUGAR_API cougar_status cougar_sweep(const cougar_config* base, const char* axis, const char* values,
                                      const char* out_dir, size_t jobs, int fixed_seed, size_t* runs);
COUGAR_API cougar_status cougar_compare(const cougar_config* const* configs, size_t count, const char* out_dir,
                                        size_t jobs);

/* Latency traces and node placement. */
COUGAR_API cougar_status cougar_trace_synth(const cougar_config* cfg, uint64_t seed, cougar_trace** out);
COUGAR_API cougar_status cougar_trace_load(const char* rtt_csv, const char* servers_csv, cougar_trace** out);
COUGAR_API cougar_status cougar_trace_save(const cougar_trace* trace, const char* rtt_csv, const char* servers_csv);
COUGAR_API size_t cougar_trace_server_count(const cougar_trace* trace);
COUGAR_API void cougar_trace_destroy(cougar_trace* trace);

/* distribution_csv may be NULL for a uniform spread over servers. */
COUGAR_API cougar_status cougar_topology_project(const cougar_trace* trace, const char* distribution_csv, size_t n,
                                                 uint64_t seed, cougar_topology** out);
COUGAR_API size_t cougar_topology_size(const cougar_topology* topology);
COUGAR_API cougar_status cougar_topology_save(const cougar_topology* topology, const char* path);
COUGAR_API void cougar_topology_destroy(cougar_topology* topology);

#ifdef __cplusplus
}
#endif

#endif
