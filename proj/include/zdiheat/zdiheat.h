/* C interface to the zdiheat library. All handles are opaque; every call
 * returns a zdh_status and, on failure, leaves a message retrievable with
 * zdh_last_error() on the calling thread. */
#ifndef ZDIHEAT_H
#define ZDIHEAT_H

#include <stddef.h>

#if defined(_WIN32)
#  if defined(ZDH_BUILDING_LIBRARY)
#    define ZDH_API __declspec(dllexport)
#  else
#    define ZDH_API __declspec(dllimport)
#  endif
#else
#  define ZDH_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum zdh_status {
  ZDH_OK = 0,
  ZDH_ERR_INVALID_ARGUMENT = 1,
  ZDH_ERR_CONFIG = 2,
  ZDH_ERR_IO = 3,
  ZDH_ERR_OVERFLOW_AT_ORDER = 4,
  ZDH_ERR_INSUFFICIENT_DATA = 5,
  ZDH_ERR_NEAR_SINGULAR = 6,
  ZDH_ERR_TRUNCATION_FAILURE = 7,
  ZDH_ERR_DIVERGENT_SERIES = 8,
  ZDH_ERR_UNSTABLE_STEP = 9,
  ZDH_ERR_SNAP_TOO_LARGE = 10,
  ZDH_ERR_INTERNAL = 99
} zdh_status;

typedef enum zdh_bump_form { ZDH_BUMP_STANDARD = 0, ZDH_BUMP_PRINTED = 1 } zdh_bump_form;

typedef struct zdh_config zdh_config;
typedef struct zdh_report zdh_report;

/* Message of the last failed call on this thread ("" if none). */
ZDH_API const char* zdh_last_error(void);
/* Pipeline stage of the last failed run ("" if none or not stage-related). */
ZDH_API const char* zdh_last_stage(void);
ZDH_API const char* zdh_status_name(zdh_status status);
/* 1 for failures in config/argument validation, 0 for numeric failures. */
ZDH_API int zdh_last_error_is_validation(void);

ZDH_API zdh_status zdh_config_default(zdh_config** out);
ZDH_API zdh_status zdh_config_load(const char* path, zdh_config** out);
ZDH_API zdh_status zdh_config_parse(const char* text, zdh_config** out);
ZDH_API zdh_status zdh_config_set(zdh_config* config, const char* key, const char* value);
/* Canonical text of the config; free with zdh_string_free. */
ZDH_API zdh_status zdh_config_format(const zdh_config* config, char** out);
ZDH_API void zdh_config_free(zdh_config* config);

/* Runs the full pipeline. out_dir may be NULL to use output.dir. */
ZDH_API zdh_status zdh_run(const zdh_config* config, const char* out_dir, zdh_report** out);
ZDH_API size_t zdh_report_actuators(const zdh_report* report);
ZDH_API zdh_status zdh_report_achieved_order(const zdh_report* report, size_t j, size_t* out);
ZDH_API double zdh_report_final_max_error(const zdh_report* report);
ZDH_API double zdh_report_max_target(const zdh_report* report);
ZDH_API double zdh_report_midpoint_error(const zdh_report* report);
ZDH_API double zdh_report_model_discrepancy(const zdh_report* report);
ZDH_API double zdh_report_condition(const zdh_report* report);
ZDH_API double zdh_report_runtime(const zdh_report* report);
/* report.txt contents; owned by the report. */
ZDH_API const char* zdh_report_text(const zdh_report* report);
ZDH_API void zdh_report_free(zdh_report* report);

/* Invariant table as text (free with zdh_string_free); *all_passed is 1 when
 * every check passed. */
ZDH_API zdh_status zdh_verify(const zdh_config* config, char** table, int* all_passed);

/* Runs one experiment per value; writes <out_dir>/summary.csv. *failed gets
 * the number of runs that ended in an error. */
ZDH_API zdh_status zdh_sweep(const zdh_config* config, const char* parameter, const double* values,
                             size_t count, const char* out_dir, size_t workers, size_t* failed);

ZDH_API void zdh_string_free(char* s);

/* Numerical building blocks. */
ZDH_API zdh_status zdh_green_eval(double x, double zeta, double k0, double k1, double* out);
ZDH_API zdh_status zdh_phi(double t, double sigma, double duration, zdh_bump_form form, double* out);
/* out receives order + 1 values. */
ZDH_API zdh_status zdh_phi_jet(double t, double sigma, double duration, zdh_bump_form form,
                               size_t order, double* out);
/* alpha_bar and ybar receive m values each. */
ZDH_API zdh_status zdh_static_plan(const double* points, size_t m, double k0, double k1,
                                   const double* target, double* alpha_bar, double* ybar);

#ifdef __cplusplus
}
#endif

#endif /* ZDIHEAT_H */
