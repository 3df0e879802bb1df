/*
 * fpboot: bootstrap inference for samples drawn without replacement from a
 * finite population.
 *
 * Every function that can fail returns an fpb_status; on failure a message is
 * available from fpb_last_error() on the calling thread until the next failing
 * call. Objects are opaque and owned by the caller once returned through an
 * `out` pointer; release them with the matching *_free function.
 */
#ifndef FPBOOT_H
#define FPBOOT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(FPBOOT_BUILDING)
#    define FPBOOT_API __declspec(dllexport)
#  else
#    define FPBOOT_API __declspec(dllimport)
#  endif
#else
#  define FPBOOT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fpb_status {
  FPB_OK = 0,
  FPB_ERR_INVALID_ARGUMENT = 1,
  FPB_ERR_VALIDATION = 2,
  FPB_ERR_DEGENERATE = 3,
  FPB_ERR_IO = 4,
  FPB_ERR_PARSE = 5,
  FPB_ERR_INTERNAL = 6
} fpb_status;

typedef enum fpb_estimator { FPB_MNCS = 0, FPB_PP_TOP10 = 1 } fpb_estimator;

typedef enum fpb_method { FPB_STANDARD = 0, FPB_PPB = 1, FPB_MIRROR = 2 } fpb_method;

typedef enum fpb_ci {
  FPB_CI_NORMAL = 0,
  FPB_CI_PERCENTILE = 1,
  FPB_CI_BCA = 2,
  FPB_CI_BOOT_T = 3
} fpb_ci;

typedef enum fpb_format { FPB_FORMAT_CSV = 0, FPB_FORMAT_JSON = 1 } fpb_format;

typedef struct fpb_population fpb_population;
typedef struct fpb_config fpb_config;
typedef struct fpb_report fpb_report;

FPBOOT_API const char* fpb_version(void);
FPBOOT_API const char* fpb_last_error(void);
FPBOOT_API const char* fpb_status_name(fpb_status status);

/* Name <-> enum mapping ("mncs", "pp_top10"; "standard", "ppb", "mirror";
 * "normal", "percentile", "bca", "boot-t"; "csv", "json"). */
FPBOOT_API fpb_status fpb_parse_estimator(const char* name, fpb_estimator* out);
FPBOOT_API fpb_status fpb_parse_method(const char* name, fpb_method* out);
FPBOOT_API fpb_status fpb_parse_ci(const char* name, fpb_ci* out);
FPBOOT_API fpb_status fpb_parse_format(const char* name, fpb_format* out);
FPBOOT_API const char* fpb_estimator_name(fpb_estimator e);
FPBOOT_API const char* fpb_method_name(fpb_method m);
FPBOOT_API const char* fpb_ci_name(fpb_ci c);

/* ---- populations -------------------------------------------------------- */

FPBOOT_API fpb_status fpb_population_load(const char* path, fpb_population** out);
FPBOOT_API fpb_status fpb_population_from_records(const double* ncs, const uint8_t* top10,
                                                  size_t count, fpb_population** out);
/* Log-normal synthetic population; seed selects the random stream. */
FPBOOT_API fpb_status fpb_population_synth(size_t N, double mncs, double pp, double shape,
                                           uint64_t seed, fpb_population** out);
FPBOOT_API fpb_status fpb_population_save(const fpb_population* pop, const char* path);
FPBOOT_API size_t fpb_population_size(const fpb_population* pop);
/* FNV-1a 64 of the CSV bytes, 16 hex digits. */
FPBOOT_API const char* fpb_population_hash(const fpb_population* pop);
FPBOOT_API fpb_status fpb_population_estimate(const fpb_population* pop, fpb_estimator e,
                                              double* out);
FPBOOT_API void fpb_population_free(fpb_population* pop);

/* ---- single-sample inference -------------------------------------------- */

FPBOOT_API fpb_status fpb_fpc(size_t n, size_t N, double* one_minus_f, double* bias_adjusted);

typedef struct fpb_estimate_request {
  fpb_estimator estimator;
  fpb_method method;
  fpb_ci ci;
  size_t B;
  double level;
  uint64_t seed;
  /* Size of the population the sample was drawn from; 0 means the sample is
   * the whole population. */
  size_t population_size;
} fpb_estimate_request;

typedef struct fpb_estimate_result {
  double estimate;
  double bootstrap_variance;
  /* sqrt(s^2/n) * sqrt((N-n)/(N-1)) */
  double se_fpc;
  double lower;
  double upper;
  size_t n;
  size_t population_size;
  /* Nonzero when a BCa request fell back to the percentile interval. */
  int fell_back;
} fpb_estimate_result;

FPBOOT_API void fpb_estimate_request_init(fpb_estimate_request* req);
FPBOOT_API fpb_status fpb_estimate(const fpb_population* sample, const fpb_estimate_request* req,
                                   fpb_estimate_result* out);

/* ---- study configuration ------------------------------------------------ */

/* JSON run-config file; unknown keys are rejected. */
FPBOOT_API fpb_status fpb_config_load(const char* path, fpb_config** out);
FPBOOT_API fpb_status fpb_config_new(fpb_config** out);
FPBOOT_API void fpb_config_free(fpb_config* cfg);

FPBOOT_API fpb_status fpb_config_set_population_path(fpb_config* cfg, const char* path);
FPBOOT_API fpb_status fpb_config_set_synth(fpb_config* cfg, size_t N, double mncs, double pp,
                                           double shape);
FPBOOT_API fpb_status fpb_config_set_sample_sizes(fpb_config* cfg, const size_t* sizes,
                                                  size_t count);
FPBOOT_API fpb_status fpb_config_set_B(fpb_config* cfg, size_t B);
FPBOOT_API fpb_status fpb_config_set_reps(fpb_config* cfg, size_t reps);
FPBOOT_API fpb_status fpb_config_set_level(fpb_config* cfg, double level);
FPBOOT_API fpb_status fpb_config_set_seed(fpb_config* cfg, uint64_t seed);
/* 0 = all cores. Never affects results. */
FPBOOT_API fpb_status fpb_config_set_threads(fpb_config* cfg, unsigned threads);
FPBOOT_API fpb_status fpb_config_set_methods(fpb_config* cfg, const fpb_method* methods,
                                             size_t count);
/* count == 0 restores the per-method default interval set. */
FPBOOT_API fpb_status fpb_config_set_ci_types(fpb_config* cfg, const fpb_ci* cis, size_t count);
FPBOOT_API fpb_status fpb_config_set_estimators(fpb_config* cfg, const fpb_estimator* estimators,
                                                size_t count);
FPBOOT_API fpb_status fpb_config_set_ppb_fixed_completion(fpb_config* cfg, int fixed);

/* What a loaded config already sets, so callers only fill in the gaps. */
FPBOOT_API int fpb_config_has_population(const fpb_config* cfg);
FPBOOT_API size_t fpb_config_sample_size_count(const fpb_config* cfg);
FPBOOT_API size_t fpb_config_method_count(const fpb_config* cfg);
FPBOOT_API size_t fpb_config_ci_count(const fpb_config* cfg);
FPBOOT_API size_t fpb_config_estimator_count(const fpb_config* cfg);

/* Output settings carried by a config file; NULL / nonzero return when unset. */
FPBOOT_API const char* fpb_config_out(const fpb_config* cfg);
FPBOOT_API int fpb_config_format(const fpb_config* cfg, fpb_format* out);

/* ---- studies and reports ------------------------------------------------- */

/* Loads or synthesizes the configured population and runs every cell. */
FPBOOT_API fpb_status fpb_study_run(const fpb_config* cfg, fpb_report** out);

typedef struct fpb_cell {
  size_t n;
  fpb_method method;
  fpb_ci ci;
  fpb_estimator estimator;
  double coverage;
  double avg_length;
  double avg_variance;
  size_t covered;
  size_t r_effective;
  size_t fallbacks;
} fpb_cell;

FPBOOT_API size_t fpb_report_cell_count(const fpb_report* report);
FPBOOT_API fpb_status fpb_report_cell(const fpb_report* report, size_t index, fpb_cell* out);
FPBOOT_API fpb_status fpb_report_true_value(const fpb_report* report, fpb_estimator e, double* out);
/* path "-" writes to stdout. */
FPBOOT_API fpb_status fpb_report_write(const fpb_report* report, fpb_format format,
                                       const char* path);
/* Length-vs-n table, one row per sample size. */
FPBOOT_API fpb_status fpb_report_write_sweep(const fpb_report* report, const char* path);
FPBOOT_API fpb_status fpb_report_load_json(const char* path, fpb_report** out);
FPBOOT_API void fpb_report_free(fpb_report* report);

#ifdef __cplusplus
}
#endif

#endif /* FPBOOT_H */
