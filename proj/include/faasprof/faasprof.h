#ifndef FAASPROF_FAASPROF_H
#define FAASPROF_FAASPROF_H

#include <stddef.h>

#if defined(_WIN32)
#define FP_API __declspec(dllexport)
#elif defined(__GNUC__)
#define FP_API __attribute__((visibility("default")))
#else
#define FP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fp_status {
  FP_OK = 0,
  FP_ERR_ARGUMENT = 1, /* null pointer or out-of-range argument */
  FP_ERR_CONFIG = 2,
  FP_ERR_CAPACITY = 3,
  FP_ERR_DATA = 4,
  FP_ERR_NUMERIC = 5,
  FP_ERR_IO = 6,
  FP_ERR_FORMAT = 7,
  FP_ERR_VERSION = 8,
  FP_ERR_CHECKSUM = 9,
  FP_ERR_STATE = 10,
  FP_ERR_INTERNAL = 11
} fp_status;

typedef struct fp_campaign fp_campaign;
typedef struct fp_model fp_model;
typedef struct fp_model_set fp_model_set;

FP_API const char* fp_version(void);
FP_API const char* fp_status_name(fp_status status);
/* Message of the last failed call on this thread; "" after a success. */
FP_API const char* fp_last_error(void);
/* Frees strings returned through char** out-parameters. */
FP_API void fp_string_free(char* s);

/* ---- campaigns ---- */

typedef struct fp_counts {
  size_t testing_units;
  size_t deployments;
  size_t configurations;
  size_t train_configurations;
  size_t test_configurations;
  size_t planned_runs;
} fp_counts;

typedef struct fp_run_options {
  int jobs;          /* parallel runs; < 1 means 1 */
  long stop_after;   /* stop after this many runs; < 0 runs everything */
  const char* output_dir; /* NULL keeps the spec's directory */
} fp_run_options;

typedef struct fp_run_summary {
  size_t planned;
  size_t succeeded; /* traces available, including resumed runs */
  size_t executed;  /* runs performed by this call */
  size_t failed;
  int complete;
} fp_run_summary;

FP_API fp_status fp_campaign_load(const char* path, fp_campaign** out);
FP_API void fp_campaign_free(fp_campaign* c);
FP_API fp_status fp_campaign_counts(const fp_campaign* c, fp_counts* out);
/* Canonical JSON of the parsed spec. */
FP_API fp_status fp_campaign_describe(const fp_campaign* c, char** json_out);
/* One line per testing unit, deployment, or configuration (what: 0, 1, 2). */
FP_API fp_status fp_campaign_list(const fp_campaign* c, int what, char** text_out);
FP_API fp_status fp_campaign_run(fp_campaign* c, const fp_run_options* options, fp_run_summary* out);

/* ---- training ---- */

typedef struct fp_train_options {
  const char* input;      /* NULL keeps DataPreparation.input_path */
  const char* output_dir; /* NULL keeps General.output_dir */
  int jobs;               /* < 1 keeps General.jobs */
} fp_train_options;

/* Runs every experiment, writes leaderboard.csv, leaderboard.txt and
   model.fpm into the output directory, and returns the leaderboard text. */
FP_API fp_status fp_train(const char* config_path, const fp_train_options* options, char** leaderboard_out);

/* ---- models ---- */

FP_API fp_status fp_model_load(const char* path, fp_model** out);
FP_API void fp_model_free(fp_model* m);
/* Predicts `rows` rows of raw inputs given as a row-major matrix whose
   columns are named by `names`. */
FP_API fp_status fp_model_predict(const fp_model* m, const char* const* names, size_t n_names, const double* values,
                                  size_t rows, double* out);
FP_API fp_status fp_model_describe(const fp_model* m, char** json_out);

FP_API fp_status fp_model_set_load(const char* manifest_path, fp_model_set** out);
FP_API void fp_model_set_free(fp_model_set* s);
FP_API size_t fp_model_set_size(const fp_model_set* s);

/* cores[k] is the parallelism of component k in chain order; NaN when the
   component runs unbounded. */
FP_API fp_status fp_predict_async(const fp_model_set* s, const double* cores, size_t n, int batch_size,
                                  double* total_out, double* naive_out);
FP_API fp_status fp_predict_sync(const fp_model_set* s, const double* cores, size_t n, double lambda, int propagate,
                                 double* total_out);
FP_API fp_status fp_predict_sweep(const fp_model_set* s, const char* sweep_csv, const char* out_csv, int propagate);

/* ---- reports ---- */

FP_API fp_status fp_report(const char* dir, char** text_out);

#ifdef __cplusplus
}
#endif

#endif
