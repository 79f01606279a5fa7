/*
 * bho - bilevel hyperparameter optimization over second-order cones.
 *
 * C interface to the core library: opaque handles, integer status codes,
 * JSON strings across the boundary. All returned strings are owned by the
 * handle they were queried from and stay valid until it is freed; the
 * error message is thread-local.
 */
#ifndef BHO_H
#define BHO_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bho_status {
    BHO_OK = 0,
    BHO_ERROR_INVALID_ARGUMENT = 1,
    BHO_ERROR_IO = 2,
    BHO_ERROR_SOLVER = 3,
    BHO_ERROR_UNSUPPORTED = 4,
    BHO_ERROR_INTERNAL = 5
} bho_status;

typedef struct bho_dataset bho_dataset;
typedef struct bho_result bho_result;

const char* bho_version(void);

/* Message describing the last failing call on this thread ("" if none). */
const char* bho_last_error(void);

/*
 * Create a dataset from a generator spec, e.g.
 *   {"kind":"elastic-net","seed":1,"ntr":50,"nval":20,"nte":100,"p":60}
 *   {"kind":"sgl","seed":1,"n":90,"p":180,"m":9}
 *   {"kind":"svm","seed":1,"n":100,"p":10}
 * Generators are deterministic in the seed.
 */
bho_status bho_dataset_generate(const char* json_spec, bho_dataset** out);

/* Load/save <stem>.csv or <stem>.libsvm plus the <stem>.json sidecar. */
bho_status bho_dataset_load(const char* stem, bho_dataset** out);
bho_status bho_dataset_save(const bho_dataset* dataset, const char* stem);

/* One-line-per-fact description of the dataset and its files. */
const char* bho_dataset_manifest(bho_dataset* dataset, const char* stem);

void bho_dataset_free(bho_dataset* dataset);

/*
 * Run one tuning method on a dataset. config is a JSON object:
 *   {"method":"ldmma"|"grid"|"random", "seed":1, "folds":3,
 *    "run":{"epsilon":0.01,"beta":1e-3,"lambda0":[...],"max_outer_iters":100,
 *           "step_tol":1e-6,"majorization":"auto","solver":{"max_iter":200,"tol":1e-8}},
 *    "grid":{"log10_lo":-5,"log10_hi":2,"points":10},
 *    "random":{"samples":100}}
 * Returns BHO_ERROR_SOLVER when the method aborted; the result handle is
 * still produced and carries the partial record.
 */
bho_status bho_run(const bho_dataset* dataset, const char* json_config, bho_result** out);

/* The benchmark row as JSON / CSV (header available separately). */
const char* bho_result_record_json(const bho_result* result);
const char* bho_result_record_csv(const bho_result* result);
const char* bho_result_csv_header(void);

/* Per-iteration trajectory (JSON lines); empty for grid/random. */
const char* bho_result_trajectory_jsonl(const bho_result* result);

/* Stationarity report of a converged run (JSON object, "{}" otherwise). */
const char* bho_result_report_json(const bho_result* result);

void bho_result_free(bho_result* result);

#ifdef __cplusplus
}
#endif

#endif /* BHO_H */
