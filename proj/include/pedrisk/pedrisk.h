#ifndef PEDRISK_H
#define PEDRISK_H

/* C interface to the pedigree risk library. Every function returns a
 * pr_status; on failure pr_last_error() holds a message for the calling
 * thread until the next failing call. Out-parameters are written only on
 * PR_OK. Handles are opaque and freed with the matching *_free function;
 * strings returned through char** are freed with pr_string_free. */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pr_status {
  PR_OK = 0,
  PR_ERR_IO = 1,          /* file access or malformed input file */
  PR_ERR_VALIDATION = 2,  /* structurally invalid pedigree or config */
  PR_ERR_NUMERIC = 3,     /* computation cannot produce a finite answer */
  PR_ERR_INVALID_ARG = 4, /* bad handle, null pointer, out-of-range value */
} pr_status;

const char* pr_version(void);
const char* pr_last_error(void);
void pr_string_free(char* s);

typedef struct pr_cohort pr_cohort;
typedef struct pr_penetrance pr_penetrance;
typedef struct pr_reference pr_reference;
typedef struct pr_model pr_model;

/* Penetrance tables. sex: 0 female, 1 male. cancer: 0 breast, 1 ovarian.
 * carrier_class: 0 noncarrier, 1 locus1, 2 locus2, 3 both. */
pr_status pr_penetrance_create_default(pr_penetrance** out);
pr_status pr_penetrance_load(const char* json_path, pr_penetrance** out);
pr_status pr_penetrance_from_json(const char* json_text, pr_penetrance** out);
pr_status pr_penetrance_save(const pr_penetrance* p, const char* json_path);
pr_status pr_penetrance_lifetime(const pr_penetrance* p, int carrier_class,
                                 int sex, int cancer, double* out);
pr_status pr_penetrance_cumulative(const pr_penetrance* p, int carrier_class,
                                   int sex, int cancer, int age, double* out);
void pr_penetrance_free(pr_penetrance* p);

/* Cohorts: pedigree collections with optional outcome labels. Files are
 * CSV or JSON by extension. */
pr_status pr_cohort_read(const char* path, pr_cohort** out);
pr_status pr_cohort_write(const pr_cohort* c, const char* path);

/* params_json keys: n (required), horizon_years, seed, workers, prefix,
 * keep_excluded, structure (inline structure-distribution object). */
pr_status pr_cohort_simulate(const pr_penetrance* p, const char* params_json,
                             pr_cohort** out);

pr_status pr_cohort_size(const pr_cohort* c, size_t* out);
/* Copies families [start, start+count) into a new cohort, labels included.
 * Simulated cohorts are seeded per family, so a prefix slice equals a
 * smaller simulation with the same seed. */
pr_status pr_cohort_slice(const pr_cohort* c, size_t start, size_t count,
                          pr_cohort** out);
pr_status pr_cohort_family_id(const pr_cohort* c, size_t index, char** out);
pr_status pr_cohort_member_count(const pr_cohort* c, size_t index, int* out);
pr_status pr_cohort_has_outcomes(const pr_cohort* c, int* out);
pr_status pr_cohort_outcomes(const pr_cohort* c, double* out);
pr_status pr_cohort_attach_outcomes(pr_cohort* c, const char* csv_path);
pr_status pr_cohort_write_outcomes(const pr_cohort* c, const char* csv_path);
/* Simulator bookkeeping (family_id, carrier class, latent onset age). */
pr_status pr_cohort_write_truth(const pr_cohort* c, const char* csv_path);

/* Reporting-noise transforms; the source cohort is left untouched.
 * config_json NULL means default rates. */
pr_status pr_cohort_misreport(const pr_cohort* c, const char* config_json,
                              unsigned long long seed, pr_cohort** out);
pr_status pr_cohort_drop_relatives(const pr_cohort* c, double fraction,
                                   int unaffected_only,
                                   unsigned long long seed, pr_cohort** out);
pr_status pr_cohort_blank_onsets(const pr_cohort* c, double fraction,
                                 unsigned long long seed, pr_cohort** out);
pr_status pr_cohort_impute_onsets(const pr_cohort* c, pr_cohort** out);
void pr_cohort_free(pr_cohort* c);

/* Carrier posteriors and t-year breast cancer risk by pedigree peeling.
 * risk_out holds one value per family; posterior_out, when non-NULL, holds
 * four class probabilities per family. */
pr_status pr_mendelian_predict(const pr_cohort* c, const pr_penetrance* p,
                               int horizon_years, int workers,
                               double* risk_out, double* posterior_out);
/* Exhaustive-enumeration posterior for one family (small pedigrees only). */
pr_status pr_mendelian_brute_force(const pr_cohort* c, const pr_penetrance* p,
                                   size_t family_index, double* posterior_out);

/* Family-history-adjusted population baseline risk per family.
 * table_json_path NULL means the built-in table. */
pr_status pr_reference_risk(const pr_cohort* c, const char* table_json_path,
                            double* out);

/* Fixed input layouts for the learned models. Presets: "default" (alias
 * "sim26"/"q3s"), "q1s", "q2s", "app19". */
pr_status pr_reference_preset(const char* name, pr_reference** out);
pr_status pr_reference_load(const char* json_path, pr_reference** out);
pr_status pr_reference_save(const pr_reference* r, const char* json_path);
pr_status pr_reference_slot_count(const pr_reference* r, int* out);
void pr_reference_free(pr_reference* r);

/* Writes the standardized flat matrix (family_id,y,x0..xD-1) for a cohort. */
pr_status pr_encode_write_csv(const pr_cohort* c, const pr_reference* r,
                              unsigned long long seed, const char* csv_path);
/* Mean fraction of relatives the layout cannot hold. */
pr_status pr_encode_loss(const pr_cohort* c, const pr_reference* r,
                         double* out);

/* Training. options_json keys: kind ("logistic"/"fcnn"/"pedigree_cnn"),
 * loss ("cross_entropy"/"squared_error"), activation ("relu"/"elu"/
 * "logistic"), hidden, channels, dropout, epochs, batch_size,
 * learning_rate, weight_decay, seed, encode_seed, neighborhood
 * {m_sisters,m_brothers,m_daughters,m_sons}, meta (free-form, stored in
 * the checkpoint). The cohort must carry outcomes. */
pr_status pr_model_train(const pr_cohort* train, const pr_reference* r,
                         const char* options_json, pr_model** out);
/* Random hyperparameter search; returns a JSON report of all candidates.
 * options_json additionally takes candidates (count) and the sampling
 * ranges layers_range, width_range, filters_range, lr_range (log-uniform),
 * decay_range, dropout_range (each [lo, hi]) plus activations (list). */
pr_status pr_model_tune(const pr_cohort* train, const pr_reference* r,
                        const char* options_json, char** report_json);
pr_status pr_model_save(const pr_model* m, const char* path);
pr_status pr_model_load(const char* path, pr_model** out);
/* Scores a cohort; seed drives the overfull-family downsampling during
 * encoding. out holds one probability per family. */
pr_status pr_model_predict(const pr_model* m, const pr_cohort* c,
                           unsigned long long seed, double* out);
pr_status pr_model_info(const pr_model* m, char** json_out);
void pr_model_free(pr_model* m);

/* Evaluation. weights may be NULL for uniform. The report covers O/E, AUC,
 * average precision, Brier (and its square root), and decile calibration. */
pr_status pr_metrics_report(const double* preds, const double* labels,
                            const double* weights, size_t n, char** json_out);
pr_status pr_correlation(const double* a, const double* b, size_t n,
                         double* pearson_out, double* spearman_out);
/* Paired bootstrap over models sharing one test set; preds is n_models
 * rows of n, row-major. */
pr_status pr_bootstrap_compare(const char* const* names, size_t n_models,
                               const double* preds, const double* labels,
                               const double* weights, size_t n,
                               int replicates, double ci_level,
                               unsigned long long seed, char** json_out);
/* Censoring-corrected weights for a t-year endpoint; events is 0/1 per
 * subject, weights_out one value per subject. */
pr_status pr_ipcw_weights(const double* times, const int* events, size_t n,
                          double horizon, double* weights_out);

#ifdef __cplusplus
}
#endif

#endif /* PEDRISK_H */
