/* tabscore.h - C API for the tabscore shared library.
 *
 * Scoring and reward computation for table-to-LaTeX systems: tabular parsing
 * and complexity classification, TEDS / TEDS-Structure tree metrics, the
 * block-Haar CW-SSIM image metric, dual binary rewards, and the GRPO
 * objective math. Objects are opaque handles; functions return
 * tabscore_status and set a thread-local error message retrievable with
 * tabscore_last_error(). Strings returned through char** out-parameters are
 * owned by the caller and must be released with tabscore_string_free().
 * Wherever a tabscore_config* parameter is accepted, NULL selects the
 * built-in defaults.
 */
#ifndef TABSCORE_H
#define TABSCORE_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tabscore_status {
    TABSCORE_OK = 0,
    TABSCORE_ERROR_INVALID_ARGUMENT = 1,
    TABSCORE_ERROR_PARSE = 2,
    TABSCORE_ERROR_IO = 3,
    TABSCORE_ERROR_TOOLCHAIN = 4, /* LaTeX toolchain unavailable */
    TABSCORE_ERROR_INTERNAL = 5
} tabscore_status;

const char *tabscore_version(void);
const char *tabscore_status_name(tabscore_status status);

/* Message for the most recent failure on the calling thread. */
const char *tabscore_last_error(void);

void tabscore_string_free(char *str);

/* ---------------------------------------------------------------- config */

typedef struct tabscore_config tabscore_config;

tabscore_config *tabscore_config_create(void); /* built-in defaults */
tabscore_status tabscore_config_load(const char *path, tabscore_config **out);
/* Merges a JSON object (same schema as the config file) into the config. */
tabscore_status tabscore_config_merge_json(tabscore_config *config, const char *json_text);
tabscore_status tabscore_config_to_json(const tabscore_config *config, char **out);
void tabscore_config_free(tabscore_config *config);

/* ---------------------------------------------------------------- tables */

typedef struct tabscore_table tabscore_table;

/* Parses one tabular block. When clean_first is nonzero the source is run
 * through the cleaning pass (references, colors, strip list) first. */
tabscore_status tabscore_table_parse(const tabscore_config *config, const char *latex,
                                     int clean_first, tabscore_table **out);
int tabscore_table_rows(const tabscore_table *table);
int tabscore_table_cols(const tabscore_table *table);
long tabscore_table_cell_count(const tabscore_table *table);
/* 0 = simple, 1 = medium, 2 = complex (span count taken from the source). */
int tabscore_table_complexity(const tabscore_table *table);
tabscore_status tabscore_table_html(const tabscore_table *table, char **out);
tabscore_status tabscore_table_canonical_latex(const tabscore_table *table, char **out);
void tabscore_table_free(tabscore_table *table);

/* Runs the cleaning pass alone; out receives the cleaned block. */
tabscore_status tabscore_clean(const tabscore_config *config, const char *latex, char **out);

/* ----------------------------------------------------------- tree metric */

/* TEDS similarity between two parsed tables; structure_only selects
 * TEDS-Structure. Result lies in [0, 1]. */
tabscore_status tabscore_teds(const tabscore_table *pred, const tabscore_table *gt,
                              int structure_only, double *similarity);

/* ----------------------------------------------------------------- image */

typedef struct tabscore_image tabscore_image;

tabscore_status tabscore_image_load_png(const char *path, tabscore_image **out);
/* pixels: row-major luminance in [0, 255], length width*height. */
tabscore_status tabscore_image_create_gray(const double *pixels, int width, int height,
                                           tabscore_image **out);
int tabscore_image_width(const tabscore_image *image);
int tabscore_image_height(const tabscore_image *image);
void tabscore_image_free(tabscore_image *image);

/* Monochrome-tuned CW-SSIM (one-level 2x2 Haar, global subband SSIM). */
tabscore_status tabscore_cwssim(const tabscore_image *x, const tabscore_image *y, double *value);

/* --------------------------------------------------------------- rewards */

/* Binary structure reward for a prediction against a ground truth that is
 * known to parse. Parse failure of the prediction yields reward 0, not an
 * error; failure of the ground truth is TABSCORE_ERROR_PARSE. */
tabscore_status tabscore_structure_reward(const tabscore_config *config, const char *pred_latex,
                                          const char *gt_latex, int *reward);

/* ------------------------------------------------------------- grpo math */

/* Group-relative advantages: mean-centered, population-std-normalized;
 * all-equal groups give zeros. n >= 2. */
tabscore_status tabscore_advantages(const double *rewards, int n, double *out);

/* k3 estimator: x - log(x) - 1 with x = exp(logp_ref - logp_cur). */
double tabscore_kl_estimate(double logp_ref, double logp_cur);

/* Clipped surrogate objective averaged over the group, minus beta * KL. */
tabscore_status tabscore_rft_objective(const double *logp_cur, const double *logp_old,
                                       const double *logp_ref, const double *advantages, int n,
                                       double epsilon, double beta, double *out);

/* Negative log-likelihood of target sequences: -sum(logp). */
double tabscore_sft_nll(const double *logp_targets, int n);

/* --------------------------------------------------------------- harness */

/* Builds a JSON Lines corpus from the .tex files under source_dir.
 * summary_json (optional) receives the build summary. */
tabscore_status tabscore_build_corpus(const tabscore_config *config, const char *source_dir,
                                      const char *output_path, char **summary_json);

/* Scores predictions (JSONL: {"id", "latex"}) against a corpus. no_render
 * skips visual metrics; otherwise an unusable toolchain is
 * TABSCORE_ERROR_TOOLCHAIN. The JSON report is written to report_json_path
 * when non-NULL and returned through report_json when non-NULL. */
tabscore_status tabscore_evaluate(const tabscore_config *config, const char *predictions_path,
                                  const char *corpus_path, int no_render,
                                  const char *report_json_path, char **report_json);

/* Human-readable fixed-width table for an evaluate() report. */
tabscore_status tabscore_format_report(const char *report_json, char **out);

/* Scores candidate groups (JSONL: {"id", "candidates": [...]}) and writes
 * per-candidate outcome lines with advantages to output_path. */
tabscore_status tabscore_reward_run(const tabscore_config *config, const char *corpus_path,
                                    const char *candidates_path, int no_render,
                                    const char *output_path, char **summary_json);

/* Single-pair scoring for debugging. Image paths may be NULL; with no_render
 * unset both sides are rendered when images are missing. */
tabscore_status tabscore_metric_pair(const tabscore_config *config, const char *pred_latex,
                                     const char *gt_latex, const char *pred_image_png,
                                     const char *gt_image_png, int no_render, char **result_json);

#ifdef __cplusplus
}
#endif

#endif /* TABSCORE_H */
