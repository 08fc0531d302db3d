// Copyright 2026 The EDDA Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


/* C interface to the EDDA multi-domain recommender.
 *
 * Every object is an opaque handle created by a *_create / *_load / *_train
 * call and released by the matching *_destroy. Functions return an
 * edda_status; on failure edda_last_error() describes the problem for the
 * calling thread. Handles may be shared across threads for reading only.
 */

#ifndef EDDA_EDDA_H_
#define EDDA_EDDA_H_

#include <stddef.h>
#include <stdint.h>

#if defined(EDDA_BUILDING_LIBRARY)
#define EDDA_API __attribute__((visibility("default")))
#else
#define EDDA_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum edda_status {
  EDDA_OK = 0,
  EDDA_ERR_INVALID_ARGUMENT = 1,
  EDDA_ERR_IO = 2,
  EDDA_ERR_DATA = 3,
  EDDA_ERR_NUMERIC = 4,
  EDDA_ERR_MISMATCH = 5,
  EDDA_ERR_INTERNAL = 6
} edda_status;

EDDA_API const char* edda_version(void);
EDDA_API const char* edda_status_string(edda_status status);
/* Message of the last failed call on this thread; "" if none. */
EDDA_API const char* edda_last_error(void);

/* Run configuration: `key = value` settings with defaults for every key. */
typedef struct edda_config edda_config;

EDDA_API edda_status edda_config_create(edda_config** out);
EDDA_API void edda_config_destroy(edda_config* config);
EDDA_API edda_status edda_config_set(edda_config* config, const char* key,
                                     const char* value);
/* Applies every entry of a key-value file. */
EDDA_API edda_status edda_config_load_file(edda_config* config, const char* path);
EDDA_API edda_status edda_config_write(const edda_config* config, const char* path);

/* Generates a synthetic dataset from a key-value spec file into `out_dir`:
 * interactions.tsv, latents.tsv and manifest.txt. `seed` overrides the
 * spec's seed when non-null. */
EDDA_API edda_status edda_synth(const char* spec_path, const uint64_t* seed,
                                const char* out_dir);

/* An interaction file together with its train/validation/test split and
 * evaluation cases, all derived from the config's seed. */
typedef struct edda_dataset edda_dataset;

typedef struct edda_domain_stats {
  uint64_t users;
  uint64_t items;
  uint64_t interactions;
  uint64_t train_interactions;
  uint64_t validation_cases;
  uint64_t test_cases;
} edda_domain_stats;

EDDA_API edda_status edda_dataset_load(const edda_config* config, const char* path,
                                       edda_dataset** out);
EDDA_API void edda_dataset_destroy(edda_dataset* dataset);
EDDA_API size_t edda_dataset_num_domains(const edda_dataset* dataset);
EDDA_API edda_status edda_dataset_domain_stats(const edda_dataset* dataset,
                                               uint32_t domain, edda_domain_stats* out);

/* Cross-domain similar-node pairs mined on the training graph. */
typedef struct edda_pairs edda_pairs;

EDDA_API edda_status edda_pairs_mine(const edda_config* config,
                                     const edda_dataset* dataset, edda_pairs** out);
/* One file pairs_<d>_<d'>.tsv per unordered domain pair (d < d'), holding
 * both directions. */
EDDA_API edda_status edda_pairs_write_dir(const edda_pairs* pairs, const char* dir,
                                          size_t* files_written);
EDDA_API edda_status edda_pairs_read_dir(const edda_dataset* dataset, const char* dir,
                                         edda_pairs** out);
EDDA_API size_t edda_pairs_count(const edda_pairs* pairs);
EDDA_API void edda_pairs_destroy(edda_pairs* pairs);

typedef struct edda_model edda_model;

/* Initializes and trains a model of the configured variant. `pairs` may be
 * null, in which case the alignment term is off. Epoch lines are written to
 * `log_path` when non-null. */
EDDA_API edda_status edda_model_train(const edda_config* config,
                                      const edda_dataset* dataset,
                                      const edda_pairs* pairs, const char* log_path,
                                      edda_model** out);
EDDA_API edda_status edda_model_save(const edda_model* model, const char* dir);
/* Refuses (EDDA_ERR_MISMATCH) a checkpoint trained on other data or another
 * split seed unless `force` is nonzero. */
EDDA_API edda_status edda_model_load(const edda_config* config,
                                     const edda_dataset* dataset, const char* dir,
                                     int force, edda_model** out);
EDDA_API void edda_model_destroy(edda_model* model);
EDDA_API size_t edda_model_num_parameters(const edda_model* model);
/* Final validation metrics of a trained model; NaN when unavailable. */
EDDA_API double edda_model_validation_auc(const edda_model* model);
EDDA_API double edda_model_validation_recall(const edda_model* model);

EDDA_API edda_status edda_model_score(const edda_model* model,
                                      const edda_dataset* dataset, uint32_t domain,
                                      uint64_t user, uint64_t item, double* out);
/* Top `n` items of `domain` for `user`, excluding training interactions.
 * Writes up to n entries and their number to `count`. */
EDDA_API edda_status edda_model_recommend(const edda_model* model,
                                          const edda_dataset* dataset, uint32_t domain,
                                          uint64_t user, size_t n, uint64_t* items,
                                          double* scores, size_t* count);

/* Per-domain AUC and Recall@1 plus an AVG row. */
typedef struct edda_report edda_report;

typedef struct edda_report_row {
  const char* domain; /* domain id or "AVG"; owned by the report */
  double auc;
  double recall_at_1;
  uint64_t num_cases;
  double domain_size;
  double out_of_domain_interaction;
} edda_report_row;

/* `test_set` nonzero evaluates the test split, zero the validation split. */
EDDA_API edda_status edda_evaluate(const edda_config* config,
                                   const edda_dataset* dataset,
                                   const edda_model* model, int test_set,
                                   edda_report** out);
EDDA_API size_t edda_report_num_rows(const edda_report* report);
EDDA_API edda_status edda_report_row_at(const edda_report* report, size_t index,
                                        edda_report_row* out);
EDDA_API edda_status edda_report_write(const edda_report* report, const char* path);
EDDA_API void edda_report_destroy(edda_report* report);

/* Run manifest: the config, its derived seeds, the command and a hash of
 * each input file. */
EDDA_API edda_status edda_manifest_write(const edda_config* config, const char* command,
                                         const char* const* input_paths,
                                         size_t num_inputs, const char* out_path);

#ifdef __cplusplus
}
#endif

#endif /* EDDA_EDDA_H_ */
