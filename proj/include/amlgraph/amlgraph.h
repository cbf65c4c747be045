/* Copyright 2026 The amlgraph Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface of libamlgraph.
 *
 * Every call returns an aml_status. On failure, aml_last_error() returns a
 * message for the calling thread, valid until that thread's next call.
 * Handles are not thread-safe; use one handle per thread.
 */

#ifndef AMLGRAPH_AMLGRAPH_H_
#define AMLGRAPH_AMLGRAPH_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define AML_API __declspec(dllexport)
#else
#define AML_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum aml_status {
  AML_OK = 0,
  AML_INVALID_ARGUMENT = 1,
  AML_CONFIG = 2,
  AML_IO = 3,
  AML_GENERATION = 4,
  AML_INJECTION = 5,
  AML_CONTRACT = 6,
  AML_DIVERGENCE = 7,
  AML_STALE = 8,
  AML_OUT_OF_RANGE = 9,
  AML_INTERNAL = 100
} aml_status;

AML_API const char* aml_version(void);
AML_API const char* aml_status_string(aml_status status);
AML_API const char* aml_last_error(void);

/* ---- pipeline ------------------------------------------------------------ */

typedef struct aml_pipeline aml_pipeline;

/* Loads `config_path` and writes artifacts under `out_dir`. `seed` replaces
 * the config's master seed when `override_seed` is nonzero. */
AML_API aml_status aml_pipeline_open(const char* config_path, const char* out_dir,
                                     int override_seed, uint64_t seed, aml_pipeline** out);
AML_API void aml_pipeline_close(aml_pipeline* p);

AML_API aml_status aml_generate(aml_pipeline* p);
AML_API aml_status aml_scan(aml_pipeline* p);
/* `method` is "gcn", "fastgcn" or NULL for the configured method. */
AML_API aml_status aml_train(aml_pipeline* p, const char* method);
/* `strategy` is "identity", "bfs", "degree" or NULL for the configured one. */
AML_API aml_status aml_compress(aml_pipeline* p, const char* strategy);
AML_API aml_status aml_bench(aml_pipeline* p);
AML_API aml_status aml_infer(aml_pipeline* p);

/* Newline-separated summary of the last successful command. */
AML_API const char* aml_pipeline_summary(const aml_pipeline* p);
AML_API uint64_t aml_pipeline_seed(const aml_pipeline* p);

/* ---- transaction monitoring ---------------------------------------------- */

typedef struct aml_alerts aml_alerts;

typedef struct aml_alert_info {
  uint64_t alert_id;
  const char* rule; /* "over_threshold", "near_miss" or "velocity" */
  uint32_t account_id;
  uint32_t window_start;
  uint32_t window_end;
  size_t tx_count;
} aml_alert_info;

/* Scans a transactions.csv file with the rule settings in `config_path`
 * ([rules] section; NULL for defaults). */
AML_API aml_status aml_scan_file(const char* transactions_csv, const char* config_path,
                                 aml_alerts** out);
AML_API size_t aml_alerts_count(const aml_alerts* a);
AML_API aml_status aml_alerts_get(const aml_alerts* a, size_t index, aml_alert_info* info);
AML_API void aml_alerts_free(aml_alerts* a);

/* ---- compressed graphs --------------------------------------------------- */

typedef struct aml_graph aml_graph;

/* Reads an AMLG1 file written by the compress command. */
AML_API aml_status aml_graph_open(const char* path, aml_graph** out);
AML_API size_t aml_graph_vertex_count(const aml_graph* g);
AML_API size_t aml_graph_edge_count(const aml_graph* g);
/* Writes up to `capacity` neighbors of `v` (relabeled id space) and stores
 * the full degree in `*degree`. */
AML_API aml_status aml_graph_neighbors(const aml_graph* g, uint32_t v, uint32_t* buffer,
                                       size_t capacity, size_t* degree);
AML_API double aml_graph_ratio(const aml_graph* g);
AML_API void aml_graph_free(aml_graph* g);

#ifdef __cplusplus
}
#endif

#endif /* AMLGRAPH_AMLGRAPH_H_ */
