// Copyright 2026 The amlgraph Authors
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

#include "amlgraph/amlgraph.h"

#include <algorithm>
#include <exception>
#include <memory>
#include <new>
#include <optional>
#include <string>

#include "amlgraph/gstore.hpp"
#include "amlgraph/pipeline.hpp"
#include "amlgraph/sentinel.hpp"

struct aml_pipeline {
  aml::pipeline::PipelineConfig config;
  std::string summary;
};

struct aml_alerts {
  std::vector<aml::sentinel::Alert> alerts;
};

struct aml_graph {
  aml::gstore::CompressedGraph graph;
  double ratio = 1.0;
};

namespace {

thread_local std::string last_error;

aml_status Fail(aml_status s, const char* msg) {
  last_error = msg;
  return s;
}

// Runs `f`, translating exceptions into status codes.
template <typename F>
aml_status Guard(F&& f) {
  last_error.clear();
  try {
    f();
    return AML_OK;
  } catch (const aml::Error& e) {
    return Fail(static_cast<aml_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return Fail(AML_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(AML_INTERNAL, e.what());
  }
}

std::string Join(const aml::pipeline::Summary& lines) {
  std::string s;
  for (const auto& l : lines) s += l + "\n";
  return s;
}

template <typename F>
aml_status RunCommand(aml_pipeline* p, F&& f) {
  if (p == nullptr) return Fail(AML_INVALID_ARGUMENT, "null pipeline handle");
  return Guard([&] { p->summary = Join(f(p->config)); });
}

}  // namespace

extern "C" {

const char* aml_version(void) { return "0.1.0"; }

const char* aml_status_string(aml_status status) {
  switch (status) {
    case AML_OK: return "ok";
    case AML_INVALID_ARGUMENT: return "invalid argument";
    case AML_CONFIG: return "configuration error";
    case AML_IO: return "io error";
    case AML_GENERATION: return "generation failure";
    case AML_INJECTION: return "injection failure";
    case AML_CONTRACT: return "contract violation";
    case AML_DIVERGENCE: return "training diverged";
    case AML_STALE: return "stale state";
    case AML_OUT_OF_RANGE: return "out of range";
    case AML_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* aml_last_error(void) { return last_error.c_str(); }

aml_status aml_pipeline_open(const char* config_path, const char* out_dir, int override_seed,
                             uint64_t seed, aml_pipeline** out) {
  if (config_path == nullptr || out_dir == nullptr || out == nullptr) {
    return Fail(AML_INVALID_ARGUMENT, "null argument");
  }
  *out = nullptr;
  return Guard([&] {
    auto p = std::make_unique<aml_pipeline>();
    p->config = aml::pipeline::LoadPipelineConfig(
        config_path, out_dir, override_seed ? std::optional<std::uint64_t>(seed) : std::nullopt);
    *out = p.release();
  });
}

void aml_pipeline_close(aml_pipeline* p) { delete p; }

aml_status aml_generate(aml_pipeline* p) { return RunCommand(p, aml::pipeline::Generate); }
aml_status aml_scan(aml_pipeline* p) { return RunCommand(p, aml::pipeline::ScanLog); }

aml_status aml_train(aml_pipeline* p, const char* method) {
  return RunCommand(p, [&](const aml::pipeline::PipelineConfig& c) {
    return aml::pipeline::Train(c, method ? method : "");
  });
}

aml_status aml_compress(aml_pipeline* p, const char* strategy) {
  return RunCommand(p, [&](const aml::pipeline::PipelineConfig& c) {
    if (strategy == nullptr) return aml::pipeline::CompressGraph(c);
    aml::pipeline::PipelineConfig copy = c;
    copy.compress_strategy = aml::gstore::ParseReorderStrategy(strategy);
    return aml::pipeline::CompressGraph(copy);
  });
}

aml_status aml_bench(aml_pipeline* p) { return RunCommand(p, aml::pipeline::Bench); }
aml_status aml_infer(aml_pipeline* p) { return RunCommand(p, aml::pipeline::Infer); }

const char* aml_pipeline_summary(const aml_pipeline* p) {
  return p == nullptr ? "" : p->summary.c_str();
}

uint64_t aml_pipeline_seed(const aml_pipeline* p) {
  return p == nullptr ? 0 : p->config.master_seed;
}

aml_status aml_scan_file(const char* transactions_csv, const char* config_path,
                         aml_alerts** out) {
  if (transactions_csv == nullptr || out == nullptr) {
    return Fail(AML_INVALID_ARGUMENT, "null argument");
  }
  *out = nullptr;
  return Guard([&] {
    aml::sentinel::RuleSet rules;
    if (config_path != nullptr) {
      rules = aml::sentinel::RuleSet::FromSection(aml::ConfigFile::Load(config_path).Section("rules"));
    }
    auto a = std::make_unique<aml_alerts>();
    a->alerts = aml::sentinel::Scan(aml::txflow::ReadTransactionsCsv(transactions_csv), rules);
    *out = a.release();
  });
}

size_t aml_alerts_count(const aml_alerts* a) { return a == nullptr ? 0 : a->alerts.size(); }

aml_status aml_alerts_get(const aml_alerts* a, size_t index, aml_alert_info* info) {
  if (a == nullptr || info == nullptr) return Fail(AML_INVALID_ARGUMENT, "null argument");
  if (index >= a->alerts.size()) return Fail(AML_OUT_OF_RANGE, "alert index out of range");
  const auto& al = a->alerts[index];
  info->alert_id = al.alert_id;
  info->rule = aml::sentinel::ToString(al.rule).data();
  info->account_id = al.account_id;
  info->window_start = al.window.first;
  info->window_end = al.window.last;
  info->tx_count = al.tx_ids.size();
  return AML_OK;
}

void aml_alerts_free(aml_alerts* a) { delete a; }

aml_status aml_graph_open(const char* path, aml_graph** out) {
  if (path == nullptr || out == nullptr) return Fail(AML_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return Guard([&] {
    auto g = std::make_unique<aml_graph>();
    g->graph = aml::gstore::ReadCompressed(path);
    g->ratio = aml::gstore::MakeCompressionReport(g->graph).ratio;
    *out = g.release();
  });
}

size_t aml_graph_vertex_count(const aml_graph* g) { return g == nullptr ? 0 : g->graph.vertex_count; }
size_t aml_graph_edge_count(const aml_graph* g) { return g == nullptr ? 0 : g->graph.edge_count; }
double aml_graph_ratio(const aml_graph* g) { return g == nullptr ? 0.0 : g->ratio; }

aml_status aml_graph_neighbors(const aml_graph* g, uint32_t v, uint32_t* buffer, size_t capacity,
                               size_t* degree) {
  if (g == nullptr || degree == nullptr || (buffer == nullptr && capacity > 0)) {
    return Fail(AML_INVALID_ARGUMENT, "null argument");
  }
  return Guard([&] {
    const auto n = aml::gstore::DecodeNeighbors(g->graph, v);
    *degree = n.size();
    std::copy_n(n.begin(), std::min(capacity, n.size()), buffer);
  });
}

void aml_graph_free(aml_graph* g) { delete g; }

}  // extern "C"
