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

#include "amlgraph/pipeline.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <sstream>
#include <system_error>

#include "amlgraph/deltainfer.hpp"
#include "amlgraph/fastsamp.hpp"
#include "csv.hpp"

namespace aml::pipeline {
namespace {

using Clock = std::chrono::steady_clock;

double Since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

// Prefixes any failure with the stage that raised it.
template <typename F>
auto Stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.code(), std::string(name) + ": " + e.what());
  }
}

// Files registered here are deleted unless Commit() runs, so a failing
// command leaves no partial outputs behind.
class OutputGuard {
 public:
  explicit OutputGuard(const PipelineConfig& config) : config_(config) {
    std::error_code ec;
    std::filesystem::create_directories(config.out_dir, ec);
    if (ec) throw Error(ErrorCode::kIo, "cannot create " + config.out_dir.string());
  }
  ~OutputGuard() {
    if (committed_) return;
    for (const auto& p : files_) {
      std::error_code ec;
      std::filesystem::remove(p, ec);
    }
  }
  std::filesystem::path Add(const std::string& name) {
    files_.push_back(config_.Path(name));
    return files_.back();
  }
  void Commit() { committed_ = true; }

 private:
  const PipelineConfig& config_;
  std::vector<std::filesystem::path> files_;
  bool committed_ = false;
};

std::string Method(std::string_view m) {
  if (m != "gcn" && m != "fastgcn") {
    throw Error(ErrorCode::kConfig, "unknown method '" + std::string(m) + "' (gcn|fastgcn)");
  }
  return std::string(m);
}

bool ParseBool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw Error(ErrorCode::kConfig, "expected a boolean, got '" + s + "'");
}

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(' '));
    item.erase(item.find_last_not_of(' ') + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::filesystem::path Resolve(const PipelineConfig& c, const std::filesystem::path& p) {
  return p.is_absolute() ? p : c.out_dir / p;
}

gcnkit::TrainResult RunTraining(const std::string& method, const Dataset& data,
                                const gcnkit::TrainHyper& hyper) {
  return Stage(method == "gcn" ? "gcnkit" : "fastsamp", [&] {
    return method == "gcn" ? gcnkit::TrainFull(data.adj, data.features, data.split, hyper)
                           : fastsamp::TrainSampled(data.adj, data.features, data.split, hyper);
  });
}

// Degree and amount columns of the scaled feature matrix.
linalg::Matrix BaselineFeatures(const linalg::Matrix& x) {
  constexpr std::array<std::size_t, 4> kCols = {0, 1, 4, 5};
  linalg::Matrix out(x.rows(), kCols.size());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < kCols.size(); ++j) out.row(i)[j] = x.row(i)[kCols[j]];
  }
  return out;
}

}  // namespace

std::string CheckpointName(std::string_view method) {
  return "model_" + std::string(method) + ".bin";
}
std::string MetricsName(std::string_view method) {
  return "metrics_" + std::string(method) + ".csv";
}
std::string EvaluationName(std::string_view method) {
  return "eval_" + std::string(method) + ".csv";
}

void PipelineConfig::Validate() const {
  topology.Validate();
  flow.Validate();
  for (const auto& t : typologies) t.Validate(flow.steps);
  rules.Validate();
  Method(train.method);
  Method(infer.method);
  if (!(train.split.train > 0.0) || !(train.split.val > 0.0) ||
      train.split.train + train.split.val >= 1.0) {
    throw Error(ErrorCode::kConfig, "split fractions must be positive and leave a test part");
  }
  if (bench_trials == 0) throw Error(ErrorCode::kConfig, "bench trials must be >= 1");
  if (infer.batch == 0) throw Error(ErrorCode::kConfig, "infer batch must be >= 1");
}

PipelineConfig LoadPipelineConfig(const ConfigFile& file, std::filesystem::path out_dir,
                                  std::optional<std::uint64_t> seed_override) {
  PipelineConfig c;
  c.out_dir = std::move(out_dir);
  c.master_seed = seed_override ? *seed_override : file.Root().GetUint("seed", 0);
  const std::uint64_t m = c.master_seed;

  const ConfigSection topo = file.Section("topology");
  c.topology = simnet::TopologyConfig::FromSection(topo);
  if (!topo.Has("seed")) c.topology.seed = SubSeed(m, "topology");

  const ConfigSection flow = file.Section("flow");
  c.flow = txflow::FlowConfig::FromSection(flow);
  if (!flow.Has("seed")) c.flow.seed = SubSeed(m, "flow");

  for (const std::string& name : file.SectionsWithPrefix("typology.")) {
    const ConfigSection s = file.Section(name);
    typology::TypologySpec spec = typology::TypologySpec::FromSection(s, c.flow.steps);
    if (!s.Has("seed")) spec.seed = SubSeed(m, name);
    c.typologies.push_back(spec);
  }

  c.rules = sentinel::RuleSet::FromSection(file.Section("rules"));

  const ConfigSection train = file.Section("train");
  c.train.hyper = gcnkit::TrainHyper::FromSection(train);
  if (!train.Has("seed")) c.train.hyper.seed = SubSeed(m, "train");
  c.train.method = Method(train.GetString("method", "gcn"));
  c.train.split.train = train.GetDouble("split_train", c.train.split.train);
  c.train.split.val = train.GetDouble("split_val", c.train.split.val);
  c.train.split_seed = train.GetUint("split_seed", SubSeed(m, "split"));

  const ConfigSection comp = file.Section("compress");
  c.compress_strategy = gstore::ParseReorderStrategy(comp.GetString("strategy", "bfs"));
  c.compress_edges = comp.GetString("edges", "");

  const ConfigSection bench = file.Section("bench");
  c.bench_trials = static_cast<std::uint32_t>(bench.GetUint("trials", 1));
  if (bench.Has("strategies")) {
    c.bench_strategies.clear();
    for (const auto& s : SplitList(bench.GetString("strategies"))) {
      c.bench_strategies.push_back(gstore::ParseReorderStrategy(s));
    }
  }

  const ConfigSection infer = file.Section("infer");
  c.infer.stream = infer.GetString("stream", "");
  c.infer.method = Method(infer.GetString("method", "gcn"));
  c.infer.batch = static_cast<std::uint32_t>(infer.GetUint("batch", 1));
  c.infer.verify = ParseBool(infer.GetString("verify", "false"));

  c.Validate();
  return c;
}

PipelineConfig LoadPipelineConfig(const std::filesystem::path& path, std::filesystem::path out_dir,
                                  std::optional<std::uint64_t> seed_override) {
  return LoadPipelineConfig(ConfigFile::Load(path), std::move(out_dir), seed_override);
}

Summary Generate(const PipelineConfig& config) {
  OutputGuard out(config);
  simnet::AccountGraph graph =
      Stage("simnet", [&] { return simnet::GenerateTopology(config.topology); });
  std::vector<txflow::Transaction> txs =
      Stage("txflow", [&] { return txflow::SimulateFlow(graph, config.flow); });

  std::vector<typology::InjectionReport> reports;
  std::uint64_t next_instance = 0;
  for (const auto& spec : config.typologies) {
    typology::Injection inj = Stage("typology", [&] {
      return typology::Inject(std::move(graph), std::move(txs), spec, config.flow.steps,
                              next_instance);
    });
    graph = std::move(inj.graph);
    txs = std::move(inj.txs);
    typology::RemapReports(reports, inj.id_map);
    reports.insert(reports.end(), inj.reports.begin(), inj.reports.end());
    next_instance += spec.instances;
  }
  if (const auto check = typology::VerifyMotifs(txs, reports); !check) {
    throw Error(ErrorCode::kInjection, "typology: " + check.violation);
  }

  std::vector<std::pair<gstore::VertexId, gstore::VertexId>> pairs;
  pairs.reserve(graph.edges.size());
  for (const auto& e : graph.edges) pairs.emplace_back(e.src, e.dst);
  const gstore::CsrGraph csr = gstore::BuildCsr(graph.account_count(), pairs);

  simnet::WriteAccountsCsv(out.Add(Artifacts::kAccounts), graph.accounts);
  txflow::WriteTransactionsCsv(out.Add(Artifacts::kTransactions), txs);
  typology::WriteSarLabelsCsv(out.Add(Artifacts::kSarLabels), graph.accounts, reports);
  typology::WriteInjectionReportCsv(out.Add(Artifacts::kInjections), reports);
  gstore::WriteEdgeCsv(out.Add(Artifacts::kEdges), csr);
  out.Commit();

  std::size_t suspicious = 0;
  for (const auto& a : graph.accounts) suspicious += a.sar_label == simnet::SarLabel::kSuspicious;
  const double share = graph.accounts.empty()
                           ? 0.0
                           : 100.0 * static_cast<double>(suspicious) /
                                 static_cast<double>(graph.accounts.size());
  return {
      "accounts " + std::to_string(graph.account_count()),
      "edges " + std::to_string(csr.edge_count()),
      "transactions " + std::to_string(txs.size()),
      "typology instances " + std::to_string(reports.size()),
      "suspicious accounts " + std::to_string(suspicious) + " (" + Fixed(share, 2) + "%)",
  };
}

Summary ScanLog(const PipelineConfig& config) {
  OutputGuard out(config);
  const auto txs = Stage("txflow", [&] {
    return txflow::ReadTransactionsCsv(config.Path(Artifacts::kTransactions));
  });
  const auto alerts = Stage("sentinel", [&] { return sentinel::Scan(txs, config.rules); });
  sentinel::WriteAlertsCsv(out.Add(Artifacts::kAlerts), alerts);
  out.Commit();

  std::array<std::size_t, 3> per_rule{};
  for (const auto& a : alerts) ++per_rule[static_cast<std::size_t>(a.rule)];
  Summary s = {"transactions " + std::to_string(txs.size()),
               "alerts " + std::to_string(alerts.size())};
  for (std::size_t r = 0; r < per_rule.size(); ++r) {
    s.push_back("  " + std::string(sentinel::ToString(static_cast<sentinel::Rule>(r))) + " " +
                std::to_string(per_rule[r]));
  }
  return s;
}

Dataset LoadDataset(const PipelineConfig& config) {
  Dataset d;
  const auto accounts =
      Stage("simnet", [&] { return simnet::ReadAccountsCsv(config.Path(Artifacts::kAccounts)); });
  const std::size_t n = accounts.size();
  d.graph = Stage("gstore", [&] { return gstore::ReadEdgeCsv(config.Path(Artifacts::kEdges), n); });
  const auto txs = Stage("txflow", [&] {
    return txflow::ReadTransactionsCsv(config.Path(Artifacts::kTransactions));
  });
  const auto alerts_path = config.Path(Artifacts::kAlerts);
  const auto alerts = Stage("sentinel", [&] {
    return std::filesystem::exists(alerts_path) ? sentinel::ReadAlertsCsv(alerts_path)
                                                : sentinel::Scan(txs, config.rules);
  });
  d.features = sentinel::ScaleFeatures(sentinel::AlertFeatures(n, txs, alerts));

  std::vector<simnet::SarLabel> labels(n);
  for (const auto& a : accounts) labels[a.account_id] = a.sar_label;
  d.split = Stage("gcnkit",
                  [&] { return gcnkit::MakeSplit(labels, config.train.split, config.train.split_seed); });
  d.adj = gcnkit::NormalizeAdjacency(d.graph);
  return d;
}

gcnkit::DetectionScore Evaluate(const Dataset& data, const gcnkit::GcnModel& model) {
  const linalg::Matrix probs = gcnkit::Forward(data.adj, data.features, model);
  return gcnkit::ScoreDetection(gcnkit::SuspiciousColumn(probs), data.split);
}

Summary Train(const PipelineConfig& config, std::string_view method_arg) {
  const std::string method = Method(method_arg.empty() ? config.train.method : method_arg);
  OutputGuard out(config);
  const Dataset data = LoadDataset(config);
  const gcnkit::TrainResult r = RunTraining(method, data, config.train.hyper);
  const gcnkit::DetectionScore score = Evaluate(data, r.model);
  const std::vector<double> base =
      gcnkit::LogisticBaseline(BaselineFeatures(data.features), data.split, 500, 0.05,
                               config.train.hyper.WeightsFor(data.split));
  const gcnkit::DetectionScore base_score = gcnkit::ScoreDetection(base, data.split);

  gcnkit::WriteCheckpoint(out.Add(CheckpointName(method)), r.model);
  gcnkit::WriteMetricsCsv(out.Add(MetricsName(method)), r.metrics);
  {
    csv::Writer w(out.Add(EvaluationName(method)));
    w.Line(
        "method,threshold,val_f1,test_f1,test_precision,test_recall,baseline_threshold,"
        "baseline_test_f1");
    w.Row(method, score.threshold, score.val_f1, score.test_f1, score.test_precision,
          score.test_recall, base_score.threshold, base_score.test_f1);
    w.Close();
  }
  out.Commit();

  const std::size_t epochs = r.metrics.size();
  return {
      "method " + method,
      "epochs " + std::to_string(epochs),
      "final loss " + (epochs ? Fixed(r.metrics.back().loss, 6) : std::string("n/a")),
      "val accuracy " + (epochs ? Fixed(r.metrics.back().val_accuracy, 4) : std::string("n/a")),
      "train seconds " + Fixed(r.TrainSeconds(), 3) + " (setup " + Fixed(r.setup_seconds, 3) + ")",
      "test f1 " + Fixed(score.test_f1, 4) + " (precision " + Fixed(score.test_precision, 4) +
          ", recall " + Fixed(score.test_recall, 4) + ")",
      "baseline test f1 " + Fixed(base_score.test_f1, 4),
  };
}

Summary CompressGraph(const PipelineConfig& config) {
  OutputGuard out(config);
  const std::filesystem::path src = config.compress_edges.empty()
                                        ? config.Path(Artifacts::kEdges)
                                        : Resolve(config, config.compress_edges);
  const gstore::CsrGraph g = Stage("gstore", [&] { return gstore::ReadEdgeCsv(src); });
  const gstore::Permutation perm = gstore::Reorder(g, config.compress_strategy);
  const gstore::CompressedGraph cg = gstore::Compress(g, perm);
  const auto bin = out.Add(Artifacts::kGraph);
  gstore::WriteCompressed(bin, cg);

  const gstore::CompressedGraph back = gstore::ReadCompressed(bin);
  if (back.permutation != perm || !(back.Decode() == gstore::Relabel(g, perm))) {
    throw Error(ErrorCode::kContract, "gstore: compressed graph does not round-trip");
  }
  const gstore::CompressionReport rep = gstore::MakeCompressionReport(cg);
  {
    csv::Writer w(out.Add(Artifacts::kCompressionReport));
    w.Line("strategy,vertices,edges,raw_bytes,compressed_bytes,ratio");
    w.Row(gstore::ToString(config.compress_strategy), g.vertex_count, g.edge_count(),
          rep.raw_bytes, rep.compressed_bytes, Fixed(rep.ratio, 2));
    w.Close();
  }
  out.Commit();
  return {
      "strategy " + std::string(gstore::ToString(config.compress_strategy)),
      "vertices " + std::to_string(g.vertex_count) + ", edges " + std::to_string(g.edge_count()),
      "raw bytes " + std::to_string(rep.raw_bytes),
      "compressed bytes " + std::to_string(rep.compressed_bytes),
      "ratio " + Fixed(rep.ratio, 2),
      "round-trip ok",
  };
}

Summary Bench(const PipelineConfig& config) {
  OutputGuard out(config);
  const Dataset data = LoadDataset(config);
  Summary s;

  csv::Writer table(out.Add(Artifacts::kBenchTable));
  table.Line(
      "method,trial,epochs,seconds,seconds_per_epoch,setup_seconds,macs_per_epoch,val_accuracy,"
      "test_f1");
  std::array<double, 2> per_epoch_sum{};
  const std::array<std::string, 2> methods = {"gcn", "fastgcn"};
  for (std::uint32_t trial = 0; trial < config.bench_trials; ++trial) {
    for (std::size_t k = 0; k < methods.size(); ++k) {
      const gcnkit::TrainResult r = RunTraining(methods[k], data, config.train.hyper);
      const std::size_t epochs = r.metrics.size();
      const double seconds = r.TrainSeconds();
      const double per_epoch = epochs ? seconds / static_cast<double>(epochs) : 0.0;
      std::uint64_t macs = 0;
      for (const auto& m : r.metrics) macs += m.macs;
      const double val_acc = epochs ? r.metrics.back().val_accuracy : 0.0;
      const gcnkit::DetectionScore score = Evaluate(data, r.model);
      table.Row(methods[k], trial, epochs, seconds, per_epoch, r.setup_seconds,
                epochs ? macs / epochs : 0, val_acc, score.test_f1);
      per_epoch_sum[k] += per_epoch;
      s.push_back(methods[k] + " trial " + std::to_string(trial) + ": " +
                  std::to_string(epochs) + " epochs, " + Fixed(seconds, 3) + " s, test f1 " +
                  Fixed(score.test_f1, 4));
    }
  }
  table.Close();
  if (per_epoch_sum[0] > 0.0) {
    s.push_back("per-epoch ratio fastgcn/gcn " + Fixed(per_epoch_sum[1] / per_epoch_sum[0], 3));
  }

  csv::Writer comp(out.Add(Artifacts::kCompressionTable));
  comp.Line("strategy,vertices,edges,raw_bytes,compressed_bytes,raw_mb,compressed_mb,ratio,mean_gap");
  for (const auto strategy : config.bench_strategies) {
    const gstore::Permutation perm = gstore::Reorder(data.graph, strategy);
    const gstore::CompressedGraph cg = gstore::Compress(data.graph, perm);
    const gstore::CompressionReport rep = gstore::MakeCompressionReport(cg);
    const double gap = gstore::MeanNeighborGap(gstore::Relabel(data.graph, perm));
    comp.Row(gstore::ToString(strategy), data.graph.vertex_count, data.graph.edge_count(),
             rep.raw_bytes, rep.compressed_bytes, Fixed(rep.raw_bytes / 1e6, 2),
             Fixed(rep.compressed_bytes / 1e6, 2), Fixed(rep.ratio, 2), Fixed(gap, 1));
    s.push_back("compression " + std::string(gstore::ToString(strategy)) + ": ratio " +
                Fixed(rep.ratio, 2));
  }
  comp.Close();
  out.Commit();
  return s;
}

Summary Infer(const PipelineConfig& config) {
  if (config.infer.stream.empty()) {
    throw Error(ErrorCode::kConfig, "infer: [infer] stream is not set");
  }
  OutputGuard out(config);
  const Dataset data = LoadDataset(config);
  const gcnkit::GcnModel model = Stage(
      "gcnkit", [&] { return gcnkit::ReadCheckpoint(config.Path(CheckpointName(config.infer.method))); });
  const auto stream = Stage("deltainfer", [&] {
    return deltainfer::ReadTransactionStream(Resolve(config, config.infer.stream));
  });

  const auto t_full = Clock::now();
  deltainfer::IncrementalEngine engine(data.graph, data.features, model);
  const double full_seconds = Since(t_full);

  csv::Writer log(out.Add(Artifacts::kInferLog));
  log.Line("batch,transactions,epoch,layer1_rows,layer2_rows");
  double update_seconds = 0.0;
  std::size_t batches = 0;
  const std::span<const txflow::Transaction> all(stream);
  for (std::size_t begin = 0; begin < all.size(); begin += config.infer.batch) {
    const auto chunk = all.subspan(begin, std::min<std::size_t>(config.infer.batch, all.size() - begin));
    const auto t0 = Clock::now();
    const deltainfer::RefreshStats stats = Stage("deltainfer", [&] {
      const deltainfer::DirtySet dirty = engine.ApplyTransactions(chunk);
      return engine.Refresh(dirty);
    });
    update_seconds += Since(t0);
    log.Row(batches, chunk.size(), engine.epoch(), stats.layer1_rows, stats.layer2_rows);
    ++batches;
  }
  log.Close();

  const deltainfer::Snapshot snap = engine.Current();
  csv::Writer scores(out.Add(Artifacts::kInferScores));
  scores.Line("account_id,p_suspicious");
  for (std::size_t v = 0; v < snap.probs->rows(); ++v) scores.Row(v, snap.probs->row(v)[1]);
  scores.Close();

  Summary s = {
      "stream transactions " + std::to_string(stream.size()) + " in " + std::to_string(batches) +
          " batches",
      "new edges " + std::to_string(engine.graph().delta_size() / 2),
      "full forward seconds " + Fixed(full_seconds, 4),
      "mean update seconds " +
          Fixed(batches ? update_seconds / static_cast<double>(batches) : 0.0, 6),
  };
  if (config.infer.verify) {
    const auto adj = gcnkit::NormalizeAdjacency(engine.graph().Materialize());
    const double diff =
        linalg::MaxAbsDiff(gcnkit::Forward(adj, data.features, model), *snap.probs);
    if (diff > 1e-9) {
      throw Error(ErrorCode::kContract,
                  "deltainfer: refreshed outputs differ from full forward by " + std::to_string(diff));
    }
    s.push_back("verify max abs diff " + std::to_string(diff));
  }
  out.Commit();
  return s;
}

}  // namespace aml::pipeline
