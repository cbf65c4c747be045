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

// amlcli: command-line front end over the libamlgraph C interface.
//
//   amlcli generate --config cfg.ini --out run/
//   amlcli scan     --config cfg.ini --out run/
//   amlcli train    --config cfg.ini --out run/ --method fastgcn
//   amlcli compress --config cfg.ini --out run/ --strategy degree
//   amlcli bench    --config cfg.ini --out run/
//   amlcli infer    --config cfg.ini --out run/

#include <cstdint>
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "amlgraph/amlgraph.h"

namespace {

struct Options {
  std::string config;
  std::string out = "out";
  std::uint64_t seed = 0;
  bool has_seed = false;
  std::string method;
  std::string strategy;
};

int Run(const std::string& command, const Options& opt) {
  aml_pipeline* p = nullptr;
  aml_status st = aml_pipeline_open(opt.config.c_str(), opt.out.c_str(), opt.has_seed ? 1 : 0,
                                    opt.seed, &p);
  if (st == AML_OK) {
    if (command == "generate") {
      st = aml_generate(p);
    } else if (command == "scan") {
      st = aml_scan(p);
    } else if (command == "train") {
      st = aml_train(p, opt.method.empty() ? nullptr : opt.method.c_str());
    } else if (command == "compress") {
      st = aml_compress(p, opt.strategy.empty() ? nullptr : opt.strategy.c_str());
    } else if (command == "bench") {
      st = aml_bench(p);
    } else {
      st = aml_infer(p);
    }
  }
  if (st != AML_OK) {
    std::fprintf(stderr, "amlcli %s: %s: %s\n", command.c_str(), aml_status_string(st),
                 aml_last_error());
    aml_pipeline_close(p);
    return static_cast<int>(st);
  }
  std::fputs(aml_pipeline_summary(p), stdout);
  aml_pipeline_close(p);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic AML graph pipeline"};
  app.set_version_flag("--version", std::string(aml_version()));
  app.require_subcommand(1);

  Options opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "Pipeline configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "Artifact directory")->capture_default_str();
    sub->add_option_function<std::uint64_t>(
        "--seed",
        [&](const std::uint64_t& s) {
          opt.seed = s;
          opt.has_seed = true;
        },
        "Master seed (overrides the config)");
  };

  add_common(app.add_subcommand("generate", "Simulate accounts, transactions and typologies"));
  add_common(app.add_subcommand("scan", "Run the monitoring rules over transactions.csv"));
  CLI::App* train = app.add_subcommand("train", "Train a detector and write a checkpoint");
  add_common(train);
  train->add_option("--method", opt.method, "gcn or fastgcn")
      ->check(CLI::IsMember({"gcn", "fastgcn"}));
  CLI::App* compress = app.add_subcommand("compress", "Reorder and compress the edge list");
  add_common(compress);
  compress->add_option("--strategy", opt.strategy, "identity, bfs or degree")
      ->check(CLI::IsMember({"identity", "bfs", "degree", "degree_desc"}));
  add_common(app.add_subcommand("bench", "Time gcn vs fastgcn and tabulate compression"));
  add_common(app.add_subcommand("infer", "Stream new transactions through incremental inference"));

  CLI11_PARSE(app, argc, argv);
  return Run(app.get_subcommands().front()->get_name(), opt);
}
