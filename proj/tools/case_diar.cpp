// tools/case_diar.cpp

// Copyright 2026  case-diar authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "casediar/casediar.hpp"

namespace {

using casediar::config::Config;
using casediar::pipeline::RunConfig;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::string regime;
  std::string system;
  std::string set;
  std::string hyp_dir;
  double error_rate = -1.0;
  long long seed = -1;
  bool has_seed = false;
};

RunConfig make_run_config(const CommonArgs& args) {
  Config cfg = args.config_path.empty() ? Config::parse("")
                                        : Config::parse_file(args.config_path);
  if (args.has_seed) cfg.set("seed", std::to_string(args.seed));
  if (!args.out_dir.empty()) cfg.set("out", args.out_dir);
  if (!args.regime.empty()) cfg.set("diarise.regime", args.regime);
  if (!args.system.empty()) cfg.set("diarise.system", args.system);
  if (!args.set.empty()) cfg.set("diarise.set", args.set);
  if (args.error_rate >= 0.0) cfg.set("diarise.error_rate", std::to_string(args.error_rate));
  return casediar::pipeline::load_run_config(cfg);
}

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_config) {
  auto* opt = cmd->add_option("--config", args.config_path, "run configuration file");
  if (needs_config) opt->required();
  cmd->add_option("--out", args.out_dir, "output directory (overrides config 'out')");
  cmd->add_option("--seed", args.seed, "seed (overrides config 'seed')")
      ->each([&args](const std::string&) { args.has_seed = true; });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"content-aware speaker diarisation pipeline"};
  app.require_subcommand(1);
  CommonArgs args;

  CLI::App* synth = app.add_subcommand("synth", "generate the synthetic meeting corpus");
  add_common(synth, args, true);

  CLI::App* train = app.add_subcommand("train", "train embedder, VAD and CPD checkpoints");
  add_common(train, args, true);

  CLI::App* diarise = app.add_subcommand("diarise", "produce hypothesis RTTM per meeting");
  add_common(diarise, args, true);
  diarise->add_option("--regime", args.regime,
                      "reference | manual-hypothesis | automatic-hypothesis");
  diarise->add_option("--system", args.system, "system checkpoint to use");
  diarise->add_option("--error-rate", args.error_rate, "hypothesis unit error rate");
  diarise->add_option("--set", args.set, "meeting set: train | dev | eval | all");

  CLI::App* score = app.add_subcommand("score", "score hypothesis RTTMs against the corpus");
  add_common(score, args, true);
  score->add_option("--hyp", args.hyp_dir, "directory with <meeting>.rttm hypotheses")
      ->required();
  score->add_option("--set", args.set, "meeting set: train | dev | eval | all");

  CLI::App* experiment =
      app.add_subcommand("experiment", "run the full comparison across systems and regimes");
  add_common(experiment, args, true);

  CLI11_PARSE(app, argc, argv);

  try {
    const RunConfig rc = make_run_config(args);
    if (synth->parsed()) {
      casediar::pipeline::cmd_synth(rc);
    } else if (train->parsed()) {
      casediar::pipeline::cmd_train(rc);
    } else if (diarise->parsed()) {
      casediar::pipeline::cmd_diarise(rc);
    } else if (score->parsed()) {
      casediar::pipeline::cmd_score(rc, args.hyp_dir);
    } else if (experiment->parsed()) {
      casediar::pipeline::cmd_experiment(rc);
    }
  } catch (const std::exception& e) {
    std::cerr << "case-diar: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
