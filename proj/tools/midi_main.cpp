// SPDX-License-Identifier: Apache-2.0
//
// Command-line entry point. All behaviour lives in midi::cli so it can be
// exercised in-process by the tests; this file only parses arguments.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "midi/cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"joint molecular graph and conformer generation"};
  app.require_subcommand(1);

  midi::cli::TrainOptions train_opt;
  CLI::App* train = app.add_subcommand("train", "fit the denoiser");
  train->add_option("--config", train_opt.config_path, "run configuration file")
      ->required();
  train->add_flag("--dry-run", train_opt.dry_run,
                  "validate the configuration and exit");
  train->add_option("--resume", train_opt.resume_path,
                    "checkpoint to continue from");

  midi::cli::SampleOptions sample_opt;
  CLI::App* sample = app.add_subcommand("sample", "generate molecules");
  sample->add_option("--config", sample_opt.config_path,
                     "run configuration file")
      ->required();
  sample->add_option("--checkpoint", sample_opt.checkpoint_path,
                     "trained model (defaults to the configured path)");
  sample->add_option("--num", sample_opt.count, "number of molecules");
  CLI::Option* seed_opt =
      sample->add_option("--seed", sample_opt.seed, "root random seed");
  sample->add_option("--out", sample_opt.out_path, "output JSONL path");
  sample->add_flag("--baseline-bonds", sample_opt.baseline_bonds,
                   "also write bonds re-derived from interatomic distances");

  midi::cli::EvalOptions eval_opt;
  CLI::App* eval = app.add_subcommand("eval", "score a generated set");
  eval->add_option("--config", eval_opt.config_path, "run configuration file")
      ->required();
  eval->add_option("--generated", eval_opt.generated_path,
                   "JSONL file of generated molecules")
      ->required();
  eval->add_option("--reference", eval_opt.reference_path,
                   "reference dataset (defaults to the configured dataset)");
  eval->add_option("--out", eval_opt.report_path,
                   "JSON report path (defaults to the configured path)");

  std::string dump_config;
  CLI::App* dump = app.add_subcommand(
      "schedule-dump", "print the noise schedule as CSV");
  dump->add_option("--config", dump_config, "run configuration file")
      ->required();

  bool flip_mu = false;
  CLI::App* selfcheck =
      app.add_subcommand("selfcheck", "run the built-in invariant suite");
  selfcheck
      ->add_flag("--flip-mu", flip_mu,
                 "negate the final-step posterior mean coefficient; the "
                 "corresponding check must then fail")
      ->group("");  // test hook, hidden from --help

  CLI11_PARSE(app, argc, argv);

  if (train->parsed())
    return midi::cli::cmd_train(train_opt, std::cout, std::cerr);
  if (sample->parsed()) {
    sample_opt.seed_set = seed_opt->count() > 0;
    return midi::cli::cmd_sample(sample_opt, std::cout, std::cerr);
  }
  if (eval->parsed())
    return midi::cli::cmd_eval(eval_opt, std::cout, std::cerr);
  if (dump->parsed())
    return midi::cli::cmd_schedule_dump(dump_config, std::cout, std::cerr);
  if (selfcheck->parsed())
    return midi::cli::cmd_selfcheck(flip_mu, std::cout, std::cerr);
  return midi::cli::kExitFailure;
}
