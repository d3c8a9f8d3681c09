// SPDX-License-Identifier: Apache-2.0
//
// Subcommand implementations behind the `midi` binary. Each returns a
// process exit code from the stable table below and writes its output to
// the streams it is handed, so tests can drive them in-process.

#ifndef MIDI_CLI_COMMANDS_HPP
#define MIDI_CLI_COMMANDS_HPP

#include <cstdint>
#include <iosfwd>
#include <string>

namespace midi::cli {

// Stable exit codes.
inline constexpr int kExitOk = 0;           // success
inline constexpr int kExitFailure = 1;      // self-check or internal failure
inline constexpr int kExitConfig = 2;       // bad config key/value, missing input
inline constexpr int kExitDiverged = 3;     // non-finite training loss
inline constexpr int kExitMismatch = 4;     // checkpoint incompatible with config
inline constexpr int kExitEmptySet = 5;     // nothing to evaluate

struct TrainOptions {
  std::string config_path;
  bool dry_run = false;
  std::string resume_path;  // empty: fresh run
};

struct SampleOptions {
  std::string config_path;
  std::string checkpoint_path;  // empty: config's train.checkpoint
  int count = -1;               // <0: config's sample.count
  bool seed_set = false;
  uint64_t seed = 0;            // used when seed_set
  std::string out_path;         // empty: config's sample.out
  bool baseline_bonds = false;  // also write distance-derived bonds
};

struct EvalOptions {
  std::string config_path;
  std::string generated_path;
  std::string reference_path;  // empty: config's dataset.path
  std::string report_path;     // empty: config's eval.report
};

int cmd_train(const TrainOptions& opt, std::ostream& out, std::ostream& err);
int cmd_sample(const SampleOptions& opt, std::ostream& out, std::ostream& err);
int cmd_eval(const EvalOptions& opt, std::ostream& out, std::ostream& err);
int cmd_schedule_dump(const std::string& config_path, std::ostream& out,
                      std::ostream& err);

// Fast invariant suite; prints one status line per check. flip_mu_sign is a
// mutation hook for testing the harness itself: it negates the final-step
// posterior mean coefficient and must make the corresponding check fail.
int cmd_selfcheck(bool flip_mu_sign, std::ostream& out, std::ostream& err);

}  // namespace midi::cli

#endif
