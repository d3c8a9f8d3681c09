// SPDX-License-Identifier: Apache-2.0
//
// Flat experiment configuration: one dotted key per line ("schedule.nu_r =
// 2.5"), '#' comments, unknown keys rejected by name. The MIDI_SEED
// environment variable overrides the root seed so scripted sweeps can vary
// it without editing files.

#ifndef MIDI_CLI_RUN_CONFIG_HPP
#define MIDI_CLI_RUN_CONFIG_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

#include "midi/denoiser/model.hpp"
#include "midi/moldata/dataset.hpp"
#include "midi/moldata/valency.hpp"
#include "midi/noise/schedule.hpp"
#include "midi/sampling/bond_lookup.hpp"
#include "midi/training/trainer.hpp"

namespace midi::cli {

// Invalid or unknown configuration input; carries the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error("config key '" + key + "': " + message),
        key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct RunConfig {
  uint64_t seed = 0;

  std::string dataset_path = "assets/corpus.jsonl";
  std::string dataset_format = "jsonl";
  uint64_t split_seed = 1;
  double train_frac = 0.8;
  double val_frac = 0.1;
  double test_frac = 0.1;

  int schedule_T = 100;
  double schedule_s = 0.008;
  double nu_r = 2.5;
  double nu_x = 1.0;
  double nu_c = 1.0;
  double nu_y = 1.5;

  int model_layers = 6;
  int model_node_dim = 128;
  int model_edge_dim = 64;
  int model_global_dim = 128;
  int model_heads = 8;
  int model_t_emb_dim = 32;
  int model_pos_hidden = 16;

  training::LossWeights loss;
  training::AdamConfig optim;

  int64_t train_steps = 3000;
  int batch_size = 8;
  int log_every = 20;
  int val_every = 200;
  std::string checkpoint_path = "model.ckpt";
  std::string train_log_path = "train_log.csv";

  int sample_count = 100;
  std::string sample_out = "samples.jsonl";

  std::string valency_table_path;  // empty: built-in defaults
  std::string bond_table_path;     // empty: built-in defaults
  std::string eval_report_path = "report.json";

  // Parses a config file and applies the MIDI_SEED override.
  static RunConfig load(const std::string& path);
  // Parses config text alone (no environment lookup).
  static RunConfig from_text(const std::string& text);

  // Applies one key/value pair; unknown keys and unparsable values throw
  // ConfigError naming the key.
  void set(const std::string& key, const std::string& value);

  // Range and consistency checks; with check_paths, also requires every
  // referenced input path to exist.
  void validate(bool check_paths = true) const;

  denoiser::DenoiserConfig denoiser_config() const;
  noise::NoiseSchedule schedule() const;
  training::TrainSettings train_settings() const;
  moldata::DatasetSplit load_split() const;
  moldata::ValencyTable valency_table() const;
  sampling::BondLookupTable bond_table() const;

  // Deterministic serialization of the fields a checkpoint must agree on
  // (dataset identity, schedule, model dims).
  std::string canonical_text() const;
};

}  // namespace midi::cli

#endif
